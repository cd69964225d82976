//! Cell exploration of the component of a sphere.
//!
//! The index set is the cells (x, n): balls with center in x + [0,1)^d and
//! radius in [n, n+1), for integer points with |x| <= L and n <= L. Every
//! other ball is revealed up front. Then a cell is revealed whenever its box
//! lies within distance n + 1 of the current component of S_s in the
//! occupied set of the revealed balls.

use super::graph::BallGraph;
use super::model::{BooleanModel, TruncationPolicy};
use super::region::Region;
use crate::error::{invalid, Result};
use crate::ppp::{norm, MarkedSample};
use crate::rng::{chunked, stream, tag};
use crate::stats::{Estimate, Moments, Verdict};
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumExploration {
    pub d: usize,
    pub seed_radius: f64,
    pub cap: i64,
    /// Integer points with |x| <= cap, in lexicographic order.
    pub sites: Vec<Vec<i64>>,
}

/// Result of one exploration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplorationTrace {
    /// Revealed cells (site index, n) in reveal order.
    pub order: Vec<(usize, i64)>,
    /// Per site, the distance from its box to the final component of S_s.
    pub final_distance: Vec<f64>,
    /// Balls of the final component.
    pub component: Vec<usize>,
}

impl ExplorationTrace {
    pub fn revealed(&self) -> BTreeSet<(usize, i64)> {
        self.order.iter().copied().collect()
    }
}

impl ContinuumExploration {
    pub fn new(d: usize, seed_radius: f64, observation: f64, cap: i64) -> Result<ContinuumExploration> {
        if !(0.0..=observation).contains(&seed_radius) {
            return invalid(format!("seed radius {seed_radius} must lie in [0, {observation}]"));
        }
        if cap < 0 || d == 0 {
            return invalid("cell cap must be non-negative and dimension positive");
        }
        let side = (2 * cap + 1) as usize;
        let mut sites = Vec::new();
        for code in 0..side.pow(d as u32) {
            let mut c = code;
            let mut x = vec![0i64; d];
            for a in (0..d).rev() {
                x[a] = (c % side) as i64 - cap;
                c /= side;
            }
            if (x.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt() <= cap as f64 {
                sites.push(x);
            }
        }
        Ok(ContinuumExploration { d, seed_radius, cap, sites })
    }

    fn cell_of(&self, sample: &MarkedSample, i: usize) -> Option<(usize, i64)> {
        let x: Vec<i64> = sample.center(i).iter().map(|c| c.floor() as i64).collect();
        let n = sample.radii[i].floor() as i64;
        if n > self.cap {
            return None;
        }
        self.sites.binary_search(&x).ok().map(|s| (s, n))
    }

    fn sphere(&self) -> Region {
        Region::centered_sphere(self.d, self.seed_radius)
    }

    /// Distance from a site's box to S_s together with the given balls.
    fn distance_to(&self, site: usize, sample: &MarkedSample, balls: &[usize]) -> f64 {
        let cell = Region::unit_cell(&self.sites[site]);
        let mut best = sphere_gap(&cell, self.d, self.seed_radius);
        for &b in balls {
            best = best.min(cell.gap_to_ball(sample.center(b), sample.radii[b]));
        }
        best
    }

    /// Balls of the component of S_s among `revealed`.
    fn component(&self, sample: &MarkedSample, revealed: &[bool]) -> Vec<usize> {
        let idx: Vec<usize> = (0..sample.len()).filter(|&i| revealed[i]).collect();
        let sub = sample.filter(|i| revealed[i]);
        let g = BallGraph::build(&sub);
        let sphere = self.sphere();
        let touching = g.components_meeting(&sphere);
        (0..g.len()).filter(|&j| touching.binary_search(&g.component(j)).is_ok()).map(|j| idx[j]).collect()
    }

    /// Step-by-step run with the fixed order: the smallest eligible
    /// (site, n) in lexicographic order is revealed next.
    pub fn run(&self, sample: &MarkedSample) -> ExplorationTrace {
        let cells: Vec<Option<(usize, i64)>> = (0..sample.len()).map(|i| self.cell_of(sample, i)).collect();
        let mut revealed_ball: Vec<bool> = cells.iter().map(|c| c.is_none()).collect();
        let mut revealed_cell = vec![vec![false; self.cap as usize + 1]; self.sites.len()];
        let mut order = Vec::new();
        loop {
            let comp = self.component(sample, &revealed_ball);
            let mut next = None;
            'search: for s in 0..self.sites.len() {
                let dist = self.distance_to(s, sample, &comp);
                for n in 0..=self.cap {
                    if !revealed_cell[s][n as usize] && dist < (n + 1) as f64 {
                        next = Some((s, n));
                        break 'search;
                    }
                }
            }
            let Some((s, n)) = next else {
                let final_distance = (0..self.sites.len()).map(|s| self.distance_to(s, sample, &comp)).collect();
                return ExplorationTrace { order, final_distance, component: comp };
            };
            revealed_cell[s][n as usize] = true;
            order.push((s, n));
            for (i, c) in cells.iter().enumerate() {
                if *c == Some((s, n)) {
                    revealed_ball[i] = true;
                }
            }
        }
    }

    /// Final revealed set without replaying the order: a cell (x, n) ends up
    /// revealed iff its box is within n + 1 of the final component, which
    /// is the least fixed point of the reveal rule.
    pub fn revealed_fixpoint(&self, sample: &MarkedSample) -> (Vec<f64>, Vec<usize>) {
        let cells: Vec<Option<(usize, i64)>> = (0..sample.len()).map(|i| self.cell_of(sample, i)).collect();
        let mut revealed_ball: Vec<bool> = cells.iter().map(|c| c.is_none()).collect();
        loop {
            let comp = self.component(sample, &revealed_ball);
            let dist: Vec<f64> = (0..self.sites.len()).map(|s| self.distance_to(s, sample, &comp)).collect();
            let mut grew = false;
            for (i, c) in cells.iter().enumerate() {
                if let Some((s, n)) = c {
                    if !revealed_ball[i] && dist[*s] < (*n + 1) as f64 {
                        revealed_ball[i] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                return (dist, comp);
            }
        }
    }

    /// Whether S_x^n meets S_s or a ball of the component of S_s in the full
    /// sample. S_x^n is the union of unit cells with a point within n + 1 of x.
    fn neighbourhood_connected(&self, site: usize, n: i64, sample: &MarkedSample, comp: &[usize]) -> bool {
        let x: Vec<f64> = self.sites[site].iter().map(|&v| v as f64).collect();
        let reach = (n + 1) as f64;
        let span = reach.ceil() as i64 + 1;
        let side = (2 * span + 1) as usize;
        let mut y = vec![0i64; self.d];
        for code in 0..side.pow(self.d as u32) {
            let mut c = code;
            for a in 0..self.d {
                y[a] = self.sites[site][a] + (c % side) as i64 - span;
                c /= side;
            }
            let cell = Region::unit_cell(&y);
            if cell.distances(&x).0 > reach {
                continue;
            }
            if cell.meets(&self.sphere()) || comp.iter().any(|&b| cell.meets_ball(sample.center(b), sample.radii[b])) {
                return true;
            }
        }
        false
    }
}

fn sphere_gap(cell: &Region, d: usize, s: f64) -> f64 {
    let (near, far) = cell.distances(&vec![0.0; d]);
    if near <= s && s <= far {
        0.0
    } else if far < s {
        s - far
    } else {
        near - s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRevealment {
    pub x: Vec<i64>,
    pub n: i64,
    pub revealment: Estimate,
    pub bound: Estimate,
    pub verdict: Verdict,
}

/// Revealment of each cell with n <= `max_level` against
/// P[S_x^n <-> S_s], from the same samples. Per-replica differences give the
/// standard error of the comparison.
pub fn continuum_revealment(
    model: &BooleanModel,
    alg: &ContinuumExploration,
    max_level: i64,
    replicas: u64,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<Vec<CellRevealment>> {
    if replicas == 0 {
        return invalid("replicas must be at least 1");
    }
    let levels = (max_level.min(alg.cap) + 1) as usize;
    let reach = alg.cap as f64 + (alg.d as f64).sqrt();
    let pad = trunc.padding(model, reach)?;
    let k = alg.sites.len() * levels;
    let parts = chunked(replicas, |s, e| {
        let mut rev = vec![0u64; k];
        let mut bnd = vec![0u64; k];
        let mut diff = vec![Moments::default(); k];
        for i in s..e {
            let sample = model.sample_ball(reach + pad.padding, &mut stream(seed, tag::EVENTS, i)).expect("validated model");
            let (dist, _) = alg.revealed_fixpoint(&sample);
            let full = BallGraph::build(&sample);
            let touching = full.components_meeting(&alg.sphere());
            let comp: Vec<usize> =
                (0..full.len()).filter(|&j| touching.binary_search(&full.component(j)).is_ok()).collect();
            for site in 0..alg.sites.len() {
                for n in 0..levels as i64 {
                    let slot = site * levels + n as usize;
                    let r = dist[site] < (n + 1) as f64;
                    let b = alg.neighbourhood_connected(site, n, &sample, &comp);
                    rev[slot] += r as u64;
                    bnd[slot] += b as u64;
                    diff[slot].push(b as u8 as f64 - r as u8 as f64);
                }
            }
        }
        (rev, bnd, diff)
    });
    let mut rev = vec![0u64; k];
    let mut bnd = vec![0u64; k];
    let mut diff = vec![Moments::default(); k];
    for (r, b, m) in &parts {
        for j in 0..k {
            rev[j] += r[j];
            bnd[j] += b[j];
            diff[j].merge(&m[j]);
        }
    }
    let mut out = Vec::with_capacity(k);
    for site in 0..alg.sites.len() {
        for n in 0..levels {
            let j = site * levels + n;
            out.push(CellRevealment {
                x: alg.sites[site].clone(),
                n: n as i64,
                revealment: Estimate::proportion(rev[j], replicas, seed),
                bound: Estimate::proportion(bnd[j], replicas, seed),
                verdict: Verdict::one_sided(diff[j].mean(), diff[j].stderr()),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegratedCheck {
    pub y: Vec<f64>,
    /// Integral over s in [0, r] of P[y <-> S_s].
    pub integral: Estimate,
    /// 2 * Sigma_r with Sigma_r the integral of theta_s over [0, r].
    pub twice_sum: Estimate,
    pub verdict: Verdict,
}

/// Checks the integral of P[y <-> S_s] over s in [0, r] against 2 Sigma_r
/// for each y. The connected component of a point has an interval of norms,
/// so both integrals are exact per sample.
pub fn integrated_connection_check(
    model: &BooleanModel,
    r: f64,
    points: &[Vec<f64>],
    replicas: u64,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<Vec<IntegratedCheck>> {
    if replicas == 0 || !(r > 0.0) {
        return invalid("need positive radius and at least one replica");
    }
    let far = points.iter().map(|y| norm(y)).fold(0.0, f64::max);
    let pad = trunc.padding(model, r.max(far))?;
    let parts = chunked(replicas, |s, e| {
        let mut sums = Moments::default();
        let mut ints = vec![Moments::default(); points.len()];
        let mut diffs = vec![Moments::default(); points.len()];
        for i in s..e {
            let sample =
                model.sample_ball(r.max(far) + pad.padding, &mut stream(seed, tag::EVENTS, i)).expect("validated model");
            let g = BallGraph::build(&sample);
            let ext = g.radial_extents();
            let span_of = |p: &[f64]| -> f64 {
                let comps = g.components_meeting(&Region::point(p));
                comps
                    .iter()
                    .map(|&c| (ext[c].1.min(r) - ext[c].0.max(0.0)).max(0.0))
                    .fold(0.0, f64::max)
            };
            let sigma = span_of(&vec![0.0; model.d]);
            sums.push(2.0 * sigma);
            for (j, y) in points.iter().enumerate() {
                let v = span_of(y);
                ints[j].push(v);
                diffs[j].push(2.0 * sigma - v);
            }
        }
        (sums, ints, diffs)
    });
    let mut sums = Moments::default();
    let mut ints = vec![Moments::default(); points.len()];
    let mut diffs = vec![Moments::default(); points.len()];
    for (s, i, dm) in &parts {
        sums.merge(s);
        for j in 0..points.len() {
            ints[j].merge(&i[j]);
            diffs[j].merge(&dm[j]);
        }
    }
    Ok(points
        .iter()
        .enumerate()
        .map(|(j, y)| IntegratedCheck {
            y: y.clone(),
            integral: Estimate::from_moments(&ints[j], seed),
            twice_sum: Estimate::from_moments(&sums, seed),
            verdict: Verdict::one_sided(diffs[j].mean(), diffs[j].stderr()),
        })
        .collect())
}
