//! Monte Carlo for Bernoulli bond percolation: theta_n(p), theta curves,
//! crossing probabilities and a bisection estimate of p_c in the plane.

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeGraph, UnionFind, VERTEX_BUDGET};
use crate::rng::{self, tag};
use crate::stats::Estimate;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Cap on replicas times edges for one call.
pub const WORK_BUDGET: f64 = 2e12;

fn check_work(replicas: u64, edges: usize) -> Result<()> {
    if replicas == 0 {
        return invalid("replicas must be at least 1");
    }
    if replicas as f64 * edges as f64 > WORK_BUDGET {
        return Err(Error::Budget(format!("{replicas} replicas over {edges} edges")));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("p = {p} outside [0, 1]"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub p: f64,
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
}

/// theta_n(p) estimates on a grid of scales and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaCurve {
    pub d: usize,
    pub replicas: u64,
    pub seed: u64,
    /// Shared uniforms across p: estimates are exactly monotone in p and the
    /// indicators at two parameters are nested.
    pub coupled: bool,
    /// Sorted by (n, p).
    pub rows: Vec<CurveRow>,
}

impl ThetaCurve {
    pub fn get(&self, n: usize, p: f64) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.n == n && (r.p - p).abs() < 1e-9)
    }

    pub fn scales(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        s.dedup();
        s
    }

    pub fn parameters(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.rows.iter().map(|r| r.p).collect();
        p.sort_by(f64::total_cmp);
        p.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        p
    }
}

/// One line of the Bernoulli CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliRow {
    pub model: String,
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub seed: u64,
}

impl ThetaCurve {
    pub fn csv_rows(&self) -> Vec<BernoulliRow> {
        self.rows
            .iter()
            .map(|r| BernoulliRow {
                model: "theta".into(),
                d: self.d,
                n: r.n,
                p: r.p,
                estimate: r.estimate,
                stderr: r.stderr,
                replicas: self.replicas,
                seed: self.seed,
            })
            .collect()
    }
}

/// Per-worker state for threshold computations on one box.
struct Invasion<'g> {
    g: &'g LatticeGraph,
    norms: Vec<u32>,
    uniforms: Vec<f64>,
    best: Vec<f64>,
    done: Vec<bool>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
    touched: Vec<u32>,
}

impl<'g> Invasion<'g> {
    fn new(g: &'g LatticeGraph) -> Invasion<'g> {
        Invasion {
            g,
            norms: g.sup_norms(),
            uniforms: vec![0.0; g.edge_count()],
            best: vec![f64::INFINITY; g.vertex_count()],
            done: vec![false; g.vertex_count()],
            heap: BinaryHeap::new(),
            touched: Vec::new(),
        }
    }

    fn draw<R: Rng>(&mut self, rng: &mut R) {
        for u in self.uniforms.iter_mut() {
            *u = rng.random::<f64>();
        }
    }

    /// thresholds[k] = inf { p : origin reaches sup-norm k through edges with
    /// U_e < p }, computed by minimax search. Levels whose threshold is at
    /// least `cap` are left at infinity.
    fn thresholds(&mut self, cap: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|t| *t = f64::INFINITY);
        out[0] = 0.0;
        for v in self.touched.drain(..) {
            self.best[v as usize] = f64::INFINITY;
            self.done[v as usize] = false;
        }
        self.heap.clear();
        let Some(o) = self.g.origin() else { return };
        let top = out.len() - 1;
        let mut reached = 0usize;
        self.best[o] = 0.0;
        self.touched.push(o as u32);
        self.heap.push(Reverse((0f64.to_bits(), o as u32)));
        while let Some(Reverse((bits, v))) = self.heap.pop() {
            let b = f64::from_bits(bits);
            let v = v as usize;
            if self.done[v] {
                continue;
            }
            if b >= cap {
                break;
            }
            self.done[v] = true;
            let level = (self.norms[v] as usize).min(top);
            while reached < level {
                reached += 1;
                out[reached] = b;
            }
            if reached == top {
                break;
            }
            for &e in self.g.incident(v) {
                let e = e as usize;
                let w = self.g.other_end(e, v);
                let nb = b.max(self.uniforms[e]);
                if nb < self.best[w] {
                    if self.best[w].is_infinite() {
                        self.touched.push(w as u32);
                    }
                    self.best[w] = nb;
                    self.heap.push(Reverse((nb.to_bits(), w as u32)));
                }
            }
        }
    }
}

fn validate_grid(d: usize, n_list: &[usize], p_grid: &[f64]) -> Result<()> {
    if d == 0 {
        return invalid("dimension must be at least 1");
    }
    if n_list.is_empty() || p_grid.is_empty() {
        return invalid("scale list and parameter grid must be non-empty");
    }
    p_grid.iter().try_for_each(|p| check_probability(*p))
}

/// theta_n(p) for every (n, p) with one set of uniforms per replica on the
/// largest box. One replica yields the minimax threshold of every scale, so
/// all cells share the same randomness.
fn coupled_curve(d: usize, n_list: &[usize], p_grid: &[f64], replicas: u64, seed: u64) -> Result<ThetaCurve> {
    validate_grid(d, n_list, p_grid)?;
    let top = *n_list.iter().max().unwrap();
    let g = LatticeGraph::with_budget(d, top, VERTEX_BUDGET)?;
    check_work(replicas, g.edge_count())?;
    let cap = p_grid.iter().copied().fold(0.0, f64::max);
    let cells = n_list.len() * p_grid.len();
    let partial = rng::chunked(replicas, |start, end| {
        let mut inv = Invasion::new(&g);
        let mut t = vec![0.0; top + 1];
        let mut hits = vec![0u64; cells];
        for i in start..end {
            inv.draw(&mut rng::stream(seed, tag::THETA, i));
            inv.thresholds(cap, &mut t);
            for (a, &n) in n_list.iter().enumerate() {
                for (b, &p) in p_grid.iter().enumerate() {
                    if n == 0 || t[n] < p {
                        hits[a * p_grid.len() + b] += 1;
                    }
                }
            }
        }
        hits
    });
    let mut hits = vec![0u64; cells];
    for h in partial {
        hits.iter_mut().zip(h).for_each(|(a, b)| *a += b);
    }
    let mut rows = Vec::with_capacity(cells);
    for (a, &n) in n_list.iter().enumerate() {
        for (b, &p) in p_grid.iter().enumerate() {
            let e = Estimate::proportion(hits[a * p_grid.len() + b], replicas, seed);
            rows.push(CurveRow { p, n, estimate: e.value, stderr: e.stderr });
        }
    }
    rows.sort_by(|x, y| x.n.cmp(&y.n).then(x.p.total_cmp(&y.p)));
    rows.dedup_by(|x, y| x.n == y.n && x.p == y.p);
    Ok(ThetaCurve { d, replicas, seed, coupled: true, rows })
}

/// Probability that the origin reaches the boundary of the box of radius `n`.
pub fn estimate_theta_n(d: usize, n: usize, p: f64, replicas: u64, seed: u64) -> Result<Estimate> {
    let c = coupled_curve(d, &[n], &[p], replicas, seed)?;
    let row = &c.rows[0];
    Ok(Estimate { value: row.estimate, stderr: row.stderr, replicas, seed })
}

/// Curve over scales and parameters. With `coupled`, all cells share
/// uniforms; otherwise every cell has its own independent streams.
pub fn theta_curve(
    d: usize,
    n_list: &[usize],
    p_grid: &[f64],
    replicas: u64,
    seed: u64,
    coupled: bool,
) -> Result<ThetaCurve> {
    if coupled {
        return coupled_curve(d, n_list, p_grid, replicas, seed);
    }
    validate_grid(d, n_list, p_grid)?;
    let mut rows = Vec::new();
    for (a, &n) in n_list.iter().enumerate() {
        for (b, &p) in p_grid.iter().enumerate() {
            let cell_seed = rng::derive(seed, ((a as u64) << 32) | b as u64);
            let e = estimate_theta_n(d, n, p, replicas, cell_seed)?;
            rows.push(CurveRow { p, n, estimate: e.value, stderr: e.stderr });
        }
    }
    rows.sort_by(|x, y| x.n.cmp(&y.n).then(x.p.total_cmp(&y.p)));
    Ok(ThetaCurve { d, replicas, seed, coupled: false, rows })
}

/// Left-right open crossing of the square [0, n]^2.
pub fn crossing_probability(n: usize, p: f64, replicas: u64, seed: u64) -> Result<Estimate> {
    check_probability(p)?;
    if n == 0 {
        return invalid("crossing needs n >= 1");
    }
    let g = LatticeGraph::rectangle(&[0, 0], &[n as i64, n as i64], VERTEX_BUDGET)?;
    check_work(replicas, g.edge_count())?;
    let left: Vec<usize> = g.face(0, false);
    let right: Vec<usize> = g.face(0, true);
    let v = g.vertex_count();
    let hits: u64 = rng::chunked(replicas, |start, end| {
        let mut uf = UnionFind::new(v + 2);
        let mut count = 0u64;
        for i in start..end {
            let mut r = rng::stream(seed, tag::CROSSING, i);
            uf.reset(v + 2);
            for &x in &left {
                uf.union(x, v);
            }
            for &x in &right {
                uf.union(x, v + 1);
            }
            for e in 0..g.edge_count() {
                if r.random::<f64>() < p {
                    let (a, b) = g.endpoints(e);
                    uf.union(a, b);
                }
            }
            if uf.same(v, v + 1) {
                count += 1;
            }
        }
        count
    })
    .into_iter()
    .sum();
    Ok(Estimate::proportion(hits, replicas, seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct PcEstimate {
    pub n: usize,
    /// Midpoint of the final bracket; `stderr` holds the half-width.
    pub root: Estimate,
    pub bracket: (f64, f64),
    pub evaluations: Vec<(f64, Estimate)>,
}

/// Bisection for the parameter where the crossing probability of [0, n]^2
/// equals 1/2. The same replica streams are reused at every parameter.
pub fn estimate_pc_crossing(n: usize, replicas: u64, seed: u64, resolution: f64) -> Result<PcEstimate> {
    if !(resolution > 0.0 && resolution < 0.5) {
        return invalid("resolution must lie in (0, 0.5)");
    }
    let mut evaluations = Vec::new();
    let f0 = crossing_probability(n, 0.0, replicas, seed)?;
    let f1 = crossing_probability(n, 1.0, replicas, seed)?;
    evaluations.push((0.0, f0));
    evaluations.push((1.0, f1));
    if !(f0.value < 0.5 && f1.value > 0.5) {
        return Err(Error::Algorithm("crossing probability does not bracket 1/2 on [0, 1]".into()));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 2.0 * resolution {
        let mid = 0.5 * (lo + hi);
        let f = crossing_probability(n, mid, replicas, seed)?;
        evaluations.push((mid, f));
        if f.value < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = Estimate { value: 0.5 * (lo + hi), stderr: 0.5 * (hi - lo), replicas, seed };
    Ok(PcEstimate { n, root, bracket: (lo, hi), evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{connected_to_boundary, Configuration};

    #[test]
    fn extremes() {
        assert_eq!(estimate_theta_n(2, 3, 0.0, 50, 1).unwrap().value, 0.0);
        assert_eq!(estimate_theta_n(2, 3, 1.0, 50, 1).unwrap().value, 1.0);
        assert_eq!(estimate_theta_n(2, 0, 0.0, 50, 1).unwrap().value, 1.0);
        assert_eq!(crossing_probability(4, 0.0, 20, 1).unwrap().value, 0.0);
        assert_eq!(crossing_probability(4, 1.0, 20, 1).unwrap().value, 1.0);
        assert!(estimate_theta_n(2, 3, 1.5, 50, 1).is_err());
        assert!(estimate_theta_n(2, 3, 0.5, 0, 1).is_err());
    }

    #[test]
    fn thresholds_agree_with_direct_connectivity() {
        let g = LatticeGraph::new(2, 4).unwrap();
        let mut inv = Invasion::new(&g);
        let mut t = vec![0.0; 5];
        for i in 0..300 {
            inv.draw(&mut rng::stream(3, tag::THETA, i));
            inv.thresholds(1.0, &mut t);
            assert!(t.windows(2).all(|w| w[0] <= w[1]));
            for p in [0.3, 0.5, 0.7] {
                let cfg = Configuration::from_uniforms(&inv.uniforms, p);
                for k in 1..=4 {
                    let sub = LatticeGraph::new(2, k).unwrap();
                    let restricted = Configuration::from_bits(
                        &(0..sub.edge_count())
                            .map(|e| {
                                let (a, b) = sub.endpoints(e);
                                let ga = g.index_of(&sub.coords(a)).unwrap();
                                let gb = g.index_of(&sub.coords(b)).unwrap();
                                let ge = g.incident(ga).iter().find(|&&x| g.other_end(x as usize, ga) == gb).unwrap();
                                cfg.get(*ge as usize)
                            })
                            .collect::<Vec<_>>(),
                    );
                    assert_eq!(t[k] < p, connected_to_boundary(&restricted, &sub), "k={k} p={p}");
                }
            }
        }
    }

    #[test]
    fn single_cell_curve_matches_point_estimate() {
        let e = estimate_theta_n(2, 5, 0.55, 3000, 42).unwrap();
        let c = theta_curve(2, &[5], &[0.55], 3000, 42, true).unwrap();
        assert_eq!(c.rows.len(), 1);
        assert_eq!(c.rows[0].estimate, e.value);
    }

    #[test]
    fn coupled_curves_are_monotone_in_p() {
        let c = theta_curve(2, &[8, 12], &[0.40, 0.45, 0.50, 0.55, 0.60], 2000, 5, true).unwrap();
        for n in c.scales() {
            let v: Vec<f64> = c.rows.iter().filter(|r| r.n == n).map(|r| r.estimate).collect();
            assert!(v.windows(2).all(|w| w[0] <= w[1]));
        }
        for p in c.parameters() {
            assert!(c.get(8, p).unwrap().estimate >= c.get(12, p).unwrap().estimate);
        }
    }

    #[test]
    fn uncoupled_curve_rows_are_sorted() {
        let c = theta_curve(2, &[3, 1], &[0.6, 0.4], 200, 5, false).unwrap();
        let keys: Vec<_> = c.rows.iter().map(|r| (r.n, r.p)).collect();
        assert_eq!(keys, vec![(1, 0.4), (1, 0.6), (3, 0.4), (3, 0.6)]);
        assert!(!c.coupled);
    }

    #[test]
    fn small_box_matches_closed_form() {
        for p in [0.2, 0.5, 0.8] {
            let e = estimate_theta_n(2, 1, p, 40_000, 8).unwrap();
            let exact = 1.0 - (1.0f64 - p).powi(4);
            assert!((e.value - exact).abs() <= 4.0 * e.stderr.max(1e-12), "p={p}");
        }
    }

    #[test]
    fn identical_seeds_reproduce() {
        let a = theta_curve(2, &[6], &[0.5, 0.6], 700, 77, true).unwrap();
        let b = theta_curve(2, &[6], &[0.5, 0.6], 700, 77, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_crossing_bisection_brackets_half() {
        let pc = estimate_pc_crossing(8, 400, 2, 0.01).unwrap();
        assert!(pc.bracket.0 < pc.bracket.1);
        assert!((pc.root.value - 0.5).abs() < 0.1);
        assert!(pc.root.stderr <= 0.01);
    }
}
