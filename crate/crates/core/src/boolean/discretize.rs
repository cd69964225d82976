//! Grid discretization of the occupied set and tangency diagnostics.

use super::graph::BallGraph;
use crate::lattice::UnionFind;
use crate::ppp::{distance, MarkedSample};
use serde::Serialize;
use std::collections::HashMap;

/// Pair whose boundary gap |‖x−y‖ − (r_x + r_y)| is below 4 eps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NearTangency {
    pub a: usize,
    pub b: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteReport {
    pub eps: f64,
    /// Cells [k eps, (k+1) eps)^d meeting the occupied set.
    pub occupied: Vec<Vec<i64>>,
    /// Components of balls after merging through face-adjacent occupied cells.
    pub grid_components: usize,
    pub exact_components: usize,
    pub near_tangent: Vec<NearTangency>,
    /// Smallest gap over disjoint pairs, infinite if none.
    pub min_disjoint_gap: f64,
    /// Smallest boundary gap over all pairs.
    pub min_tangency_gap: f64,
    /// True when every disjoint pair is farther apart than eps sqrt(d + 3),
    /// the diameter of two face-adjacent cells; then grid and exact
    /// connectivity of balls agree.
    pub certified: bool,
    pub agrees: bool,
}

fn cells_of_ball(center: &[f64], radius: f64, eps: f64, out: &mut Vec<Vec<i64>>) {
    let d = center.len();
    let lo: Vec<i64> = center.iter().map(|c| ((c - radius) / eps).floor() as i64).collect();
    let hi: Vec<i64> = center.iter().map(|c| ((c + radius) / eps).floor() as i64).collect();
    let mut k = lo.clone();
    loop {
        let mut gap2 = 0.0;
        for a in 0..d {
            let l = k[a] as f64 * eps;
            let g = (l - center[a]).max(center[a] - (l + eps)).max(0.0);
            gap2 += g * g;
        }
        if gap2.sqrt() <= radius {
            out.push(k.clone());
        }
        let mut a = 0;
        loop {
            if a == d {
                return;
            }
            k[a] += 1;
            if k[a] <= hi[a] {
                break;
            }
            k[a] = lo[a];
            a += 1;
        }
    }
}

/// Occupied eps-cells, face-adjacency components and tangency report.
pub fn discretize(sample: &MarkedSample, eps: f64) -> DiscreteReport {
    assert!(eps > 0.0, "grid spacing must be positive");
    let d = sample.d;
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut owner: Vec<Vec<usize>> = Vec::new();
    let mut scratch = Vec::new();
    for i in 0..sample.len() {
        scratch.clear();
        cells_of_ball(sample.center(i), sample.radii[i], eps, &mut scratch);
        for c in scratch.drain(..) {
            let next = index.len();
            let id = *index.entry(c).or_insert(next);
            if id == owner.len() {
                owner.push(Vec::new());
            }
            owner[id].push(i);
        }
    }
    let mut occupied: Vec<Vec<i64>> = vec![Vec::new(); index.len()];
    for (c, &id) in &index {
        occupied[id] = c.clone();
    }
    let mut uf = UnionFind::new(index.len());
    for (c, &id) in &index {
        let mut nb = c.clone();
        for a in 0..d {
            nb[a] += 1;
            if let Some(&j) = index.get(&nb) {
                uf.union(id, j);
            }
            nb[a] -= 1;
        }
    }
    let mut labels: Vec<usize> = vec![usize::MAX; sample.len()];
    for (id, balls) in owner.iter().enumerate() {
        for &b in balls {
            labels[b] = uf.find(id);
        }
    }
    let mut distinct: Vec<usize> = labels.iter().copied().filter(|&l| l != usize::MAX).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let grid_components = distinct.len();

    let exact = BallGraph::build(sample);
    let mut near_tangent = Vec::new();
    let mut min_disjoint_gap = f64::INFINITY;
    let mut min_tangency_gap = f64::INFINITY;
    for i in 0..sample.len() {
        for j in i + 1..sample.len() {
            let signed = distance(sample.center(i), sample.center(j)) - (sample.radii[i] + sample.radii[j]);
            let gap = signed.abs();
            min_tangency_gap = min_tangency_gap.min(gap);
            if signed > 0.0 {
                min_disjoint_gap = min_disjoint_gap.min(signed);
            }
            if gap < 4.0 * eps {
                near_tangent.push(NearTangency { a: i, b: j, gap });
            }
        }
    }
    let certified = min_disjoint_gap > eps * ((d + 3) as f64).sqrt();
    // Grid and exact partitions agree iff ball pairs share labels in both.
    let mut agrees = grid_components == exact.component_count();
    if agrees {
        let mut map: HashMap<usize, usize> = HashMap::new();
        for i in 0..sample.len() {
            let e = exact.component(i);
            if *map.entry(labels[i]).or_insert(e) != e {
                agrees = false;
                break;
            }
        }
    }
    occupied.sort();
    DiscreteReport {
        eps,
        occupied,
        grid_components,
        exact_components: exact.component_count(),
        near_tangent,
        min_disjoint_gap,
        min_tangency_gap,
        certified,
        agrees,
    }
}

/// Pairs whose spheres touch exactly in floating point.
pub fn exact_tangencies(sample: &MarkedSample) -> usize {
    let mut count = 0;
    for i in 0..sample.len() {
        for j in i + 1..sample.len() {
            if distance(sample.center(i), sample.center(j)) == sample.radii[i] + sample.radii[j] {
                count += 1;
            }
        }
    }
    count
}
