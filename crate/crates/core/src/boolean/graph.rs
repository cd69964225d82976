//! Intersection graph of the balls of a sample.

use super::region::Region;
use crate::lattice::UnionFind;
use crate::ppp::{distance, MarkedSample};
use std::collections::HashMap;

fn cell_key(cell: &[i64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &c in cell {
        h ^= c as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3).rotate_left(17);
    }
    h
}

/// Balls with union-find components, built from a spatial hash.
#[derive(Clone, Debug)]
pub struct BallGraph {
    pub d: usize,
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
    label: Vec<u32>,
    components: usize,
}

impl BallGraph {
    pub fn build(sample: &MarkedSample) -> BallGraph {
        BallGraph::from_parts(sample.d, sample.centers.clone(), sample.radii.clone())
    }

    pub fn from_parts(d: usize, centers: Vec<f64>, radii: Vec<f64>) -> BallGraph {
        let m = radii.len();
        let mut g = BallGraph { d, centers, radii, label: Vec::new(), components: 0 };
        let mut uf = UnionFind::new(m);
        g.for_each_edge(|i, j| {
            uf.union(i, j);
        });
        let mut canon = HashMap::new();
        g.label = (0..m)
            .map(|i| {
                let root = uf.find(i);
                let next = canon.len() as u32;
                *canon.entry(root).or_insert(next)
            })
            .collect();
        g.components = canon.len();
        g
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.d..(i + 1) * self.d]
    }

    pub fn component(&self, i: usize) -> usize {
        self.label[i] as usize
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Calls `f(i, j)` once per intersecting pair with i < j.
    ///
    /// Balls up to four times the median radius are hashed by center into
    /// cells of twice the largest such radius, so two of them can only meet
    /// in the same or adjacent cells. Larger balls, rare under heavy-tailed
    /// laws, search every cell their reach covers.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize)) {
        let m = self.len();
        if m < 2 {
            return;
        }
        let mut sorted = self.radii.clone();
        sorted.sort_by(f64::total_cmp);
        let limit = 4.0 * sorted[m / 2];
        let small_max = sorted.iter().copied().filter(|&r| r <= limit).fold(0.0, f64::max);
        let cell = if small_max > 0.0 { 2.0 * small_max } else { 1.0 };
        let cell_of = |i: usize| -> Vec<i64> { self.center(i).iter().map(|c| (c / cell).floor() as i64).collect() };
        let mut buckets: HashMap<u64, Vec<u32>> = HashMap::with_capacity(m);
        let cells: Vec<Vec<i64>> = (0..m).map(cell_of).collect();
        for (i, c) in cells.iter().enumerate() {
            buckets.entry(cell_key(c)).or_default().push(i as u32);
        }
        let meets = |i: usize, j: usize| distance(self.center(i), self.center(j)) <= self.radii[i] + self.radii[j];
        let is_big = |i: usize| self.radii[i] > limit;
        let mut probe = vec![0i64; self.d];
        let mut seen: Vec<u64> = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            let span = if is_big(i) { ((self.radii[i] + small_max) / cell).ceil() as i64 } else { 1 };
            let side = (2 * span + 1) as usize;
            let count = side.checked_pow(self.d as u32).unwrap_or(usize::MAX);
            // Small-small pairs are reported from the smaller index, mixed
            // pairs from the large ball. Large-large pairs are checked last.
            let wanted = |j: usize| -> bool {
                if j == i {
                    return false;
                }
                match (is_big(i), is_big(j)) {
                    (false, false) => j > i,
                    (false, true) => false,
                    (true, false) => true,
                    (true, true) => false,
                }
            };
            let mut emit = |j: usize| {
                if wanted(j) && meets(i, j) {
                    f(i.min(j), i.max(j));
                }
            };
            if is_big(i) && count >= m {
                (0..m).for_each(&mut emit);
                continue;
            }
            seen.clear();
            for o in 0..count {
                let mut code = o;
                for a in 0..self.d {
                    probe[a] = c[a] + (code % side) as i64 - span;
                    code /= side;
                }
                let key = cell_key(&probe);
                // Distinct cells may share a hash key; visit each bucket once.
                if seen.contains(&key) {
                    continue;
                }
                seen.push(key);
                if let Some(list) = buckets.get(&key) {
                    for &j in list {
                        emit(j as usize);
                    }
                }
            }
        }
        let big: Vec<usize> = (0..m).filter(|&i| is_big(i)).collect();
        for (a, &i) in big.iter().enumerate() {
            for &j in &big[a + 1..] {
                if meets(i, j) {
                    f(i, j);
                }
            }
        }
    }

    /// Sorted list of intersecting pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.for_each_edge(|i, j| out.push((i, j)));
        out.sort_unstable();
        out
    }

    /// Component labels of the balls meeting `region`, sorted and deduplicated.
    pub fn components_meeting(&self, region: &Region) -> Vec<usize> {
        let mut out: Vec<usize> =
            (0..self.len()).filter(|&i| region.meets_ball(self.center(i), self.radii[i])).map(|i| self.label[i] as usize).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// a <-> b through the occupied set, with the convention that
    /// intersecting regions are connected.
    pub fn connects(&self, a: &Region, b: &Region) -> bool {
        if a.meets(b) {
            return true;
        }
        let ca = self.components_meeting(a);
        if ca.is_empty() {
            return false;
        }
        let cb = self.components_meeting(b);
        ca.iter().any(|c| cb.binary_search(c).is_ok())
    }

    /// Per component, the interval of distances to the origin covered by
    /// its balls. A connected union of balls has an interval as norm image.
    pub fn radial_extents(&self) -> Vec<(f64, f64)> {
        let mut ext = vec![(f64::INFINITY, f64::NEG_INFINITY); self.components];
        for i in 0..self.len() {
            let t = crate::ppp::norm(self.center(i));
            let e = &mut ext[self.label[i] as usize];
            e.0 = e.0.min((t - self.radii[i]).max(0.0));
            e.1 = e.1.max(t + self.radii[i]);
        }
        ext
    }
}

/// Quadratic-time intersecting pairs, the oracle for the hashed graph.
pub fn brute_force_edges(sample: &MarkedSample) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..sample.len() {
        for j in i + 1..sample.len() {
            if distance(sample.center(i), sample.center(j)) <= sample.radii[i] + sample.radii[j] {
                out.push((i, j));
            }
        }
    }
    out
}
