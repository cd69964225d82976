//! Events: predicates over configurations of a fixed graph.

use super::{Configuration, Explorer, LatticeGraph};
use rand::Rng;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unknown,
}

pub trait Event: Send + Sync {
    fn holds(&self, g: &LatticeGraph, cfg: &Configuration) -> bool;

    /// Edges the predicate may read. `None` means any edge.
    fn support(&self) -> Option<Vec<usize>> {
        None
    }

    /// Declared monotonicity. Used as a hint; exact code verifies it.
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Unknown
    }

    fn describe(&self) -> String;
}

pub type SharedEvent = Arc<dyn Event>;

pub struct EdgeOpen(pub usize);

impl Event for EdgeOpen {
    fn holds(&self, _: &LatticeGraph, cfg: &Configuration) -> bool {
        cfg.get(self.0)
    }
    fn support(&self) -> Option<Vec<usize>> {
        Some(vec![self.0])
    }
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Increasing
    }
    fn describe(&self) -> String {
        format!("edge {} open", self.0)
    }
}

pub struct EdgeClosed(pub usize);

impl Event for EdgeClosed {
    fn holds(&self, _: &LatticeGraph, cfg: &Configuration) -> bool {
        !cfg.get(self.0)
    }
    fn support(&self) -> Option<Vec<usize>> {
        Some(vec![self.0])
    }
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Decreasing
    }
    fn describe(&self) -> String {
        format!("edge {} closed", self.0)
    }
}

pub struct Constant(pub bool);

impl Event for Constant {
    fn holds(&self, _: &LatticeGraph, _: &Configuration) -> bool {
        self.0
    }
    fn support(&self) -> Option<Vec<usize>> {
        Some(Vec::new())
    }
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Increasing
    }
    fn describe(&self) -> String {
        format!("constant {}", self.0)
    }
}

/// Two vertices joined by an open path.
pub struct Connected {
    pub x: usize,
    pub y: usize,
}

impl Event for Connected {
    fn holds(&self, g: &LatticeGraph, cfg: &Configuration) -> bool {
        self.x == self.y
            || Explorer::new().search(g, self.x, |e| cfg.get(e), |_| true, |v| v == self.y)
    }
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Increasing
    }
    fn describe(&self) -> String {
        format!("{} <-> {}", self.x, self.y)
    }
}

/// The origin joined to the vertices at sup-norm `k` by an open path inside
/// the box of radius `k`.
pub struct OriginToSphere {
    pub k: usize,
}

impl OriginToSphere {
    pub fn reaches(&self, g: &LatticeGraph, open: impl Fn(usize) -> bool, ex: &mut Explorer) -> bool {
        let Some(o) = g.origin() else { return false };
        if self.k == 0 {
            return true;
        }
        let k = self.k;
        ex.search(g, o, open, |v| g.sup_norm(v) <= k, |v| g.sup_norm(v) == k)
    }
}

impl Event for OriginToSphere {
    fn holds(&self, g: &LatticeGraph, cfg: &Configuration) -> bool {
        self.reaches(g, |e| cfg.get(e), &mut Explorer::new())
    }
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Increasing
    }
    fn describe(&self) -> String {
        format!("0 <-> sphere {}", self.k)
    }
}

/// Open crossing between the two faces orthogonal to `axis`.
pub struct Crossing {
    pub axis: usize,
}

impl Event for Crossing {
    fn holds(&self, g: &LatticeGraph, cfg: &Configuration) -> bool {
        let mut uf = super::open_clusters(g, cfg);
        let left: std::collections::HashSet<usize> =
            g.face(self.axis, false).into_iter().map(|v| uf.find(v)).collect();
        g.face(self.axis, true).into_iter().any(|v| left.contains(&uf.find(v)))
    }
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Increasing
    }
    fn describe(&self) -> String {
        format!("crossing along axis {}", self.axis)
    }
}

/// Union of cylinders "every edge of S open". Increasing by construction.
#[derive(Clone, Debug)]
pub struct Cylinders(pub Vec<Vec<usize>>);

impl Cylinders {
    /// Random union of `count` cylinders over `m` edges, each with 1 to
    /// `max_size` distinct edges.
    pub fn random<R: Rng + ?Sized>(m: usize, count: usize, max_size: usize, rng: &mut R) -> Cylinders {
        let sets = (0..count)
            .map(|_| {
                let size = rng.random_range(1..=max_size.min(m).max(1));
                let mut s: Vec<usize> = rand::seq::index::sample(rng, m, size).into_vec();
                s.sort_unstable();
                s
            })
            .collect();
        Cylinders(sets)
    }
}

impl Event for Cylinders {
    fn holds(&self, _: &LatticeGraph, cfg: &Configuration) -> bool {
        self.0.iter().any(|s| s.iter().all(|&e| cfg.get(e)))
    }
    fn support(&self) -> Option<Vec<usize>> {
        let mut s: Vec<usize> = self.0.iter().flatten().copied().collect();
        s.sort_unstable();
        s.dedup();
        Some(s)
    }
    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::Increasing
    }
    fn describe(&self) -> String {
        format!("union of {} cylinders", self.0.len())
    }
}

/// Odd number of open edges among the listed ones.
pub struct Parity(pub Vec<usize>);

impl Event for Parity {
    fn holds(&self, _: &LatticeGraph, cfg: &Configuration) -> bool {
        self.0.iter().filter(|&&e| cfg.get(e)).count() % 2 == 1
    }
    fn support(&self) -> Option<Vec<usize>> {
        Some(self.0.clone())
    }
    fn describe(&self) -> String {
        format!("parity of {:?}", self.0)
    }
}

pub struct Complement(pub SharedEvent);

impl Event for Complement {
    fn holds(&self, g: &LatticeGraph, cfg: &Configuration) -> bool {
        !self.0.holds(g, cfg)
    }
    fn support(&self) -> Option<Vec<usize>> {
        self.0.support()
    }
    fn monotonicity(&self) -> Monotonicity {
        match self.0.monotonicity() {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
            Monotonicity::Unknown => Monotonicity::Unknown,
        }
    }
    fn describe(&self) -> String {
        format!("not ({})", self.0.describe())
    }
}

type Predicate = dyn Fn(&LatticeGraph, &Configuration) -> bool + Send + Sync;

/// Arbitrary predicate with a declared monotonicity.
pub struct FnEvent {
    pub name: String,
    pub monotonicity: Monotonicity,
    pub predicate: Box<Predicate>,
}

impl FnEvent {
    pub fn new(
        name: impl Into<String>,
        monotonicity: Monotonicity,
        predicate: impl Fn(&LatticeGraph, &Configuration) -> bool + Send + Sync + 'static,
    ) -> FnEvent {
        FnEvent { name: name.into(), monotonicity, predicate: Box::new(predicate) }
    }
}

impl Event for FnEvent {
    fn holds(&self, g: &LatticeGraph, cfg: &Configuration) -> bool {
        (self.predicate)(g, cfg)
    }
    fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn origin_to_sphere_matches_boundary_connection() {
        let g = LatticeGraph::new(2, 3).unwrap();
        let ev = OriginToSphere { k: 3 };
        for i in 0..500 {
            let cfg = Configuration::sample(g.edge_count(), 0.5, &mut rng::stream(1, rng::tag::EVENTS, i));
            assert_eq!(ev.holds(&g, &cfg), super::super::connected_to_boundary(&cfg, &g));
        }
    }

    #[test]
    fn inner_sphere_ignores_outer_detours() {
        // Path from the origin leaving the radius-1 box is not a witness for k=1
        // unless it first touches the radius-1 sphere, which it always does.
        let g = LatticeGraph::new(2, 2).unwrap();
        let ev = OriginToSphere { k: 1 };
        for i in 0..500 {
            let cfg = Configuration::sample(g.edge_count(), 0.5, &mut rng::stream(2, rng::tag::EVENTS, i));
            let o = g.origin().unwrap();
            let via_any = g.incident(o).iter().any(|&e| cfg.get(e as usize));
            assert_eq!(ev.holds(&g, &cfg), via_any);
        }
    }

    #[test]
    fn declared_support_is_respected() {
        let g = LatticeGraph::new(2, 1).unwrap();
        let mut r = rng::stream(4, rng::tag::EVENTS, 0);
        for _ in 0..20 {
            let ev = Cylinders::random(12, 3, 3, &mut r);
            let support = ev.support().unwrap();
            for mask in 0..(1u64 << 12) {
                let cfg = Configuration::from_mask(12, mask);
                for e in (0..12).filter(|e| !support.contains(e)) {
                    assert_eq!(ev.holds(&g, &cfg), ev.holds(&g, &cfg.with(e, !cfg.get(e))));
                }
            }
        }
    }

    #[test]
    fn crossing_on_rectangle() {
        let g = LatticeGraph::rectangle(&[0, 0], &[2, 1], 100).unwrap();
        let ev = Crossing { axis: 0 };
        assert!(!ev.holds(&g, &Configuration::closed(g.edge_count())));
        assert!(ev.holds(&g, &Configuration::open(g.edge_count())));
    }

    #[test]
    fn complement_flips_monotonicity() {
        let c = Complement(Arc::new(EdgeOpen(0)));
        assert_eq!(c.monotonicity(), Monotonicity::Decreasing);
        let g = LatticeGraph::new(1, 1).unwrap();
        assert!(c.holds(&g, &Configuration::closed(2)));
    }
}
