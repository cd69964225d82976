//! Query algorithms over edge indices.

use crate::lattice::LatticeGraph;
use std::collections::BTreeSet;

/// When a run ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Stop as soon as the target function is determined by the revealed bits.
    Determined,
    /// Stop only when the rule itself has nothing left to query.
    RuleExhausted,
}

/// A decision rule: given the history, the next index to query or STOP.
pub trait QueryAlgorithm: Send + Sync {
    fn name(&self) -> String;

    /// Fresh run state.
    fn start(&self) -> Box<dyn QueryRun + '_>;

    fn stop_rule(&self) -> StopRule {
        StopRule::Determined
    }
}

pub trait QueryRun {
    /// Next index, or `None` for STOP.
    fn next_index(&mut self) -> Option<usize>;

    /// Records the revealed bit of the index returned by `next_index`.
    fn observe(&mut self, index: usize, open: bool);
}

/// Queries a fixed list of indices in order.
pub struct FixedOrder {
    pub label: String,
    pub order: Vec<usize>,
    pub stop: StopRule,
}

struct FixedRun<'a> {
    order: &'a [usize],
    at: usize,
}

impl QueryRun for FixedRun<'_> {
    fn next_index(&mut self) -> Option<usize> {
        self.order.get(self.at).copied()
    }
    fn observe(&mut self, _: usize, _: bool) {
        self.at += 1;
    }
}

impl QueryAlgorithm for FixedOrder {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn start(&self) -> Box<dyn QueryRun + '_> {
        Box::new(FixedRun { order: &self.order, at: 0 })
    }
    fn stop_rule(&self) -> StopRule {
        self.stop
    }
}

/// Indices 0, 1, ..., m-1.
pub fn sequential(m: usize) -> FixedOrder {
    FixedOrder { label: "sequential".into(), order: (0..m).collect(), stop: StopRule::Determined }
}

/// Indices m-1, ..., 0.
pub fn reverse(m: usize) -> FixedOrder {
    FixedOrder { label: "reverse".into(), order: (0..m).rev().collect(), stop: StopRule::Determined }
}

/// `first`, then the others in increasing order.
pub fn dictator_first(m: usize, first: usize) -> FixedOrder {
    let order = std::iter::once(first).chain((0..m).filter(|&i| i != first)).collect();
    FixedOrder { label: format!("dictator-first({first})"), order, stop: StopRule::Determined }
}

/// Every index, regardless of determination.
pub fn reveal_all(m: usize) -> FixedOrder {
    FixedOrder { label: "reveal-all".into(), order: (0..m).collect(), stop: StopRule::RuleExhausted }
}

/// Exploration of the open cluster of the sphere of radius k.
///
/// The explored vertex set starts as the vertices at sup-norm `k`. At each
/// step the smallest unrevealed edge touching the set is queried; an open
/// edge adds its endpoints to the set.
pub struct SphereExploration<'g> {
    g: &'g LatticeGraph,
    k: usize,
    seeds: Vec<usize>,
    stop: StopRule,
}

impl<'g> SphereExploration<'g> {
    pub fn new(g: &'g LatticeGraph, k: usize) -> crate::Result<SphereExploration<'g>> {
        let n = g.radius().ok_or_else(|| crate::Error::InvalidParameter("sphere exploration needs a symmetric box".into()))?;
        if k > n {
            return Err(crate::Error::InvalidParameter(format!("seed radius {k} outside 0..={n}")));
        }
        Ok(SphereExploration { g, k, seeds: g.sphere(k), stop: StopRule::Determined })
    }

    /// Same rule, but runs until the frontier is empty.
    pub fn exhaustive(mut self) -> Self {
        self.stop = StopRule::RuleExhausted;
        self
    }

    pub fn radius(&self) -> usize {
        self.k
    }
}

struct SphereRun<'g> {
    g: &'g LatticeGraph,
    in_set: Vec<bool>,
    revealed: Vec<bool>,
    frontier: BTreeSet<u32>,
}

impl SphereRun<'_> {
    fn add_vertex(&mut self, v: usize) {
        if self.in_set[v] {
            return;
        }
        self.in_set[v] = true;
        for &e in self.g.incident(v) {
            if !self.revealed[e as usize] {
                self.frontier.insert(e);
            }
        }
    }
}

impl QueryRun for SphereRun<'_> {
    fn next_index(&mut self) -> Option<usize> {
        self.frontier.first().map(|e| *e as usize)
    }

    fn observe(&mut self, index: usize, open: bool) {
        self.revealed[index] = true;
        self.frontier.remove(&(index as u32));
        if open {
            let (a, b) = self.g.endpoints(index);
            self.add_vertex(a);
            self.add_vertex(b);
        }
    }
}

impl QueryAlgorithm for SphereExploration<'_> {
    fn name(&self) -> String {
        format!("T_{}", self.k)
    }

    fn start(&self) -> Box<dyn QueryRun + '_> {
        let mut run = SphereRun {
            g: self.g,
            in_set: vec![false; self.g.vertex_count()],
            revealed: vec![false; self.g.edge_count()],
            frontier: BTreeSet::new(),
        };
        for &v in &self.seeds {
            run.add_vertex(v);
        }
        Box::new(run)
    }

    fn stop_rule(&self) -> StopRule {
        self.stop
    }
}
