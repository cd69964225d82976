//! Running an algorithm against a configuration.

use super::algorithm::{QueryAlgorithm, StopRule};
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Event, LatticeGraph, Monotonicity};

/// Largest number of free relevant indices settled by brute force.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub revealed: Vec<usize>,
    pub bits: Vec<bool>,
    pub value: bool,
}

/// Revealed part of a configuration.
pub struct Partial {
    pub known: Configuration,
    pub values: Configuration,
}

impl Partial {
    pub fn new(m: usize) -> Partial {
        Partial { known: Configuration::closed(m), values: Configuration::closed(m) }
    }

    pub fn reveal(&mut self, e: usize, open: bool) {
        self.known.set(e, true);
        self.values.set(e, open);
    }

    /// Unrevealed indices set to `fill`.
    pub fn completion(&self, fill: bool) -> Configuration {
        let mut c = self.values.clone();
        if fill {
            for e in 0..c.len() {
                if !self.known.get(e) {
                    c.set(e, true);
                }
            }
        }
        c
    }
}

/// Value of `f` if every completion of the revealed bits agrees.
pub fn determined(g: &LatticeGraph, f: &dyn Event, part: &Partial) -> Result<Option<bool>> {
    let (low, high) = (part.completion(false), part.completion(true));
    match f.monotonicity() {
        Monotonicity::Increasing => {
            if f.holds(g, &low) {
                return Ok(Some(true));
            }
            if !f.holds(g, &high) {
                return Ok(Some(false));
            }
            Ok(None)
        }
        Monotonicity::Decreasing => {
            if f.holds(g, &high) {
                return Ok(Some(true));
            }
            if !f.holds(g, &low) {
                return Ok(Some(false));
            }
            Ok(None)
        }
        Monotonicity::Unknown => {
            let relevant = f.support().unwrap_or_else(|| (0..low.len()).collect());
            let free: Vec<usize> = relevant.into_iter().filter(|&e| !part.known.get(e)).collect();
            if free.len() > EXHAUSTIVE_LIMIT {
                return Err(Error::Budget(format!("{} free indices for a non-monotone event", free.len())));
            }
            let first = f.holds(g, &low);
            let mut cfg = low.clone();
            for mask in 1u64..(1u64 << free.len()) {
                for (j, &e) in free.iter().enumerate() {
                    cfg.set(e, mask >> j & 1 == 1);
                }
                if f.holds(g, &cfg) != first {
                    return Ok(None);
                }
            }
            Ok(Some(first))
        }
    }
}

/// Runs `alg` on `cfg` with its own stop rule.
pub fn run_algorithm(
    alg: &dyn QueryAlgorithm,
    g: &LatticeGraph,
    f: &dyn Event,
    cfg: &Configuration,
) -> Result<RunTrace> {
    run_with(alg, g, f, cfg, alg.stop_rule())
}

pub fn run_with(
    alg: &dyn QueryAlgorithm,
    g: &LatticeGraph,
    f: &dyn Event,
    cfg: &Configuration,
    stop: StopRule,
) -> Result<RunTrace> {
    let m = cfg.len();
    let mut run = alg.start();
    let mut part = Partial::new(m);
    let mut trace = RunTrace { revealed: Vec::new(), bits: Vec::new(), value: false };
    loop {
        if stop == StopRule::Determined {
            if let Some(v) = determined(g, f, &part)? {
                trace.value = v;
                return Ok(trace);
            }
        }
        let Some(i) = run.next_index() else { break };
        if i >= m {
            return Err(Error::Algorithm(format!("{} queried index {i} outside 0..{m}", alg.name())));
        }
        if part.known.get(i) {
            return Err(Error::Algorithm(format!("{} queried index {i} twice", alg.name())));
        }
        let bit = cfg.get(i);
        part.reveal(i, bit);
        trace.revealed.push(i);
        trace.bits.push(bit);
        run.observe(i, bit);
    }
    match determined(g, f, &part)? {
        Some(v) => {
            trace.value = v;
            Ok(trace)
        }
        None => Err(Error::Algorithm(format!("{} stopped before the function was determined", alg.name()))),
    }
}
