//! Revealments, influences and OSSS slacks by full enumeration.

use super::algorithm::QueryAlgorithm;
use super::runner::{run_algorithm, Partial};
use super::OsssReport;
use crate::error::{Error, Result};
use crate::exact::{class_weights, table_is_increasing, ExactEngine};
use crate::lattice::Event;

fn weighted(counts: &[Vec<u64>], w: &[f64]) -> Vec<f64> {
    counts.iter().map(|c| c.iter().zip(w).map(|(a, b)| *a as f64 * b).sum()).collect()
}

/// delta_i = P[the algorithm reveals i].
pub fn revealment_exact(ex: &ExactEngine, alg: &dyn QueryAlgorithm, f: &dyn Event, p: f64) -> Result<Vec<f64>> {
    let m = ex.edges();
    let mut counts = vec![vec![0u64; m + 1]; m];
    for mask in 0..1u64 << m {
        let k = mask.count_ones() as usize;
        let trace = run_algorithm(alg, ex.graph(), f, &ex.configuration(mask))?;
        for i in trace.revealed {
            counts[i][k] += 1;
        }
    }
    Ok(weighted(&counts, &class_weights(m, p)))
}

/// Inf_i = P[f changes when coordinate i is resampled]. Enumerates the
/// configuration and the resampled bit.
pub fn influence_exact(ex: &ExactEngine, f: &dyn Event, p: f64) -> Vec<f64> {
    let m = ex.edges();
    let t = ex.table(f);
    let w = class_weights(m, p);
    (0..m)
        .map(|i| {
            let mut total = 0.0;
            for mask in 0..t.bits.len() {
                let base = w[(mask as u64).count_ones() as usize];
                for resampled in [false, true] {
                    let other = if resampled { mask | 1 << i } else { mask & !(1 << i) };
                    if t.bits[mask] != t.bits[other] {
                        total += base * if resampled { p } else { 1.0 - p };
                    }
                }
            }
            total
        })
        .collect()
}

/// P[flipping i changes f], the flip-based counterpart of the influence.
pub fn flip_influence_exact(ex: &ExactEngine, f: &dyn Event, p: f64) -> Vec<f64> {
    let m = ex.edges();
    let t = ex.table(f);
    let w = class_weights(m, p);
    (0..m)
        .map(|i| {
            (0..t.bits.len())
                .filter(|&mask| t.bits[mask] != t.bits[mask ^ 1 << i])
                .map(|mask| w[(mask as u64).count_ones() as usize])
                .sum()
        })
        .collect()
}

/// Cov(w_i, f) for each index.
pub fn covariance_exact(ex: &ExactEngine, f: &dyn Event, p: f64) -> Vec<f64> {
    let m = ex.edges();
    let t = ex.table(f);
    let w = class_weights(m, p);
    let prob: f64 = (0..t.bits.len()).filter(|&x| t.bits[x]).map(|x| w[(x as u64).count_ones() as usize]).sum();
    (0..m)
        .map(|i| {
            let joint: f64 = (0..t.bits.len())
                .filter(|&x| t.bits[x] && x >> i & 1 == 1)
                .map(|x| w[(x as u64).count_ones() as usize])
                .sum();
            joint - p * prob
        })
        .collect()
}

pub fn verify_osss_exact(ex: &ExactEngine, alg: &dyn QueryAlgorithm, f: &dyn Event, p: f64) -> Result<OsssReport> {
    let t = ex.table(f);
    let w = class_weights(ex.edges(), p);
    let prob: f64 = (0..t.bits.len()).filter(|&x| t.bits[x]).map(|x| w[(x as u64).count_ones() as usize]).sum();
    let revealment = revealment_exact(ex, alg, f, p)?;
    let influence = influence_exact(ex, f, p);
    let covariance = covariance_exact(ex, f, p);
    Ok(OsssReport::assemble(
        alg.name(),
        p,
        prob * (1.0 - prob),
        revealment,
        influence,
        covariance,
        table_is_increasing(&t),
    ))
}

/// Checks that every trace is determined: all completions of the revealed
/// bits give the same value of `f`.
pub fn check_determination(ex: &ExactEngine, alg: &dyn QueryAlgorithm, f: &dyn Event) -> Result<()> {
    let m = ex.edges();
    let t = ex.table(f);
    for mask in 0..1u64 << m {
        let cfg = ex.configuration(mask);
        let trace = run_algorithm(alg, ex.graph(), f, &cfg)?;
        if trace.value != t.bits[mask as usize] {
            return Err(Error::Algorithm(format!("{} returned the wrong value on {mask:#x}", alg.name())));
        }
        let mut part = Partial::new(m);
        for (&i, &b) in trace.revealed.iter().zip(&trace.bits) {
            part.reveal(i, b);
        }
        let fixed: u64 = trace.revealed.iter().map(|i| 1u64 << i).sum();
        let free = !fixed & ((1u64 << m) - 1);
        let base = mask & fixed;
        // Walk all submasks of the free set.
        let mut sub = free;
        loop {
            if t.bits[(base | sub) as usize] != trace.value {
                return Err(Error::Algorithm(format!("{} stopped early on {mask:#x}", alg.name())));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
    Ok(())
}
