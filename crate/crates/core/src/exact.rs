//! Exhaustive enumeration over {0,1}^E for small graphs.
//!
//! Every quantity is reduced to integer counts grouped by the number of open
//! edges, then weighted by p^k (1-p)^(m-k). The same counts feed the float
//! path and the rational path.

use crate::error::{invalid, Error, Result};
use crate::lattice::{Configuration, Event, LatticeGraph};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// Largest edge count accepted for enumeration.
pub const ENUMERATION_CAP: usize = 24;

/// Residual tolerance of the float identities.
pub const RUSSO_TOLERANCE: f64 = 1e-10;

pub struct ExactEngine<'g> {
    g: &'g LatticeGraph,
    m: usize,
}

/// Indicator of an event over all 2^m configurations, bit e of the index
/// being edge e.
pub struct Table {
    pub m: usize,
    pub bits: Vec<bool>,
}

impl Table {
    /// Number of configurations in the event, by number of open edges.
    pub fn class_counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.m + 1];
        for (mask, &b) in self.bits.iter().enumerate() {
            if b {
                c[(mask as u64).count_ones() as usize] += 1;
            }
        }
        c
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("p = {p} outside [0, 1]"));
    }
    Ok(())
}

fn check_open_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("p = {p} must lie in (0, 1)"));
    }
    Ok(())
}

/// p^k (1-p)^(m-k) for k = 0..=m.
pub fn class_weights(m: usize, p: f64) -> Vec<f64> {
    (0..=m).map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)).collect()
}

fn dot(counts: &[u64], w: &[f64]) -> f64 {
    counts.iter().zip(w).map(|(c, w)| *c as f64 * w).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactReport {
    pub probability: f64,
    pub derivative: f64,
    /// Absent for events that are not increasing.
    pub pivotal_sum: Option<f64>,
    pub covariance_sum: f64,
    pub pivotal_residual: Option<f64>,
    pub covariance_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FkgDirection {
    /// Both events move the same way: P[A and B] >= P[A] P[B].
    Positive,
    /// One increasing, one decreasing: the inequality reverses.
    Reversed,
}

#[derive(Clone, Debug, Serialize)]
pub struct FkgReport {
    pub slack: f64,
    pub direction: FkgDirection,
    pub pass: bool,
}

pub const FKG_TOLERANCE: f64 = 1e-12;

impl<'g> ExactEngine<'g> {
    pub fn new(g: &'g LatticeGraph) -> Result<ExactEngine<'g>> {
        let m = g.edge_count();
        if m > ENUMERATION_CAP {
            return Err(Error::CapExceeded { edges: m, cap: ENUMERATION_CAP });
        }
        Ok(ExactEngine { g, m })
    }

    pub fn edges(&self) -> usize {
        self.m
    }

    pub fn graph(&self) -> &LatticeGraph {
        self.g
    }

    pub fn configuration(&self, mask: u64) -> Configuration {
        Configuration::from_mask(self.m, mask)
    }

    pub fn table(&self, ev: &dyn Event) -> Table {
        let bits = (0..1u64 << self.m).map(|mask| ev.holds(self.g, &self.configuration(mask))).collect();
        Table { m: self.m, bits }
    }

    pub fn probability(&self, ev: &dyn Event, p: f64) -> Result<f64> {
        check_p(p)?;
        Ok(dot(&self.table(ev).class_counts(), &class_weights(self.m, p)))
    }

    /// No single 0 -> 1 flip ever leaves the event.
    pub fn is_increasing(&self, ev: &dyn Event) -> bool {
        table_is_increasing(&self.table(ev))
    }

    pub fn is_decreasing(&self, ev: &dyn Event) -> bool {
        let t = self.table(ev);
        let flipped = Table { m: t.m, bits: t.bits.iter().map(|b| !b).collect() };
        table_is_increasing(&flipped)
    }

    /// Derivative of the enumeration polynomial, term by term.
    pub fn derivative(&self, ev: &dyn Event, p: f64) -> Result<f64> {
        check_open_p(p)?;
        Ok(derivative_from_counts(&self.table(ev).class_counts(), p))
    }

    /// Sum over edges of the probability that flipping the edge changes the
    /// event. Only defined here for increasing events.
    pub fn pivotal_sum(&self, ev: &dyn Event, p: f64) -> Result<f64> {
        check_p(p)?;
        let t = self.table(ev);
        if !table_is_increasing(&t) {
            return invalid("pivotal sum requires an increasing event");
        }
        Ok(dot(&pivotal_counts(&t), &class_weights(self.m, p)))
    }

    /// (1/(p(1-p))) * sum_e Cov(w_e, 1_A), computed edge by edge.
    pub fn covariance_sum(&self, ev: &dyn Event, p: f64) -> Result<f64> {
        check_open_p(p)?;
        let t = self.table(ev);
        let w = class_weights(self.m, p);
        let prob = dot(&t.class_counts(), &w);
        let total: f64 = edge_open_counts(&t)
            .iter()
            .map(|counts| dot(counts, &w) - p * prob)
            .sum();
        Ok(total / (p * (1.0 - p)))
    }

    pub fn verify_russo(&self, ev: &dyn Event, p: f64) -> Result<ExactReport> {
        check_open_p(p)?;
        let t = self.table(ev);
        let w = class_weights(self.m, p);
        let counts = t.class_counts();
        let probability = dot(&counts, &w);
        let derivative = derivative_from_counts(&counts, p);
        let covariance_sum = edge_open_counts(&t)
            .iter()
            .map(|c| dot(c, &w) - p * probability)
            .sum::<f64>()
            / (p * (1.0 - p));
        let pivotal_sum = table_is_increasing(&t).then(|| dot(&pivotal_counts(&t), &w));
        let pivotal_residual = pivotal_sum.map(|s| (s - derivative).abs());
        let covariance_residual = (covariance_sum - derivative).abs();
        let pass = covariance_residual <= RUSSO_TOLERANCE
            && pivotal_residual.is_none_or(|r| r <= RUSSO_TOLERANCE);
        Ok(ExactReport {
            probability,
            derivative,
            pivotal_sum,
            covariance_sum,
            pivotal_residual,
            covariance_residual,
            pass,
        })
    }

    /// P[A and B] - P[A] P[B] for monotone events. The expected sign depends
    /// on whether the two events move in the same direction.
    pub fn verify_fkg(&self, a: &dyn Event, b: &dyn Event, p: f64) -> Result<FkgReport> {
        check_p(p)?;
        let (ta, tb) = (self.table(a), self.table(b));
        let dir = |t: &Table| {
            if table_is_increasing(t) {
                Some(true)
            } else if table_is_increasing(&Table { m: t.m, bits: t.bits.iter().map(|b| !b).collect() }) {
                Some(false)
            } else {
                None
            }
        };
        let (Some(da), Some(db)) = (dir(&ta), dir(&tb)) else {
            return invalid("FKG check requires monotone events");
        };
        let w = class_weights(self.m, p);
        let both = Table { m: self.m, bits: ta.bits.iter().zip(&tb.bits).map(|(x, y)| *x && *y).collect() };
        let slack = dot(&both.class_counts(), &w) - dot(&ta.class_counts(), &w) * dot(&tb.class_counts(), &w);
        let direction = if da == db { FkgDirection::Positive } else { FkgDirection::Reversed };
        let pass = match direction {
            FkgDirection::Positive => slack >= -FKG_TOLERANCE,
            FkgDirection::Reversed => slack <= FKG_TOLERANCE,
        };
        Ok(FkgReport { slack, direction, pass })
    }

    /// Exact identities at a rational parameter.
    pub fn rational(&self, ev: &dyn Event, p: &BigRational) -> Result<RationalReport> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if *p <= zero || *p >= one {
            return invalid("rational mode needs 0 < p < 1");
        }
        let t = self.table(ev);
        let q = &one - p;
        let w: Vec<BigRational> = (0..=self.m)
            .map(|k| pow(p, k) * pow(&q, self.m - k))
            .collect();
        let rdot = |counts: &[u64]| -> BigRational {
            counts.iter().zip(&w).map(|(c, w)| BigRational::from_integer((*c).into()) * w).sum()
        };
        let counts = t.class_counts();
        let probability = rdot(&counts);
        let mut derivative = zero.clone();
        for (k, c) in counts.iter().enumerate() {
            let kk = BigRational::from_integer(k.into());
            let rest = BigRational::from_integer((self.m - k).into());
            let term = &kk / p - &rest / &q;
            derivative += BigRational::from_integer((*c).into()) * &w[k] * term;
        }
        let mut cov = zero.clone();
        for c in edge_open_counts(&t) {
            cov += rdot(&c) - p * &probability;
        }
        let covariance_sum = cov / (p * &q);
        let pivotal_sum = table_is_increasing(&t).then(|| rdot(&pivotal_counts(&t)));
        Ok(RationalReport { probability, derivative, pivotal_sum, covariance_sum })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalReport {
    pub probability: BigRational,
    pub derivative: BigRational,
    pub pivotal_sum: Option<BigRational>,
    pub covariance_sum: BigRational,
}

fn pow(x: &BigRational, k: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..k {
        out *= x;
    }
    out
}

pub fn table_is_increasing(t: &Table) -> bool {
    (0..t.bits.len()).all(|mask| {
        !t.bits[mask] || (0..t.m).all(|e| t.bits[mask | 1 << e])
    })
}

fn derivative_from_counts(counts: &[u64], p: f64) -> f64 {
    let m = counts.len() - 1;
    counts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let w = p.powi(k as i32) * (1.0 - p).powi((m - k) as i32);
            *c as f64 * w * (k as f64 / p - (m - k) as f64 / (1.0 - p))
        })
        .sum()
}

/// Over all edges, configurations where flipping the edge changes the
/// indicator, grouped by open count of the configuration itself.
fn pivotal_counts(t: &Table) -> Vec<u64> {
    let mut c = vec![0u64; t.m + 1];
    for mask in 0..t.bits.len() {
        let k = (mask as u64).count_ones() as usize;
        for e in 0..t.m {
            if t.bits[mask] != t.bits[mask ^ 1 << e] {
                c[k] += 1;
            }
        }
    }
    c
}

/// For each edge, configurations in the event with that edge open.
fn edge_open_counts(t: &Table) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; t.m + 1]; t.m];
    for (mask, &b) in t.bits.iter().enumerate() {
        if !b {
            continue;
        }
        let k = (mask as u64).count_ones() as usize;
        for (e, row) in c.iter_mut().enumerate() {
            if mask >> e & 1 == 1 {
                row[k] += 1;
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::event::*;
    use crate::rng;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn line(m: usize) -> LatticeGraph {
        LatticeGraph::rectangle(&[0], &[m as i64], 1000).unwrap()
    }

    fn theta1() -> (LatticeGraph, OriginToSphere) {
        (LatticeGraph::new(2, 1).unwrap(), OriginToSphere { k: 1 })
    }

    #[test]
    fn cap_is_enforced() {
        let g = LatticeGraph::new(2, 3).unwrap();
        assert!(matches!(ExactEngine::new(&g), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn probabilities() {
        let g = line(2);
        let ex = ExactEngine::new(&g).unwrap();
        assert!((ex.probability(&EdgeOpen(0), 0.3).unwrap() - 0.3).abs() < 1e-15);
        let either = Cylinders(vec![vec![0], vec![1]]);
        assert!((ex.probability(&either, 0.5).unwrap() - 0.75).abs() < 1e-15);
        let (g, ev) = theta1();
        let ex = ExactEngine::new(&g).unwrap();
        assert!((ex.probability(&ev, 0.5).unwrap() - 15.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn half_gives_counting_measure() {
        let (g, ev) = theta1();
        let ex = ExactEngine::new(&g).unwrap();
        let t = ex.table(&ev);
        let count = t.bits.iter().filter(|b| **b).count() as f64;
        assert_eq!(ex.probability(&ev, 0.5).unwrap(), count / 4096.0);
    }

    #[test]
    fn monotonicity_checks() {
        let (g, ev) = theta1();
        let ex = ExactEngine::new(&g).unwrap();
        assert!(ex.is_increasing(&EdgeOpen(3)));
        assert!(!ex.is_increasing(&EdgeClosed(3)));
        assert!(ex.is_decreasing(&EdgeClosed(3)));
        assert!(ex.is_increasing(&ev));
        assert!(!ex.is_increasing(&Parity(vec![0, 1])));
    }

    #[test]
    fn derivative_examples() {
        let g = line(2);
        let ex = ExactEngine::new(&g).unwrap();
        assert!((ex.derivative(&EdgeOpen(1), 0.3).unwrap() - 1.0).abs() < 1e-12);
        let either = Cylinders(vec![vec![0], vec![1]]);
        assert!((ex.derivative(&either, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((ex.pivotal_sum(&either, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((ex.covariance_sum(&either, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((ex.pivotal_sum(&EdgeOpen(0), 0.7).unwrap() - 1.0).abs() < 1e-12);
        assert!((ex.covariance_sum(&EdgeOpen(0), 0.3).unwrap() - 1.0).abs() < 1e-12);
        assert!(ex.pivotal_sum(&EdgeClosed(0), 0.5).is_err());
        assert!(ex.derivative(&EdgeOpen(0), 0.0).is_err());
    }

    #[test]
    fn theta_one_closed_forms() {
        let (g, ev) = theta1();
        let ex = ExactEngine::new(&g).unwrap();
        for p in [0.2, 0.5, 0.8] {
            let r = ex.verify_russo(&ev, p).unwrap();
            let exact = 4.0 * (1.0f64 - p).powi(3);
            assert!((r.derivative - exact).abs() < 1e-12);
            assert!(r.pivotal_residual.unwrap() < 1e-12);
            assert!(r.covariance_residual < 1e-12);
            assert!(r.pass);
        }
        let not = Complement(Arc::new(OriginToSphere { k: 1 }));
        let c = ex.covariance_sum(&not, 0.5).unwrap();
        assert!((c + 0.5).abs() < 1e-12);
        let r = ex.verify_russo(&not, 0.5).unwrap();
        assert!(r.pivotal_sum.is_none() && r.pass);
    }

    #[test]
    fn covariance_identity_for_non_monotone_events() {
        let g = line(6);
        let ex = ExactEngine::new(&g).unwrap();
        for p in [0.1, 0.37, 0.9] {
            let r = ex.verify_russo(&Parity(vec![0, 2, 5]), p).unwrap();
            assert!(r.covariance_residual < 1e-10);
        }
    }

    #[test]
    fn fkg_examples() {
        let g = line(2);
        let ex = ExactEngine::new(&g).unwrap();
        let r = ex.verify_fkg(&EdgeOpen(0), &EdgeOpen(0), 0.5).unwrap();
        assert!((r.slack - 0.25).abs() < 1e-15);
        let either = Cylinders(vec![vec![0], vec![1]]);
        let r = ex.verify_fkg(&EdgeOpen(0), &either, 0.5).unwrap();
        assert!((r.slack - 0.125).abs() < 1e-15);
        let r = ex.verify_fkg(&EdgeClosed(0), &either, 0.5).unwrap();
        assert_eq!(r.direction, FkgDirection::Reversed);
        assert!(r.pass && r.slack < 0.0);
        assert!(ex.verify_fkg(&Parity(vec![0, 1]), &either, 0.5).is_err());
        let (g, ev) = theta1();
        let ex = ExactEngine::new(&g).unwrap();
        let o = g.origin().unwrap();
        let right = g.index_of(&[1, 0]).unwrap();
        let r = ex.verify_fkg(&ev, &Connected { x: o, y: right }, 0.5).unwrap();
        assert!(r.pass && r.slack >= 0.0);
    }

    #[test]
    fn rational_identities_are_exact() {
        let (g, ev) = theta1();
        let ex = ExactEngine::new(&g).unwrap();
        let p = BigRational::new(BigInt::from(3), BigInt::from(7));
        let r = ex.rational(&ev, &p).unwrap();
        assert_eq!(r.pivotal_sum.as_ref(), Some(&r.derivative));
        assert_eq!(r.covariance_sum, r.derivative);
        let q = BigRational::new(BigInt::from(4), BigInt::from(7));
        let expected = BigRational::from_integer(BigInt::from(4)) * &q * &q * &q;
        assert_eq!(r.derivative, expected);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn russo_holds_for_random_increasing_events(seed in any::<u64>(), m in 1usize..=12, pi in 1usize..=9) {
            let g = line(m);
            let ex = ExactEngine::new(&g).unwrap();
            let ev = Cylinders::random(m, 4, 3, &mut rng::stream(seed, rng::tag::EVENTS, 0));
            let r = ex.verify_russo(&ev, pi as f64 / 10.0).unwrap();
            prop_assert!(r.pass);
        }

        #[test]
        fn fkg_holds_for_random_pairs(seed in any::<u64>(), m in 1usize..=10, p in 0.0f64..=1.0) {
            let g = line(m);
            let ex = ExactEngine::new(&g).unwrap();
            let mut r = rng::stream(seed, rng::tag::EVENTS, 1);
            let a = Cylinders::random(m, 3, 3, &mut r);
            let b = Cylinders::random(m, 3, 3, &mut r);
            prop_assert!(ex.verify_fkg(&a, &b, p).unwrap().pass);
            let nb = Complement(Arc::new(b));
            prop_assert!(ex.verify_fkg(&a, &nb, p).unwrap().pass);
        }
    }
}
