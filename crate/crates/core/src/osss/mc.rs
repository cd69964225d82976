//! Monte Carlo revealments, influences and OSSS slacks.

use super::algorithm::QueryAlgorithm;
use super::runner::run_algorithm;
use crate::error::{invalid, Result};
use crate::lattice::{Configuration, Event, LatticeGraph, Monotonicity};
use crate::rng::{self, tag};
use crate::stats::{Estimate, Moments, Verdict};
use serde::Serialize;

fn sample(g: &LatticeGraph, p: f64, seed: u64, stream_tag: u64, i: u64) -> Configuration {
    Configuration::sample(g.edge_count(), p, &mut rng::stream(seed, stream_tag, i))
}

/// Fraction of replicas in which each index is revealed.
pub fn revealment_mc(
    g: &LatticeGraph,
    alg: &dyn QueryAlgorithm,
    f: &dyn Event,
    p: f64,
    replicas: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    if replicas == 0 {
        return invalid("replicas must be at least 1");
    }
    let m = g.edge_count();
    let parts = rng::chunked(replicas, |s, e| -> Result<Vec<u64>> {
        let mut hits = vec![0u64; m];
        for i in s..e {
            let trace = run_algorithm(alg, g, f, &sample(g, p, seed, tag::REVEAL, i))?;
            trace.revealed.iter().for_each(|&j| hits[j] += 1);
        }
        Ok(hits)
    });
    let mut hits = vec![0u64; m];
    for part in parts {
        hits.iter_mut().zip(part?).for_each(|(a, b)| *a += b);
    }
    Ok(hits.into_iter().map(|h| Estimate::proportion(h, replicas, seed)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct OsssMcReport {
    pub algorithm: String,
    pub p: f64,
    pub variance: Estimate,
    pub revealment: Vec<Estimate>,
    pub influence: Vec<Estimate>,
    pub covariance: Vec<Estimate>,
    pub slack_v1: Estimate,
    pub slack_v2: Option<Estimate>,
    pub verdict: Verdict,
}

#[derive(Clone)]
struct Acc {
    value: Moments,
    reveal: Vec<Moments>,
    inf: Vec<Moments>,
    cov: Vec<Moments>,
}

impl Acc {
    fn new(m: usize) -> Acc {
        Acc {
            value: Moments::default(),
            reveal: vec![Moments::default(); m],
            inf: vec![Moments::default(); m],
            cov: vec![Moments::default(); m],
        }
    }
    fn merge(&mut self, o: &Acc) {
        self.value.merge(&o.value);
        for (a, b) in [(&mut self.reveal, &o.reveal), (&mut self.inf, &o.inf), (&mut self.cov, &o.cov)] {
            a.iter_mut().zip(b).for_each(|(x, y)| x.merge(y));
        }
    }
}

/// OSSS slacks with every term estimated from the same replicas. The
/// influence of i uses the conditional expectation over the resampled bit,
/// so each replica contributes piv_i * P[resample differs].
pub fn verify_osss_mc(
    g: &LatticeGraph,
    alg: &dyn QueryAlgorithm,
    f: &dyn Event,
    p: f64,
    replicas: u64,
    seed: u64,
) -> Result<OsssMcReport> {
    if replicas < 2 {
        return invalid("need at least 2 replicas");
    }
    let m = g.edge_count();
    let parts = rng::chunked(replicas, |s, e| -> Result<Acc> {
        let mut acc = Acc::new(m);
        let mut revealed = vec![false; m];
        for i in s..e {
            let cfg = sample(g, p, seed, tag::OSSS, i);
            let trace = run_algorithm(alg, g, f, &cfg)?;
            let fv = trace.value;
            acc.value.push(fv as u8 as f64);
            revealed.iter_mut().for_each(|r| *r = false);
            trace.revealed.iter().for_each(|&j| revealed[j] = true);
            for j in 0..m {
                let bit = cfg.get(j);
                acc.reveal[j].push(revealed[j] as u8 as f64);
                let piv = f.holds(g, &cfg.with(j, !bit)) != fv;
                acc.inf[j].push(if piv { if bit { 1.0 - p } else { p } } else { 0.0 });
                acc.cov[j].push(if fv { bit as u8 as f64 - p } else { 0.0 });
            }
        }
        Ok(acc)
    });
    let mut acc = Acc::new(m);
    for part in parts {
        acc.merge(&part?);
    }
    let q = acc.value.mean();
    let variance = Estimate {
        value: q * (1.0 - q),
        stderr: (1.0 - 2.0 * q).abs() * acc.value.stderr(),
        replicas,
        seed,
    };
    let est = |v: &[Moments]| v.iter().map(|x| Estimate::from_moments(x, seed)).collect::<Vec<_>>();
    let (revealment, influence, covariance) = (est(&acc.reveal), est(&acc.inf), est(&acc.cov));
    let slack = |other: &[Estimate], factor: f64| {
        let mut value = -variance.value;
        let mut sd = variance.stderr;
        for (d, x) in revealment.iter().zip(other) {
            value += factor * d.value * x.value;
            sd += factor * (d.value * x.stderr + x.value.abs() * d.stderr);
        }
        Estimate { value, stderr: sd, replicas, seed }
    };
    let slack_v1 = slack(&influence, 1.0);
    let slack_v2 = (f.monotonicity() == Monotonicity::Increasing).then(|| slack(&covariance, 2.0));
    let mut verdict = Verdict::one_sided(slack_v1.value, slack_v1.stderr);
    if let Some(s) = slack_v2 {
        verdict = verdict.worst(Verdict::one_sided(s.value, s.stderr));
    }
    Ok(OsssMcReport {
        algorithm: alg.name(),
        p,
        variance,
        revealment,
        influence,
        covariance,
        slack_v1,
        slack_v2,
        verdict,
    })
}
