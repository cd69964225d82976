//! The revealment-sum bound for the sphere explorations and the
//! differential inequality it yields.

use super::algorithm::SphereExploration;
use super::exact::revealment_exact;
use super::mc::revealment_mc;
use crate::bernoulli::theta_curve;
use crate::error::{invalid, Result};
use crate::exact::ExactEngine;
use crate::lattice::event::{FnEvent, OriginToSphere};
use crate::lattice::{Explorer, LatticeGraph, Monotonicity};
use crate::rng;
use crate::stats::{Estimate, Verdict};
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub enum Mode {
    Exact,
    MonteCarlo { replicas: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeBound {
    pub edge: usize,
    /// sum over k = 1..=n of delta_e(T_k).
    pub sum: Estimate,
    pub ratio: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct RevealmentBound {
    pub d: usize,
    pub n: usize,
    pub p: f64,
    /// sum_{k=0}^{n-1} theta_k.
    pub partial_sum: Estimate,
    /// delta_e(T_k), indexed [k-1][e].
    pub revealments: Vec<Vec<Estimate>>,
    pub edges: Vec<EdgeBound>,
    pub max_ratio: f64,
    pub verdict: Verdict,
}

/// Exact tolerance on the ratio to 4 * Sigma_n.
pub const RATIO_TOLERANCE: f64 = 1e-12;

/// For every edge, sum_k delta_e(T_k) against 4 * Sigma_n.
pub fn revealment_sum_bound_check(d: usize, n: usize, p: f64, mode: Mode) -> Result<RevealmentBound> {
    if n == 0 {
        return invalid("need n >= 1");
    }
    let g = LatticeGraph::new(d, n)?;
    let f = OriginToSphere { k: n };
    let (revealments, thetas): (Vec<Vec<Estimate>>, Vec<Estimate>) = match mode {
        Mode::Exact => {
            let ex = ExactEngine::new(&g)?;
            let mut rev = Vec::new();
            for k in 1..=n {
                let alg = SphereExploration::new(&g, k)?;
                rev.push(revealment_exact(&ex, &alg, &f, p)?.into_iter().map(Estimate::exact).collect());
            }
            let th = (0..n)
                .map(|k| ex.probability(&OriginToSphere { k }, p).map(Estimate::exact))
                .collect::<Result<Vec<_>>>()?;
            (rev, th)
        }
        Mode::MonteCarlo { replicas, seed } => {
            let mut rev = Vec::new();
            for k in 1..=n {
                let alg = SphereExploration::new(&g, k)?;
                rev.push(revealment_mc(&g, &alg, &f, p, replicas, rng::derive(seed, k as u64))?);
            }
            let scales: Vec<usize> = (0..n).collect();
            let curve = theta_curve(d, &scales, &[p], replicas, seed, true)?;
            let th = curve
                .rows
                .iter()
                .map(|r| Estimate { value: r.estimate, stderr: r.stderr, replicas, seed })
                .collect();
            (rev, th)
        }
    };
    let partial_sum = Estimate {
        value: thetas.iter().map(|t| t.value).sum(),
        stderr: thetas.iter().map(|t| t.stderr).sum(),
        replicas: thetas[0].replicas,
        seed: thetas[0].seed,
    };
    let bound = 4.0 * partial_sum.value;
    let exact = matches!(mode, Mode::Exact);
    let edges: Vec<EdgeBound> = (0..g.edge_count())
        .map(|e| {
            let value: f64 = revealments.iter().map(|r| r[e].value).sum();
            let stderr: f64 = revealments.iter().map(|r| r[e].stderr).sum();
            let ratio = value / bound;
            let verdict = if exact {
                Verdict::exact(ratio <= 1.0 + RATIO_TOLERANCE)
            } else {
                Verdict::one_sided(bound - value, stderr + 4.0 * partial_sum.stderr)
            };
            EdgeBound {
                edge: e,
                sum: Estimate { value, stderr, replicas: partial_sum.replicas, seed: partial_sum.seed },
                ratio,
                verdict,
            }
        })
        .collect();
    let max_ratio = edges.iter().map(|e| e.ratio).fold(0.0, f64::max);
    let verdict = Verdict::combine(edges.iter().map(|e| e.verdict));
    Ok(RevealmentBound { d, n, p, partial_sum, revealments, edges, max_ratio, verdict })
}

/// Exact check of delta_e(T_k) <= P[v <-> sphere k] + P[w <-> sphere k]
/// for every edge {v, w} and every k = 1..=n.
pub fn locality_check_exact(g: &LatticeGraph, p: f64) -> Result<Vec<(usize, usize, f64, f64)>> {
    let n = g.radius().ok_or_else(|| crate::Error::InvalidParameter("symmetric box required".into()))?;
    let ex = ExactEngine::new(g)?;
    let f = OriginToSphere { k: n };
    let mut out = Vec::new();
    for k in 1..=n {
        let alg = SphereExploration::new(g, k)?;
        let delta = revealment_exact(&ex, &alg, &f, p)?;
        let reach: Vec<f64> = (0..g.vertex_count())
            .map(|v| {
                let ev = FnEvent::new("v <-> sphere", Monotonicity::Increasing, move |g, cfg| {
                    Explorer::new().search(g, v, |e| cfg.get(e), |_| true, |w| g.sup_norm(w) == k)
                });
                ex.probability(&ev, p)
            })
            .collect::<Result<_>>()?;
        for (e, de) in delta.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            out.push((k, e, *de, reach[a] + reach[b]));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferentialCheck {
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub theta: Estimate,
    pub partial_sum: Estimate,
    pub derivative: Estimate,
    /// n theta_n (1 - theta_n).
    pub lhs: Estimate,
    /// 2 Sigma_n theta_n'.
    pub rhs: Estimate,
    /// 8 p (1 - p) Sigma_n theta_n'.
    pub chain: Estimate,
    pub verdict_rhs: Verdict,
    pub verdict_chain: Verdict,
    pub verdict: Verdict,
}

fn assemble(d: usize, n: usize, p: f64, theta: Estimate, partial_sum: Estimate, derivative: Estimate) -> DifferentialCheck {
    let nf = n as f64;
    let t = theta.value;
    let lhs = Estimate { value: nf * t * (1.0 - t), stderr: nf * (1.0 - 2.0 * t).abs() * theta.stderr, ..theta };
    let prod = partial_sum.value * derivative.value;
    let prod_sd = partial_sum.value * derivative.stderr + derivative.value.abs() * partial_sum.stderr;
    let rhs = Estimate { value: 2.0 * prod, stderr: 2.0 * prod_sd, ..theta };
    let k = 8.0 * p * (1.0 - p);
    let chain = Estimate { value: k * prod, stderr: k * prod_sd, ..theta };
    let verdict_rhs = Verdict::one_sided(rhs.value - lhs.value, rhs.stderr + lhs.stderr);
    let verdict_chain = Verdict::one_sided(chain.value - lhs.value, chain.stderr + lhs.stderr);
    DifferentialCheck {
        d,
        n,
        p,
        theta,
        partial_sum,
        derivative,
        lhs,
        rhs,
        chain,
        verdict_rhs,
        verdict_chain,
        verdict: verdict_rhs.worst(verdict_chain),
    }
}

/// n theta_n (1 - theta_n) <= 8p(1-p) Sigma_n theta_n' <= 2 Sigma_n theta_n',
/// with theta_n' a centered difference of step `h` on coupled samples.
pub fn osss_differential_check(d: usize, n: usize, p: f64, h: f64, replicas: u64, seed: u64) -> Result<DifferentialCheck> {
    if n == 0 {
        return invalid("need n >= 1");
    }
    if !(h > 0.0 && p - h >= 0.0 && p + h <= 1.0) {
        return invalid(format!("p = {p} with step {h} leaves [0, 1]"));
    }
    let scales: Vec<usize> = (0..=n).collect();
    let curve = theta_curve(d, &scales, &[p - h, p, p + h], replicas, seed, true)?;
    let at = |k: usize, q: f64| curve.get(k, q).expect("curve cell").clone();
    let theta = {
        let r = at(n, p);
        Estimate { value: r.estimate, stderr: r.stderr, replicas, seed }
    };
    let partial_sum = Estimate {
        value: (0..n).map(|k| at(k, p).estimate).sum(),
        stderr: (0..n).map(|k| at(k, p).stderr).sum(),
        replicas,
        seed,
    };
    // Coupled indicators are nested, so their difference is itself Bernoulli.
    let q = at(n, p + h).estimate - at(n, p - h).estimate;
    let derivative = Estimate {
        value: q / (2.0 * h),
        stderr: (q * (1.0 - q) / replicas as f64).sqrt() / (2.0 * h),
        replicas,
        seed,
    };
    Ok(assemble(d, n, p, theta, partial_sum, derivative))
}

/// Same chain with every term computed by enumeration on the box of radius n.
pub fn osss_differential_check_exact(d: usize, n: usize, p: f64) -> Result<DifferentialCheck> {
    let g = LatticeGraph::new(d, n)?;
    let ex = ExactEngine::new(&g)?;
    let theta = Estimate::exact(ex.probability(&OriginToSphere { k: n }, p)?);
    let partial_sum = Estimate::exact(
        (0..n).map(|k| ex.probability(&OriginToSphere { k }, p)).sum::<Result<f64>>()?,
    );
    let derivative = Estimate::exact(ex.derivative(&OriginToSphere { k: n }, p)?);
    Ok(assemble(d, n, p, theta, partial_sum, derivative))
}
