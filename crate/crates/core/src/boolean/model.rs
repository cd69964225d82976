//! Poisson-Boolean model parameters, truncation and basic estimators.

use super::graph::BallGraph;
use crate::error::{invalid, Error, Result};
use crate::ppp::{sample_marked, unit_ball_volume, MarkedSample, RadiusLaw, Window};
use crate::rng::{chunked, stream, tag};
use crate::stats::{Estimate, Moments, Verdict};
use rand::Rng;
use serde::Serialize;

/// Default expected number of ignored relevant balls per replica.
pub const DEFAULT_TRUNC_EPS: f64 = 1e-3;

/// Model in R^d: centers PPP(lambda), radii iid from `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BooleanModel {
    pub d: usize,
    pub lambda: f64,
    pub nu: RadiusLaw,
}

impl BooleanModel {
    pub fn new(d: usize, lambda: f64, nu: RadiusLaw) -> Result<BooleanModel> {
        if d == 0 {
            return invalid("dimension must be at least 1");
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return invalid(format!("intensity must be finite and non-negative, got {lambda}"));
        }
        nu.validate()?;
        Ok(BooleanModel { d, lambda, nu })
    }

    pub fn with_lambda(&self, lambda: f64) -> BooleanModel {
        BooleanModel { lambda, ..*self }
    }

    /// Refuses laws without a finite d-th moment, where the occupied set
    /// covers everything.
    pub fn require_nontrivial(&self) -> Result<f64> {
        self.nu.moment(self.d as f64).ok_or_else(|| {
            Error::InfiniteMoment(format!(
                "radius law {} has infinite {}-th moment; the occupied set is all of R^{} almost surely",
                self.nu, self.d, self.d
            ))
        })
    }

    /// Balls with centers in B(0, reach).
    pub fn sample_ball<R: Rng + ?Sized>(&self, reach: f64, rng: &mut R) -> Result<MarkedSample> {
        sample_marked(self.lambda, self.nu, &Window::centered_ball(self.d, reach), rng)
    }
}

/// Analytic finiteness of the k-th radius moment.
pub fn moment_check(nu: &RadiusLaw, k: f64) -> bool {
    nu.has_moment(k)
}

/// Padding rule: choose R_pad so that the expected number of balls that
/// reach B(0, r) from outside B(0, r + R_pad) is at most `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationPolicy {
    pub eps: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { eps: DEFAULT_TRUNC_EPS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Padding {
    pub padding: f64,
    /// Expected number of missed balls meeting B(0, r).
    pub error: f64,
}

/// Expected number of balls with center outside B(0, r + pad) that meet B(0, r).
pub fn missed_balls(model: &BooleanModel, r: f64, pad: f64) -> Option<f64> {
    let d = model.d;
    let tail = model.nu.shifted_tail_moment(r, d, pad)?;
    let base = (r + pad).powi(d as i32) * model.nu.tail(pad);
    Some((model.lambda * unit_ball_volume(d) * (tail - base)).max(0.0))
}

impl TruncationPolicy {
    pub fn padding(&self, model: &BooleanModel, r: f64) -> Result<Padding> {
        if !(self.eps > 0.0) {
            return invalid("truncation target must be positive");
        }
        model.require_nontrivial()?;
        if let Some(m) = model.nu.max_radius() {
            return Ok(Padding { padding: m, error: 0.0 });
        }
        let err = |pad: f64| missed_balls(model, r, pad).expect("finite d-th moment checked");
        let mut lo = model.nu.min_radius();
        if err(lo) <= self.eps {
            return Ok(Padding { padding: lo, error: err(lo) });
        }
        let mut hi = 2.0 * lo.max(1.0);
        while err(hi) > self.eps {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Algorithm("padding bisection did not bracket the target".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if err(mid) > self.eps {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-9 * hi {
                break;
            }
        }
        Ok(Padding { padding: hi, error: err(hi) })
    }
}

/// One output row of the boolean CSV.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct BooleanRow {
    pub model: String,
    pub d: usize,
    pub lambda: f64,
    pub nu: String,
    pub r: f64,
    pub stat: String,
    pub estimate: f64,
    pub stderr: f64,
    pub trunc_err: f64,
    pub replicas: u64,
    pub seed: u64,
}

impl BooleanRow {
    pub fn new(model: &BooleanModel, r: f64, stat: &str, est: &Estimate, trunc_err: f64) -> BooleanRow {
        BooleanRow {
            model: "boolean".into(),
            d: model.d,
            lambda: model.lambda,
            nu: model.nu.to_string(),
            r,
            stat: stat.into(),
            estimate: est.value,
            stderr: est.stderr,
            trunc_err,
            replicas: est.replicas,
            seed: est.seed,
        }
    }
}

/// Estimate with its truncation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BooleanEstimate {
    pub estimate: Estimate,
    pub padding: f64,
    pub trunc_err: f64,
}

/// True iff a ball of `g` covering the origin reaches distance r.
pub(crate) fn origin_reaches(g: &BallGraph, r: f64) -> bool {
    g.radial_extents().iter().any(|&(a, b)| a == 0.0 && b >= r)
}

/// True iff one component meets both S_r and S_{2r}.
pub(crate) fn annulus_crossed(g: &BallGraph, r: f64) -> bool {
    g.radial_extents().iter().any(|&(a, b)| a <= r && b >= 2.0 * r)
}

fn frequency<F>(model: &BooleanModel, reach: f64, replicas: u64, seed: u64, purpose: u64, hit: F) -> Result<Estimate>
where
    F: Fn(&MarkedSample) -> bool + Sync + Send,
{
    if replicas == 0 {
        return invalid("replicas must be at least 1");
    }
    let hits: u64 = chunked(replicas, |s, e| {
        (s..e)
            .filter(|&i| {
                let sample = model.sample_ball(reach, &mut stream(seed, purpose, i)).expect("validated model");
                hit(&sample)
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(Estimate::proportion(hits, replicas, seed))
}

/// theta_r = P[0 <-> S_r], sampling balls centered in B(0, r + R_pad).
pub fn estimate_theta_r(
    model: &BooleanModel,
    r: f64,
    replicas: u64,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<BooleanEstimate> {
    if !(r >= 0.0) {
        return invalid("radius must be non-negative");
    }
    let pad = trunc.padding(model, r)?;
    let estimate = frequency(model, r + pad.padding, replicas, seed, tag::BOOLEAN, |s| {
        r == 0.0 || origin_reaches(&BallGraph::build(s), r)
    })?;
    Ok(BooleanEstimate { estimate, padding: pad.padding, trunc_err: pad.error })
}

/// P[S_r <-> S_{2r}], sampling balls centered in B(0, 2r + R_pad).
pub fn estimate_annulus(
    model: &BooleanModel,
    r: f64,
    replicas: u64,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<BooleanEstimate> {
    if !(r > 0.0) {
        return invalid("annulus radius must be positive");
    }
    let pad = trunc.padding(model, 2.0 * r)?;
    let estimate = frequency(model, 2.0 * r + pad.padding, replicas, seed, tag::BOOLEAN, |s| {
        annulus_crossed(&BallGraph::build(s), r)
    })?;
    Ok(BooleanEstimate { estimate, padding: pad.padding, trunc_err: pad.error })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VacancyReport {
    pub closed_form: f64,
    pub mc: Estimate,
    pub trunc_err: f64,
    pub verdict: Verdict,
}

/// P[0 not covered] = exp(-lambda v_d E[rho^d]), plus its Monte Carlo frequency.
pub fn vacancy_probability(model: &BooleanModel, replicas: u64, trunc: &TruncationPolicy, seed: u64) -> Result<VacancyReport> {
    let m_d = model.require_nontrivial()?;
    let closed_form = (-model.lambda * unit_ball_volume(model.d) * m_d).exp();
    let pad = trunc.padding(model, 0.0)?;
    let origin = vec![0.0; model.d];
    let mc = frequency(model, pad.padding, replicas, seed, tag::VACANCY, |s| {
        (0..s.len()).all(|i| crate::ppp::distance(s.center(i), &origin) > s.radii[i])
    })?;
    // Binomial standard error under the closed form, widened by the truncation bound.
    let se = (closed_form * (1.0 - closed_form) / replicas as f64).sqrt();
    let verdict = Verdict::exact((mc.value - closed_form).abs() <= crate::stats::BAND * se + pad.error);
    Ok(VacancyReport { closed_form, mc, trunc_err: pad.error, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationCheck {
    pub padding: f64,
    pub theta_single: f64,
    pub theta_double: f64,
    pub difference: f64,
    pub stderr: f64,
    pub allowance: f64,
    pub verdict: Verdict,
}

/// theta_r with padding R_pad against 2 R_pad on the same samples: the
/// smaller window keeps the balls whose centers lie in B(0, r + R_pad).
pub fn truncation_check(
    model: &BooleanModel,
    r: f64,
    replicas: u64,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<TruncationCheck> {
    if replicas == 0 {
        return invalid("replicas must be at least 1");
    }
    let pad = trunc.padding(model, r)?;
    let inner = r + pad.padding;
    let outer = r + 2.0 * pad.padding;
    let parts = chunked(replicas, |s, e| {
        let mut acc = (Moments::default(), 0u64, 0u64);
        for i in s..e {
            let big = model.sample_ball(outer, &mut stream(seed, tag::BOOLEAN, i)).expect("validated model");
            let small = big.filter(|j| crate::ppp::norm(big.center(j)) <= inner);
            let a = origin_reaches(&BallGraph::build(&small), r);
            let b = origin_reaches(&BallGraph::build(&big), r);
            acc.0.push(a as u8 as f64 - b as u8 as f64);
            acc.1 += a as u64;
            acc.2 += b as u64;
        }
        acc
    });
    let mut diff = Moments::default();
    let (mut ha, mut hb) = (0u64, 0u64);
    for p in &parts {
        diff.merge(&p.0);
        ha += p.1;
        hb += p.2;
    }
    let allowance = trunc.eps + crate::stats::BAND * diff.stderr();
    let difference = diff.mean();
    Ok(TruncationCheck {
        padding: pad.padding,
        theta_single: ha as f64 / replicas as f64,
        theta_double: hb as f64 / replicas as f64,
        difference,
        stderr: diff.stderr(),
        allowance,
        verdict: Verdict::exact(difference.abs() <= allowance),
    })
}
