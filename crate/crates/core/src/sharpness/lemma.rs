use super::fits::{fit_exponential_decay, fit_linear_growth};
use super::sums::CurvePoint;
use crate::error::{invalid, Error, Result};
use crate::stats::Verdict;
use serde::Serialize;

/// A sequence f_0 = 1, f_1, f_2, ... of increasing differentiable functions
/// on [0, b], fed to the inequality lemma.
pub trait LemmaFamily: Sync {
    fn name(&self) -> String;
    fn value(&self, n: usize, p: f64) -> f64;
    /// Left derivative in p.
    fn derivative(&self, n: usize, p: f64) -> f64;
    /// Constant in f_n' >= c (n / Sigma_n) f_n.
    fn constant(&self) -> f64;
    /// Range on which the data are generated.
    fn domain(&self) -> (f64, f64);
    /// Range on which the family claims the inequality.
    fn hypothesis_domain(&self) -> (f64, f64) {
        self.domain()
    }
    /// Transition point built into the family, if any.
    fn transition(&self) -> Option<f64>;
}

/// f_n = exp(-n a(p)) h(p) with h(p) = h0 + (p - t) and a rate profile that
/// is linear with slope -kappa below t - w, quadratic on [t - w, t] and zero
/// above t. The profile is C^1, so the family is differentiable in p.
/// The inequality holds when kappa >= 2c and w <= 0.3 h / c.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateProfileFamily {
    pub transition: f64,
    pub width: f64,
    pub kappa: f64,
    pub h0: f64,
    pub c: f64,
    pub upper: f64,
}

impl RateProfileFamily {
    pub fn new(transition: f64, c: f64) -> RateProfileFamily {
        RateProfileFamily { transition, width: 0.1, kappa: 2.0 * c, h0: 0.5, c, upper: transition + 0.5 }
    }

    pub fn rate(&self, p: f64) -> f64 {
        let (t, w, k) = (self.transition, self.width, self.kappa);
        if p < t - w {
            k * (t - p - 0.5 * w)
        } else if p < t {
            k * (t - p).powi(2) / (2.0 * w)
        } else {
            0.0
        }
    }

    fn rate_slope(&self, p: f64) -> f64 {
        let (t, w, k) = (self.transition, self.width, self.kappa);
        if p < t - w {
            -k
        } else if p < t {
            -k * (t - p) / w
        } else {
            0.0
        }
    }

    fn h(&self, p: f64) -> f64 {
        self.h0 + (p - self.transition)
    }
}

impl LemmaFamily for RateProfileFamily {
    fn name(&self) -> String {
        format!("rate-profile(t={},w={},kappa={},c={})", self.transition, self.width, self.kappa, self.c)
    }
    fn value(&self, n: usize, p: f64) -> f64 {
        if n == 0 {
            1.0
        } else {
            (-(n as f64) * self.rate(p)).exp() * self.h(p)
        }
    }
    fn derivative(&self, n: usize, p: f64) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.value(n, p) * (-(n as f64) * self.rate_slope(p) + 1.0 / self.h(p))
        }
    }
    fn constant(&self) -> f64 {
        self.c
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, self.upper)
    }
    fn transition(&self) -> Option<f64> {
        Some(self.transition)
    }
}

/// f_n = min(1, exp(n (p - 1/2))). The inequality holds only up to 1/2,
/// where the family stops increasing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentialFamily {
    pub c: f64,
}

impl LemmaFamily for ExponentialFamily {
    fn name(&self) -> String {
        format!("min(1,exp(n(p-1/2)),c={})", self.c)
    }
    fn value(&self, n: usize, p: f64) -> f64 {
        (n as f64 * (p - 0.5)).exp().min(1.0)
    }
    fn derivative(&self, n: usize, p: f64) -> f64 {
        if p <= 0.5 {
            n as f64 * self.value(n, p)
        } else {
            0.0
        }
    }
    fn constant(&self) -> f64 {
        self.c
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn hypothesis_domain(&self) -> (f64, f64) {
        (0.0, 0.5)
    }
    fn transition(&self) -> Option<f64> {
        Some(0.5)
    }
}

/// f_n = 1 for every n: partial sums grow linearly everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantFamily {
    pub c: f64,
}

impl LemmaFamily for ConstantFamily {
    fn name(&self) -> String {
        format!("constant(c={})", self.c)
    }
    fn value(&self, _: usize, _: f64) -> f64 {
        1.0
    }
    fn derivative(&self, _: usize, _: f64) -> f64 {
        0.0
    }
    fn constant(&self) -> f64 {
        self.c
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn transition(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Local growth exponent of Sigma_N below this marks "bounded sums".
const LOW_EXPONENT: f64 = 0.25;
/// Local growth exponent above this marks "linear sums".
const HIGH_EXPONENT: f64 = 0.98;

/// Bracket of the point where log Sigma_n / log n reaches 1, read off the
/// local exponent log2(Sigma_N / Sigma_{N/2}) at the largest N.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transition {
    pub lo: f64,
    pub hi: f64,
    pub grid: Vec<f64>,
    pub exponents: Vec<f64>,
    /// No grid point lies in the bounded-sum region.
    pub empty_decay_region: bool,
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=k).map(|i| lo + i as f64 * step).collect()
}

/// lo is the last grid point below which every exponent is under 0.25,
/// hi the first from which every exponent is above 0.98.
pub fn locate_transition(family: &dyn LemmaFamily, step: f64, horizon: usize) -> Result<Transition> {
    if !(step > 0.0) || horizon < 4 {
        return invalid("transition search needs a positive step and a horizon of at least 4");
    }
    let (a, b) = family.domain();
    let grid = grid(a, b, step);
    let half = horizon / 2;
    let exponents: Vec<f64> = grid
        .iter()
        .map(|&p| {
            let (mut sum, mut at_half) = (0.0, 0.0);
            for n in 0..horizon {
                if n == half {
                    at_half = sum;
                }
                sum += family.value(n, p);
            }
            (sum / at_half).log2()
        })
        .collect();
    let low = exponents.iter().take_while(|&&e| e < LOW_EXPONENT).count();
    let high = exponents.iter().rev().take_while(|&&e| e > HIGH_EXPONENT).count();
    let lo = if low == 0 { a } else { grid[low - 1] };
    let hi = if high == 0 { b } else { grid[grid.len() - high] };
    Ok(Transition { lo, hi, grid, exponents, empty_decay_region: low == 0 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub family: String,
    pub transition: Transition,
    pub known_transition: Option<f64>,
    pub bracketed: Option<bool>,
    /// Smallest ratio f_n' / (c (n / Sigma_n) f_n) seen on the hypothesis grid.
    pub hypothesis_ratio: f64,
    /// Parameters below the bracket, each with a positive fitted decay rate.
    pub decay_checked: usize,
    pub decay_verdict: Verdict,
    /// Envelope constant fitted to f_N above the bracket.
    pub growth_c: Option<f64>,
    pub growth_verdict: Verdict,
    pub verdict: Verdict,
}

/// Checks the hypothesis f_n' >= c (n / Sigma_n) f_n on a grid over the
/// hypothesis domain for n < horizon, then verifies both conclusions:
/// exponential decay of f_n below the transition bracket and
/// f_N(p) >= c (p - hi) above it. A violated hypothesis is an error.
pub fn validate_lemma_family(family: &dyn LemmaFamily, step: f64, horizon: usize) -> Result<LemmaReport> {
    let c = family.constant();
    let (ha, hb) = family.hypothesis_domain();
    let mut worst = f64::INFINITY;
    for &p in &grid(ha, hb, step) {
        let mut sum = 0.0;
        for n in 0..horizon {
            let f = family.value(n, p);
            if n > 0 && f > 0.0 && sum > 0.0 {
                let need = c * n as f64 / sum * f;
                let ratio = family.derivative(n, p) / need;
                worst = worst.min(ratio);
                if ratio < 1.0 - 1e-9 {
                    return Err(Error::Hypothesis(format!(
                        "{}: f_{n}'({p}) = {} is below c (n / Sigma_n) f_n = {need}",
                        family.name(),
                        family.derivative(n, p)
                    )));
                }
            }
            sum += f;
        }
    }
    let transition = locate_transition(family, step, horizon)?;
    let ladder: Vec<usize> = (0..6).map(|k| horizon >> k).filter(|&n| n >= 1).rev().collect();
    let mut decay_checked = 0;
    let mut decay_verdict = Verdict::Pass;
    for &p in transition.grid.iter().filter(|&&p| p < transition.lo - 1e-12) {
        let pts: Vec<CurvePoint> = ladder
            .iter()
            .map(|&n| CurvePoint { param: p, scale: n as f64, estimate: family.value(n, p), stderr: 0.0 })
            .collect();
        let fit = fit_exponential_decay(&pts, u64::MAX)?;
        decay_checked += 1;
        if !(fit.rate > 0.0) {
            decay_verdict = Verdict::Fail;
        }
    }
    let above: Vec<CurvePoint> = transition
        .grid
        .iter()
        .filter(|&&p| p > transition.hi + 1e-12)
        .map(|&p| CurvePoint { param: p, scale: horizon as f64, estimate: family.value(horizon, p), stderr: 0.0 })
        .collect();
    let (growth_c, growth_verdict) = if above.len() >= 3 {
        let fit = fit_linear_growth(&above, transition.hi)?;
        (Some(fit.c), Verdict::exact(fit.c >= c * (1.0 - 1e-9)))
    } else {
        (None, Verdict::Inconclusive)
    };
    let known = family.transition();
    let bracketed = known.map(|t| transition.lo <= t + 1e-12 && t <= transition.hi + 1e-12);
    let verdict = Verdict::combine([decay_verdict, growth_verdict, Verdict::exact(bracketed != Some(false))]);
    Ok(LemmaReport {
        family: family.name(),
        transition,
        known_transition: known,
        bracketed,
        hypothesis_ratio: worst,
        decay_checked,
        decay_verdict,
        growth_c,
        growth_verdict,
        verdict,
    })
}
