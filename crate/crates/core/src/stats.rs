//! Estimates, three-valued verdicts and small statistical helpers.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::fmt;

/// Width of every stochastic acceptance band, in standard errors.
pub const BAND: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub seed: u64,
}

impl Estimate {
    /// Binomial proportion with stderr sqrt(q(1-q)/N).
    pub fn proportion(hits: u64, replicas: u64, seed: u64) -> Estimate {
        let n = replicas.max(1) as f64;
        let q = hits as f64 / n;
        Estimate { value: q, stderr: (q * (1.0 - q) / n).sqrt(), replicas, seed }
    }

    pub fn from_moments(m: &Moments, seed: u64) -> Estimate {
        Estimate { value: m.mean(), stderr: m.stderr(), replicas: m.n, seed }
    }

    pub fn exact(value: f64) -> Estimate {
        Estimate { value, stderr: 0.0, replicas: 1, seed: 0 }
    }

    pub fn scaled(self, factor: f64) -> Estimate {
        Estimate { value: self.value * factor, stderr: self.stderr * factor.abs(), ..self }
    }
}

/// Running sums for mean and variance. Merging is plain addition, so the
/// result only depends on the merge order, which callers keep fixed.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    /// One-sided check of `margin >= 0` where `margin` carries noise `sigma`.
    pub fn one_sided(margin: f64, sigma: f64) -> Verdict {
        if margin >= 0.0 {
            Verdict::Pass
        } else if margin >= -BAND * sigma {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }

    /// Two-sided agreement: |diff| within the band passes, anything else fails.
    pub fn agreement(diff: f64, sigma: f64) -> Verdict {
        if diff.abs() <= BAND * sigma {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Deterministic check with an absolute tolerance.
    pub fn exact(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn worst(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn combine<I: IntoIterator<Item = Verdict>>(it: I) -> Verdict {
        it.into_iter().fold(Verdict::Pass, Verdict::worst)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Fail => "FAIL",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Poisson probabilities P[N = k] for k in 0..len.
pub fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let mut term = (-mean).exp();
    out.push(term);
    for k in 1..len {
        term *= mean / k as f64;
        out.push(term);
    }
    out
}

/// Total variation distance between an empirical histogram and Poisson(mean).
/// Poisson mass beyond the histogram's support counts fully.
pub fn tv_to_poisson(hist: &[u64], mean: f64) -> f64 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 1.0;
    }
    let pmf = poisson_pmf(mean, hist.len());
    let mut dist = 0.0;
    for (h, q) in hist.iter().zip(&pmf) {
        dist += (*h as f64 / total as f64 - q).abs();
    }
    let covered: f64 = pmf.iter().sum();
    dist += (1.0 - covered).max(0.0);
    0.5 * dist
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of observed counts against expected counts. Adjacent
/// bins are pooled from the right until each pooled bin expects at least
/// `min_expected` observations.
pub fn chi_square(observed: &[u64], expected: &[f64], min_expected: f64) -> ChiSquare {
    assert_eq!(observed.len(), expected.len());
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (ob, ex) in observed.iter().zip(expected).rev() {
        o += *ob as f64;
        e += ex;
        if e >= min_expected {
            pooled.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => pooled.push((o, e)),
        }
    }
    let statistic: f64 = pooled
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = pooled.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(statistic)
    };
    ChiSquare { statistic, dof, p_value }
}

/// Chi-square of a count histogram against Poisson(mean), with the upper tail
/// folded into the last bin.
pub fn chi_square_poisson(hist: &[u64], mean: f64) -> ChiSquare {
    let total: u64 = hist.iter().sum();
    let mut expected: Vec<f64> =
        poisson_pmf(mean, hist.len()).iter().map(|q| q * total as f64).collect();
    if let Some(last) = expected.last_mut() {
        let covered: f64 = poisson_pmf(mean, hist.len()).iter().sum();
        *last += (1.0 - covered).max(0.0) * total as f64;
    }
    chi_square(hist, &expected, 5.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r2: f64,
}

/// Ordinary least squares of y on x.
pub fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let slope_stderr = if x.len() > 2 && sxx > 0.0 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit { slope, intercept, slope_stderr, r2 }
}
