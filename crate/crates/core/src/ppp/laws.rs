//! Statistical checks of the Poisson laws.

use super::marks::RadiusLaw;
use super::window::{ball_volume, distance, Window};
use super::{sample_homogeneous, sample_marked, PointSample};
use crate::error::{invalid, Error, Result};
use crate::rng::{chunked, stream, tag};
use crate::stats::{chi_square_poisson, ChiSquare, Moments, Verdict};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Chi-square significance used for every goodness-of-fit verdict.
pub const CHI_LEVEL: f64 = 0.01;

/// One observed-vs-expected comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatCheck {
    pub check: String,
    pub observed: f64,
    pub expected: f64,
    pub stderr: f64,
    pub verdict: Verdict,
}

impl StatCheck {
    fn agreement(check: impl Into<String>, observed: f64, expected: f64, stderr: f64) -> StatCheck {
        StatCheck {
            check: check.into(),
            observed,
            expected,
            stderr,
            verdict: Verdict::agreement(observed - expected, stderr),
        }
    }

    /// Discrepancy in units of the standard error.
    pub fn z(&self) -> f64 {
        if self.stderr > 0.0 {
            (self.observed - self.expected) / self.stderr
        } else if self.observed == self.expected {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// One line of the check CSV.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub param: String,
    pub observed: f64,
    pub expected: f64,
    pub stderr: f64,
    pub verdict: String,
}

impl CheckRow {
    pub fn new(check: &str, param: impl Into<String>, observed: f64, expected: f64, stderr: f64, verdict: Verdict) -> CheckRow {
        CheckRow { check: check.into(), param: param.into(), observed, expected, stderr, verdict: verdict.as_str().into() }
    }

    pub fn from_stat(c: &StatCheck, param: impl Into<String>) -> CheckRow {
        CheckRow::new(&c.check, param, c.observed, c.expected, c.stderr, c.verdict)
    }
}

fn require_box(w: &Window, what: &str) -> Result<()> {
    match w {
        Window::Box { .. } if w.is_valid() => Ok(()),
        _ => Err(Error::Unsupported(format!("{what} must be a non-degenerate box"))),
    }
}

fn check_runs(runs: u64) -> Result<()> {
    if runs == 0 {
        return invalid("runs must be at least 1");
    }
    Ok(())
}

/// Per-run values of `f` on independent homogeneous samples.
fn per_run<T, F>(lambda: f64, window: &Window, runs: u64, seed: u64, purpose: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&PointSample) -> T + Sync + Send,
{
    sample_homogeneous(lambda, window, &mut stream(seed, purpose, 0))?;
    let chunks = chunked(runs, |s, e| {
        (s..e)
            .map(|i| {
                let pts = sample_homogeneous(lambda, window, &mut stream(seed, purpose, i)).expect("validated");
                f(&pts)
            })
            .collect::<Vec<T>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

fn histogram(counts: &[usize]) -> Vec<u64> {
    let top = counts.iter().copied().max().unwrap_or(0);
    let mut hist = vec![0u64; top + 1];
    for &c in counts {
        hist[c] += 1;
    }
    hist
}

/// Histogram of the number of points in `region` over independent runs.
pub fn count_histogram(lambda: f64, window: &Window, region: &Window, runs: u64, seed: u64) -> Result<Vec<u64>> {
    check_runs(runs)?;
    let counts = per_run(lambda, window, runs, seed, tag::PPP, |s| s.count_in(region))?;
    Ok(histogram(&counts))
}

/// Frequency of an empty box `region` against exp(-lambda |region|). The
/// band uses the binomial standard error under the null.
pub fn void_check(lambda: f64, window: &Window, region: &Window, runs: u64, seed: u64) -> Result<StatCheck> {
    check_runs(runs)?;
    require_box(region, "void region")?;
    let leb = region.box_overlap(window).ok_or_else(|| Error::Unsupported("window must be a box".into()))?;
    let hist = count_histogram(lambda, window, region, runs, seed)?;
    let freq = hist[0] as f64 / runs as f64;
    let q = (-lambda * leb).exp();
    let se = (q * (1.0 - q) / runs as f64).sqrt();
    Ok(StatCheck::agreement(format!("void lambda={lambda} leb={leb}"), freq, q, se))
}

/// Sample correlation of the counts in two disjoint boxes. Passes when
/// |rho| < 4 / sqrt(runs).
pub fn independence_check(
    lambda: f64,
    window: &Window,
    a: &Window,
    b: &Window,
    runs: u64,
    seed: u64,
) -> Result<StatCheck> {
    check_runs(runs)?;
    require_box(a, "first region")?;
    require_box(b, "second region")?;
    if a.box_overlap(b).unwrap_or(0.0) > 0.0 {
        return invalid("independence regions must be disjoint");
    }
    let pairs = per_run(lambda, window, runs, seed, tag::PPP, |s| (s.count_in(a) as f64, s.count_in(b) as f64))?;
    let n = pairs.len() as f64;
    let (ma, mb) = pairs.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let (ma, mb) = (ma / n, mb / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    let rho = if saa > 0.0 && sbb > 0.0 { sab / (saa * sbb).sqrt() } else { 0.0 };
    let se = 1.0 / n.sqrt();
    Ok(StatCheck::agreement("count correlation", rho, 0.0, se))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperpositionReport {
    pub mean: StatCheck,
    pub dispersion: StatCheck,
    pub chi_square: ChiSquare,
    pub verdict: Verdict,
}

/// Merges independent PPP(lambda1) and PPP(lambda2) samples and tests the
/// merged counts against Poisson((lambda1 + lambda2) |window|).
pub fn superposition_check(lambda1: f64, lambda2: f64, window: &Window, runs: u64, seed: u64) -> Result<SuperpositionReport> {
    check_runs(runs)?;
    sample_homogeneous(lambda1, window, &mut stream(seed, tag::PPP, 0))?;
    sample_homogeneous(lambda2, window, &mut stream(seed, tag::PPP_SECOND, 0))?;
    let counts: Vec<usize> = chunked(runs, |s, e| {
        (s..e)
            .map(|i| {
                let a = sample_homogeneous(lambda1, window, &mut stream(seed, tag::PPP, i)).expect("validated");
                let b = sample_homogeneous(lambda2, window, &mut stream(seed, tag::PPP_SECOND, i)).expect("validated");
                a.merge(&b).len()
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let mu = (lambda1 + lambda2) * window.volume();
    let mut m = Moments::default();
    for &c in &counts {
        m.push(c as f64);
    }
    let n = runs as f64;
    let mean = StatCheck::agreement("merged mean", m.mean(), mu, (mu / n).sqrt());
    let dispersion = if mu > 0.0 {
        // Var of the sample variance of a Poisson(mu) sample is about (mu + 2 mu^2) / n.
        let se = ((mu + 2.0 * mu * mu) / n).sqrt() / mu;
        StatCheck::agreement("variance/mean", m.variance() / m.mean().max(f64::MIN_POSITIVE), 1.0, se)
    } else {
        StatCheck::agreement("variance/mean", m.variance(), 0.0, 0.0)
    };
    let chi = chi_square_poisson(&histogram(&counts), mu);
    let verdict = Verdict::combine([mean.verdict, dispersion.verdict, chi_square_verdict(&chi)]);
    Ok(SuperpositionReport { mean, dispersion, chi_square: chi, verdict })
}

/// Test functionals with a closed-form right side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MeckeFamily {
    /// 1{x in A}.
    Indicator { region: Window },
    /// 1{x in A} times the number of points in B.
    CountWeight { a: Window, b: Window },
    /// 1{x in A} times the number of other points within distance `range`.
    PairwiseKernel { region: Window, range: f64 },
}

impl MeckeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MeckeFamily::Indicator { .. } => "indicator",
            MeckeFamily::CountWeight { .. } => "count-weight",
            MeckeFamily::PairwiseKernel { .. } => "pairwise-kernel",
        }
    }

    /// Integral of E[phi(x, eta + delta_x)] against lambda dx.
    pub fn right_side(&self, lambda: f64, window: &Window) -> Result<f64> {
        require_box(window, "window")?;
        match self {
            MeckeFamily::Indicator { region } => {
                require_box(region, "region")?;
                Ok(lambda * region.box_overlap(window).unwrap_or(0.0))
            }
            MeckeFamily::CountWeight { a, b } => {
                require_box(a, "region A")?;
                require_box(b, "region B")?;
                let la = a.box_overlap(window).unwrap_or(0.0);
                let lb = b.box_overlap(window).unwrap_or(0.0);
                let lab = match (a, b, window) {
                    (Window::Box { lo: a0, hi: a1 }, Window::Box { lo: b0, hi: b1 }, _) => {
                        let lo: Vec<f64> = a0.iter().zip(b0).map(|(x, y)| x.max(*y)).collect();
                        let hi: Vec<f64> = a1.iter().zip(b1).map(|(x, y)| x.min(*y)).collect();
                        if lo.iter().zip(&hi).all(|(l, h)| l < h) {
                            Window::cube(&lo, &hi).box_overlap(window).unwrap_or(0.0)
                        } else {
                            0.0
                        }
                    }
                    _ => unreachable!("checked above"),
                };
                Ok(lambda * la * lambda * lb + lambda * lab)
            }
            MeckeFamily::PairwiseKernel { region, range } => {
                require_box(region, "region")?;
                if !(*range > 0.0) {
                    return invalid("kernel range must be positive");
                }
                let (lo, hi) = region.bounds();
                if !corners_inset(&lo, &hi, *range, window) {
                    return Err(Error::Unsupported(
                        "pairwise kernel needs the region inset from the window boundary by the range".into(),
                    ));
                }
                let d = window.dim();
                Ok(lambda * region.volume() * lambda * ball_volume(d, *range))
            }
        }
    }

    /// Sum over the points of one sample of phi(x, sample).
    pub fn left_side(&self, sample: &PointSample) -> f64 {
        match self {
            MeckeFamily::Indicator { region } => sample.count_in(region) as f64,
            MeckeFamily::CountWeight { a, b } => (sample.count_in(a) * sample.count_in(b)) as f64,
            MeckeFamily::PairwiseKernel { region, range } => {
                let mut total = 0usize;
                for i in 0..sample.len() {
                    let x = sample.point(i);
                    if !region.contains(x) {
                        continue;
                    }
                    total += (0..sample.len()).filter(|&j| j != i && distance(x, sample.point(j)) <= *range).count();
                }
                total as f64
            }
        }
    }
}

fn corners_inset(lo: &[f64], hi: &[f64], range: f64, window: &Window) -> bool {
    match window {
        Window::Box { lo: w0, hi: w1 } => {
            lo.iter().zip(w0).all(|(a, b)| a - range >= *b) && hi.iter().zip(w1).all(|(a, b)| a + range <= *b)
        }
        Window::Ball { .. } => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeckeReport {
    pub family: String,
    pub left: f64,
    pub left_stderr: f64,
    pub right: f64,
    pub discrepancy: f64,
    pub verdict: Verdict,
}

/// Monte Carlo left side of the Mecke identity against its closed-form right side.
pub fn mecke_check(lambda: f64, window: &Window, family: &MeckeFamily, runs: u64, seed: u64) -> Result<MeckeReport> {
    check_runs(runs)?;
    let right = family.right_side(lambda, window)?;
    let values = per_run(lambda, window, runs, seed, tag::MECKE, |s| family.left_side(s))?;
    let mut m = Moments::default();
    for v in values {
        m.push(v);
    }
    let c = StatCheck::agreement(family.name(), m.mean(), right, m.stderr());
    Ok(MeckeReport {
        family: family.name().into(),
        left: c.observed,
        left_stderr: c.stderr,
        right,
        discrepancy: c.z().abs(),
        verdict: c.verdict,
    })
}

/// Pooled counts of marked points per (sub-box, radius interval) cell. The
/// window is halved along its first two axes (first axis only when d = 1),
/// and `radius_edges` bounds consecutive radius intervals. Over many runs
/// each cell total is Poisson with mean runs * lambda * vol * nu(interval),
/// independently across cells, so the statistic has one degree of freedom
/// per cell with positive expectation.
pub fn marked_cell_check(
    lambda: f64,
    nu: RadiusLaw,
    window: &Window,
    radius_edges: &[f64],
    runs: u64,
    seed: u64,
) -> Result<ChiSquare> {
    check_runs(runs)?;
    require_box(window, "window")?;
    if radius_edges.len() < 2 || radius_edges.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("radius edges must be strictly increasing with at least two entries");
    }
    let (lo, hi) = window.bounds();
    let d = lo.len();
    let split = d.min(2);
    let boxes = 1usize << split;
    let intervals = radius_edges.len() - 1;
    let cell_of = |x: &[f64], r: f64| -> Option<usize> {
        let mut b = 0;
        for a in 0..split {
            if x[a] >= 0.5 * (lo[a] + hi[a]) {
                b |= 1 << a;
            }
        }
        let k = radius_edges.windows(2).position(|w| w[0] <= r && r < w[1])?;
        Some(b * intervals + k)
    };
    sample_marked(lambda, nu, window, &mut stream(seed, tag::MARKED, 0))?;
    let totals = chunked(runs, |s, e| {
        let mut acc = vec![0u64; boxes * intervals];
        for i in s..e {
            let m = sample_marked(lambda, nu, window, &mut stream(seed, tag::MARKED, i)).expect("validated");
            for j in 0..m.len() {
                if let Some(c) = cell_of(m.center(j), m.radii[j]) {
                    acc[c] += 1;
                }
            }
        }
        acc
    })
    .into_iter()
    .fold(vec![0u64; boxes * intervals], |mut a, b| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    });
    let sub_volume = window.volume() / boxes as f64;
    let mut statistic = 0.0;
    let mut dof = 0;
    for b in 0..boxes {
        for k in 0..intervals {
            let p = nu.interval(radius_edges[k], radius_edges[k + 1]);
            let expected = runs as f64 * lambda * sub_volume * p;
            let observed = totals[b * intervals + k] as f64;
            if expected > 0.0 {
                statistic += (observed - expected).powi(2) / expected;
                dof += 1;
            } else if observed > 0.0 {
                statistic = f64::INFINITY;
            }
        }
    }
    let p_value = if dof == 0 {
        1.0
    } else if statistic.is_finite() {
        1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(statistic)
    } else {
        0.0
    };
    Ok(ChiSquare { statistic, dof, p_value })
}

/// Pass when a chi-square test is not rejected at the 1% level.
pub fn chi_square_verdict(c: &ChiSquare) -> Verdict {
    Verdict::exact(c.p_value >= CHI_LEVEL)
}
