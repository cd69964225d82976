use crate::bernoulli::ThetaCurve;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One theta estimate at (parameter, scale).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub param: f64,
    pub scale: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// theta over a grid of parameters (p or lambda) and scales (n or r).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub replicas: u64,
    /// Estimates at different parameters come from nested indicators.
    pub coupled: bool,
    pub source: String,
}

impl From<&ThetaCurve> for Curve {
    fn from(c: &ThetaCurve) -> Curve {
        Curve {
            points: c
                .rows
                .iter()
                .map(|r| CurvePoint { param: r.p, scale: r.n as f64, estimate: r.estimate, stderr: r.stderr })
                .collect(),
            replicas: c.replicas,
            coupled: c.coupled,
            source: format!("bernoulli d={} seed={}", c.d, c.seed),
        }
    }
}

impl Curve {
    /// Sorted distinct parameters.
    pub fn params(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.points.iter().map(|x| x.param).collect();
        p.sort_by(f64::total_cmp);
        p.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        p
    }

    /// Points at one parameter, sorted by scale.
    pub fn slice(&self, param: f64) -> Vec<CurvePoint> {
        let mut s: Vec<CurvePoint> = self.points.iter().copied().filter(|x| (x.param - param).abs() < 1e-12).collect();
        s.sort_by(|a, b| a.scale.total_cmp(&b.scale));
        s
    }

    pub fn get(&self, param: f64, scale: f64) -> Option<CurvePoint> {
        self.points.iter().copied().find(|x| (x.param - param).abs() < 1e-12 && (x.scale - scale).abs() < 1e-12)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumMode {
    /// Sigma_n = theta_0 + ... + theta_{n-1}.
    Discrete,
    /// Sigma_r = integral of theta_s over [0, r] by the trapezoid rule.
    Continuum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumRow {
    pub param: f64,
    pub scale: f64,
    pub theta: f64,
    pub theta_stderr: f64,
    pub sum: f64,
    /// Linear propagation of the theta standard errors.
    pub sum_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumTable {
    pub mode: SumMode,
    pub source: String,
    pub rows: Vec<SumRow>,
}

impl SumTable {
    pub fn get(&self, param: f64, scale: f64) -> Option<&SumRow> {
        self.rows.iter().find(|x| (x.param - param).abs() < 1e-12 && (x.scale - scale).abs() < 1e-12)
    }
}

/// Partial sums per parameter. A missing scale 0 is filled with theta_0 = 1.
/// Discrete scales must be the integers 0..=n without gaps.
pub fn partial_sums(curve: &Curve, mode: SumMode) -> Result<SumTable> {
    let mut rows = Vec::new();
    for p in curve.params() {
        let mut slice = curve.slice(p);
        if slice.first().map_or(true, |x| x.scale > 0.0) {
            slice.insert(0, CurvePoint { param: p, scale: 0.0, estimate: 1.0, stderr: 0.0 });
        }
        if slice[0].scale < 0.0 {
            return Err(Error::Input(format!("negative scale at parameter {p}")));
        }
        match mode {
            SumMode::Discrete => {
                for (k, x) in slice.iter().enumerate() {
                    if (x.scale - k as f64).abs() > 1e-9 {
                        return Err(Error::Input(format!(
                            "parameter {p}: discrete sums need scales 0, 1, 2, ... without gaps; scale {k} is missing"
                        )));
                    }
                }
                let (mut sum, mut se) = (0.0, 0.0);
                for x in &slice {
                    rows.push(SumRow { param: p, scale: x.scale, theta: x.estimate, theta_stderr: x.stderr, sum, sum_stderr: se });
                    sum += x.estimate;
                    se += x.stderr;
                }
            }
            SumMode::Continuum => {
                let (mut sum, mut se) = (0.0, 0.0);
                let mut prev: Option<CurvePoint> = None;
                for x in &slice {
                    if let Some(a) = prev {
                        let h = x.scale - a.scale;
                        sum += 0.5 * h * (a.estimate + x.estimate);
                        se += 0.5 * h * (a.stderr + x.stderr);
                    }
                    rows.push(SumRow { param: p, scale: x.scale, theta: x.estimate, theta_stderr: x.stderr, sum, sum_stderr: se });
                    prev = Some(*x);
                }
            }
        }
    }
    Ok(SumTable { mode, source: curve.source.clone(), rows })
}
