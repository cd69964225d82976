use super::sums::CurvePoint;
use crate::error::{invalid, Result};
use crate::stats::{least_squares, BAND};
use serde::{Deserialize, Serialize};

/// Log-linear fit of theta against scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual and propagated sampling error combined.
    pub slope_stderr: f64,
    pub r2: f64,
    /// Decay rate c_p = -slope, or the lower bound when some estimate is zero.
    pub rate: f64,
    pub lower_bound: Option<f64>,
    /// Scale range covered by the fit.
    pub span: f64,
    /// Even the upper end of the slope band drops theta by more than one
    /// e-fold across the span.
    pub decaying: bool,
}

/// theta_n ~ exp(-c_p n) by least squares on log theta. Needs at least four
/// scales. If some estimate is zero, the first zero scale n0 and the
/// rule-of-three bound theta <= 3 / N give c_p >= ln(N / 3) / n0, which is
/// reported instead of a fitted rate.
pub fn fit_exponential_decay(points: &[CurvePoint], replicas: u64) -> Result<DecayFit> {
    if points.len() < 4 {
        return invalid(format!("decay fit needs at least 4 scales, got {}", points.len()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    let span = pts.last().unwrap().scale - pts[0].scale;
    if span <= 0.0 {
        return invalid("decay fit needs distinct scales");
    }
    let positive: Vec<&CurvePoint> = pts.iter().filter(|x| x.estimate > 0.0).collect();
    let x: Vec<f64> = positive.iter().map(|p| p.scale).collect();
    let y: Vec<f64> = positive.iter().map(|p| p.estimate.ln()).collect();
    let (slope, intercept, mut slope_stderr, r2) = if positive.len() >= 2 {
        let fit = least_squares(&x, &y);
        let mx = x.iter().sum::<f64>() / x.len() as f64;
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let propagated: f64 = positive
            .iter()
            .map(|p| ((p.scale - mx) / sxx * p.stderr / p.estimate).powi(2))
            .sum::<f64>()
            .sqrt();
        (fit.slope, fit.intercept, (fit.slope_stderr.powi(2) + propagated.powi(2)).sqrt(), fit.r2)
    } else {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    };
    if let Some(zero) = pts.iter().find(|x| x.estimate <= 0.0) {
        let ceiling = 3.0 / replicas.max(3) as f64;
        let bound = (1.0 / ceiling).ln() / zero.scale.max(1.0);
        let first = pts[0].estimate;
        slope_stderr = if slope_stderr.is_nan() { 0.0 } else { slope_stderr };
        return Ok(DecayFit {
            slope,
            intercept,
            slope_stderr,
            r2,
            rate: bound,
            lower_bound: Some(bound),
            span,
            decaying: first > 0.0 && (first / ceiling).ln() > 1.0,
        });
    }
    Ok(DecayFit {
        slope,
        intercept,
        slope_stderr,
        r2,
        rate: -slope,
        lower_bound: None,
        span,
        decaying: (slope + BAND * slope_stderr) * span < -1.0,
    })
}

/// Linear envelope theta >= c (p - pc) above an estimated critical point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub pc: f64,
    /// Largest c with every point above c (p - pc) minus four stderr.
    pub c: f64,
    /// Largest c with every point above c (p - pc) plus four stderr.
    pub ci_low: f64,
    /// R^2 of the ordinary least-squares line, for information.
    pub r2: f64,
    pub points: usize,
    pub warning: Option<String>,
}

impl GrowthFit {
    pub fn excludes_zero(&self) -> bool {
        self.ci_low > 0.0
    }
}

/// Uses only points with parameter above `pc`; at least three are needed.
pub fn fit_linear_growth(points: &[CurvePoint], pc: f64) -> Result<GrowthFit> {
    let above: Vec<&CurvePoint> = points.iter().filter(|x| x.param > pc).collect();
    if above.len() < 3 {
        return invalid(format!("growth fit needs at least 3 points above pc = {pc}, got {}", above.len()));
    }
    let c = above.iter().map(|x| (x.estimate + BAND * x.stderr) / (x.param - pc)).fold(f64::INFINITY, f64::min);
    let ci_low = above.iter().map(|x| (x.estimate - BAND * x.stderr) / (x.param - pc)).fold(f64::INFINITY, f64::min);
    let x: Vec<f64> = above.iter().map(|p| p.param).collect();
    let y: Vec<f64> = above.iter().map(|p| p.estimate).collect();
    let r2 = least_squares(&x, &y).r2;
    let warning = above
        .iter()
        .all(|x| x.estimate == 0.0)
        .then(|| "all estimates above pc are zero".to_string());
    Ok(GrowthFit { pc, c, ci_low, r2, points: above.len(), warning })
}

/// One line of the fits CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub fit: String,
    pub kind: String,
    pub param: String,
    pub value: f64,
    pub stderr: f64,
    pub r2: f64,
}

impl DecayFit {
    pub fn rows(&self, param: &str) -> Vec<FitRow> {
        let row = |kind: &str, value: f64, stderr: f64| FitRow {
            fit: "decay".into(),
            kind: kind.into(),
            param: param.into(),
            value,
            stderr,
            r2: self.r2,
        };
        let mut out = vec![row("slope", self.slope, self.slope_stderr), row("intercept", self.intercept, 0.0)];
        match self.lower_bound {
            Some(b) => out.push(row("rate_lower_bound", b, 0.0)),
            None => out.push(row("rate", self.rate, self.slope_stderr)),
        }
        out.push(row("decaying", f64::from(u8::from(self.decaying)), 0.0));
        out
    }
}

impl GrowthFit {
    pub fn rows(&self, param: &str) -> Vec<FitRow> {
        let row = |kind: &str, value: f64| FitRow {
            fit: "growth".into(),
            kind: kind.into(),
            param: param.into(),
            value,
            stderr: 0.0,
            r2: self.r2,
        };
        vec![row("pc", self.pc), row("c", self.c), row("ci_low", self.ci_low)]
    }
}
