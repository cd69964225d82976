use super::sums::{partial_sums, Curve, SumMode};
use crate::error::{invalid, Result};
use crate::stats::Verdict;
use serde::Serialize;

/// Largest half-width of a centered difference still trusted for theta'.
pub const MAX_HALF_STEP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCell {
    pub param: f64,
    pub scale: f64,
    pub theta: f64,
    pub sum: f64,
    pub derivative: f64,
    pub derivative_stderr: f64,
    /// c (scale / Sigma) theta (1 - theta).
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub mode: SumMode,
    pub c: f64,
    pub cells: Vec<InequalityCell>,
    /// Parameters left out by the continuum gate.
    pub gated: Vec<f64>,
    pub verdict: Verdict,
}

/// theta' >= c (scale / Sigma) theta (1 - theta) at every interior parameter
/// and positive scale. theta' is the centered difference between the two
/// neighbouring parameters. In continuum mode, parameters below `gate`
/// (an estimate of the critical intensity for annulus crossings) are skipped.
pub fn check_differential_inequality(curve: &Curve, c: f64, mode: SumMode, gate: Option<f64>) -> Result<InequalityReport> {
    if !(c > 0.0) {
        return invalid("inequality constant must be positive");
    }
    let sums = partial_sums(curve, mode)?;
    let params = curve.params();
    let mut cells = Vec::new();
    let mut gated = Vec::new();
    for i in 1..params.len().saturating_sub(1) {
        let (lo, p, hi) = (params[i - 1], params[i], params[i + 1]);
        if mode == SumMode::Continuum && gate.is_some_and(|g| p < g) {
            gated.push(p);
            continue;
        }
        let width = hi - lo;
        for row in sums.rows.iter().filter(|r| (r.param - p).abs() < 1e-12 && r.scale > 0.0) {
            let (Some(a), Some(b)) = (curve.get(lo, row.scale), curve.get(hi, row.scale)) else {
                continue;
            };
            let q = b.estimate - a.estimate;
            let derivative = q / width;
            let derivative_stderr = if curve.coupled && curve.replicas > 0 {
                let q = q.clamp(0.0, 1.0);
                (q * (1.0 - q) / curve.replicas as f64).sqrt() / width
            } else {
                (a.stderr.powi(2) + b.stderr.powi(2)).sqrt() / width
            };
            let t = row.theta;
            let (rhs, rhs_stderr) = if row.sum > 0.0 {
                let k = c * row.scale / row.sum;
                (
                    k * t * (1.0 - t),
                    k * (1.0 - 2.0 * t).abs() * row.theta_stderr + k * t * (1.0 - t) / row.sum * row.sum_stderr,
                )
            } else {
                (0.0, 0.0)
            };
            let verdict = if 0.5 * width > MAX_HALF_STEP {
                Verdict::Inconclusive
            } else {
                Verdict::one_sided(derivative - rhs, derivative_stderr + rhs_stderr)
            };
            cells.push(InequalityCell {
                param: p,
                scale: row.scale,
                theta: t,
                sum: row.sum,
                derivative,
                derivative_stderr,
                rhs,
                rhs_stderr,
                verdict,
            });
        }
    }
    let verdict = Verdict::combine(cells.iter().map(|c| c.verdict));
    Ok(InequalityReport { mode, c, cells, gated, verdict })
}
