//! Query algorithms, revealments, influences and the OSSS inequality.

pub mod algorithm;
pub mod bounds;
pub mod exact;
pub mod mc;
pub mod runner;

pub use algorithm::{QueryAlgorithm, QueryRun, SphereExploration, StopRule};
pub use runner::{run_algorithm, run_with, RunTrace};

use crate::stats::Verdict;
use serde::Serialize;

/// Slack tolerance of the exact inequalities.
pub const OSSS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct OsssReport {
    pub algorithm: String,
    pub p: f64,
    pub variance: f64,
    pub revealment: Vec<f64>,
    pub influence: Vec<f64>,
    pub covariance: Vec<f64>,
    /// sum_i delta_i Inf_i - Var(f).
    pub slack_v1: f64,
    /// 2 sum_i delta_i Cov_i - Var(f); only for increasing f.
    pub slack_v2: Option<f64>,
    pub verdict: Verdict,
}

impl OsssReport {
    pub(crate) fn assemble(
        algorithm: String,
        p: f64,
        variance: f64,
        revealment: Vec<f64>,
        influence: Vec<f64>,
        covariance: Vec<f64>,
        increasing: bool,
    ) -> OsssReport {
        let v1: f64 = revealment.iter().zip(&influence).map(|(d, i)| d * i).sum();
        let v2: f64 = 2.0 * revealment.iter().zip(&covariance).map(|(d, c)| d * c).sum::<f64>();
        let slack_v1 = v1 - variance;
        let slack_v2 = increasing.then_some(v2 - variance);
        let verdict = Verdict::exact(
            slack_v1 >= -OSSS_TOLERANCE && slack_v2.is_none_or(|s| s >= -OSSS_TOLERANCE),
        );
        OsssReport { algorithm, p, variance, revealment, influence, covariance, slack_v1, slack_v2, verdict }
    }
}

/// One line of the OSSS CSV output.
#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct OsssRow {
    pub check: String,
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub k: Option<usize>,
    pub edge: Option<usize>,
    pub delta: Option<f64>,
    pub inf: Option<f64>,
    pub cov: Option<f64>,
    pub slack_v1: Option<f64>,
    pub slack_v2: Option<f64>,
    pub verdict: String,
}

#[cfg(test)]
mod tests;
