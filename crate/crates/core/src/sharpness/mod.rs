//! Differential-inequality pipeline: partial sums of theta, the inequality
//! theta' >= c (scale / Sigma) theta (1 - theta) cell by cell, decay and
//! growth fits, and a validator running the two conclusions of the
//! inequality lemma on synthetic families.

mod check;
mod fits;
mod lemma;
mod sums;

pub use check::{check_differential_inequality, InequalityCell, InequalityReport, MAX_HALF_STEP};
pub use fits::{fit_exponential_decay, fit_linear_growth, DecayFit, FitRow, GrowthFit};
pub use lemma::{
    locate_transition, validate_lemma_family, ConstantFamily, ExponentialFamily, LemmaFamily, LemmaReport,
    RateProfileFamily, Transition,
};
pub use sums::{partial_sums, Curve, CurvePoint, SumMode, SumRow, SumTable};
