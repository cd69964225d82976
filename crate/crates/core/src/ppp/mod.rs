//! Poisson point processes in bounded windows.
//!
//! Sampling follows the two-step construction: draw the total count from a
//! Poisson law with the total mass, then place that many iid points from the
//! normalized intensity.

mod grid;
mod laws;
mod marks;
mod window;

pub use grid::{grid_approximation, grid_tv_ladder, GridTvRow, GridTvReport};
pub use laws::{
    chi_square_verdict, count_histogram, independence_check, marked_cell_check, mecke_check, superposition_check, void_check,
    CheckRow, MeckeFamily, MeckeReport, StatCheck, SuperpositionReport,
};
pub use marks::{covering_mass, sample_marked, MarkedSample, RadiusLaw};
pub use window::{ball_volume, distance, norm, unit_ball_volume, Window};

use crate::error::{invalid, Result};
use crate::rng::{stream, tag};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Poisson};
use std::fmt;
use std::sync::Arc;

/// Draws one point of the normalized intensity into the buffer.
pub type PointSampler = Arc<dyn Fn(&mut dyn RngCore, &mut [f64]) + Send + Sync>;

/// Finite intensity measure.
#[derive(Clone)]
pub enum IntensitySpec {
    Homogeneous { lambda: f64, window: Window },
    /// Total mass plus a sampler of the normalized measure, supported in `window`.
    Finite { mass: f64, window: Window, sampler: PointSampler },
}

impl fmt::Debug for IntensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntensitySpec::Homogeneous { lambda, window } => {
                f.debug_struct("Homogeneous").field("lambda", lambda).field("window", window).finish()
            }
            IntensitySpec::Finite { mass, window, .. } => {
                f.debug_struct("Finite").field("mass", mass).field("window", window).finish()
            }
        }
    }
}

impl IntensitySpec {
    pub fn homogeneous(lambda: f64, window: Window) -> IntensitySpec {
        IntensitySpec::Homogeneous { lambda, window }
    }

    pub fn window(&self) -> &Window {
        match self {
            IntensitySpec::Homogeneous { window, .. } | IntensitySpec::Finite { window, .. } => window,
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            IntensitySpec::Homogeneous { lambda, window } => lambda * window.volume(),
            IntensitySpec::Finite { mass, .. } => *mass,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.window().is_valid() {
            return invalid("window is degenerate");
        }
        if let IntensitySpec::Homogeneous { lambda, .. } = self {
            if !(*lambda >= 0.0) {
                return invalid(format!("intensity must be non-negative, got {lambda}"));
            }
        }
        let mass = self.total_mass();
        if !mass.is_finite() {
            return invalid("intensity has infinite total mass");
        }
        if mass < 0.0 {
            return invalid("intensity has negative total mass");
        }
        Ok(())
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<PointSample> {
        self.validate()?;
        let d = self.window().dim();
        let count = poisson_count(self.total_mass(), rng);
        let mut coords = vec![0.0; count * d];
        for chunk in coords.chunks_mut(d) {
            match self {
                IntensitySpec::Homogeneous { window, .. } => window.sample_point(rng, chunk),
                IntensitySpec::Finite { sampler, .. } => sampler(rng, chunk),
            }
        }
        Ok(PointSample { d, coords, window: self.window().clone(), seed: None })
    }
}

/// Finite point configuration in a window.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSample {
    pub d: usize,
    pub coords: Vec<f64>,
    pub window: Window,
    pub seed: Option<u64>,
}

impl PointSample {
    pub fn len(&self) -> usize {
        if self.d == 0 {
            0
        } else {
            self.coords.len() / self.d
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.d.max(1))
    }

    pub fn count_in(&self, region: &Window) -> usize {
        self.points().filter(|x| region.contains(x)).count()
    }

    /// Union of two samples over the same window.
    pub fn merge(mut self, other: &PointSample) -> PointSample {
        self.coords.extend_from_slice(&other.coords);
        self
    }
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mass: f64, rng: &mut R) -> usize {
    if mass <= 0.0 {
        return 0;
    }
    Poisson::new(mass).expect("finite positive mass").sample(rng) as usize
}

/// Homogeneous PPP(lambda) in `window` from an existing stream.
pub fn sample_homogeneous<R: Rng + ?Sized>(lambda: f64, window: &Window, rng: &mut R) -> Result<PointSample> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return invalid(format!("intensity must be finite and non-negative, got {lambda}"));
    }
    if !window.is_valid() {
        return invalid("window is degenerate");
    }
    let d = window.dim();
    let count = poisson_count(lambda * window.volume(), rng);
    let mut coords = vec![0.0; count * d];
    for chunk in coords.chunks_mut(d) {
        window.sample_point(rng, chunk);
    }
    Ok(PointSample { d, coords, window: window.clone(), seed: None })
}

/// One realization, deterministic in `seed`.
pub fn sample_ppp(spec: &IntensitySpec, seed: u64) -> Result<PointSample> {
    let mut rng = stream(seed, tag::PPP, 0);
    let mut out = spec.sample(&mut rng)?;
    out.seed = Some(seed);
    Ok(out)
}
