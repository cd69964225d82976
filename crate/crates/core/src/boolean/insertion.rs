//! Insertion tolerance: a ball near x that swallows B(x, r_*) but stays in B(x, r^*).

use super::model::BooleanModel;
use crate::error::{invalid, Result};
use crate::ppp::{distance, sample_marked, unit_ball_volume, RadiusLaw, Window};
use crate::rng::{count_hits, stream, tag};
use crate::stats::{Estimate, Verdict};
use serde::Serialize;

/// Radii with 1 + 2 sqrt(d) <= r_* <= r^* <= 2 r_* - 2 sqrt(d).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StarPair {
    pub d: usize,
    pub inner: f64,
    pub outer: f64,
}

impl StarPair {
    pub fn new(d: usize, inner: f64, outer: f64) -> Result<StarPair> {
        let root = (d as f64).sqrt();
        if !(1.0 + 2.0 * root <= inner && inner <= outer && outer <= 2.0 * inner - 2.0 * root) {
            return invalid(format!(
                "radii ({inner}, {outer}) violate 1 + 2 sqrt(d) <= inner <= outer <= 2 inner - 2 sqrt(d) at d = {d}"
            ));
        }
        Ok(StarPair { d, inner, outer })
    }

    /// True iff the ball B(z, radius) contains B(x, inner) and lies in B(x, outer).
    pub fn admits(&self, x: &[f64], z: &[f64], radius: f64) -> bool {
        let t = distance(x, z);
        t + self.inner <= radius && t + radius <= self.outer
    }
}

/// Unit cell x + [0,1)^d.
fn cell(x: &[i64]) -> Window {
    Window::Box {
        lo: x.iter().map(|&v| v as f64).collect(),
        hi: x.iter().map(|&v| v as f64 + 1.0).collect(),
    }
}

/// Integral over z in the unit cell of nu([inner + t, outer - t]) with
/// t = |z - corner|. Radius laws only see t, and the cell meets B(corner, t)
/// in a 2^-d fraction of the ball while t <= 1, so the fixed law has a
/// closed form there; other cases use a midpoint rule.
pub fn admissible_mass(star: &StarPair, nu: &RadiusLaw) -> f64 {
    let d = star.d;
    if let RadiusLaw::Fixed(r0) = *nu {
        let tau = (r0 - star.inner).min(star.outer - r0);
        if tau < 0.0 {
            return 0.0;
        }
        if tau <= 1.0 {
            return unit_ball_volume(d) * tau.powi(d as i32) / 2f64.powi(d as i32);
        }
    }
    let per_axis = (4e6f64.powf(1.0 / d as f64)).ceil() as usize;
    let h = 1.0 / per_axis as f64;
    let total = per_axis.pow(d as u32);
    let mut idx = vec![0usize; d];
    let mut sum = 0.0;
    for _ in 0..total {
        let t = idx.iter().map(|&i| ((i as f64 + 0.5) * h).powi(2)).sum::<f64>().sqrt();
        sum += nu.interval(star.inner + t, star.outer - t);
        for a in 0..d {
            idx[a] += 1;
            if idx[a] < per_axis {
                break;
            }
            idx[a] = 0;
        }
    }
    sum * h.powi(d as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InsertionReport {
    pub star: StarPair,
    pub mass: f64,
    pub closed_form: f64,
    pub mc: Estimate,
    pub verdict: Verdict,
    pub warning: Option<String>,
}

/// c_IT = P[D_x] by Monte Carlo over the balls centered in S_x, against
/// 1 - exp(-lambda * admissible mass).
pub fn insertion_tolerance(model: &BooleanModel, star: &StarPair, x: &[i64], replicas: u64, seed: u64) -> Result<InsertionReport> {
    if star.d != model.d || x.len() != model.d {
        return invalid("dimension mismatch between model, radii and lattice point");
    }
    if replicas == 0 {
        return invalid("replicas must be at least 1");
    }
    let mass = model.lambda * admissible_mass(star, &model.nu);
    let closed_form = 1.0 - (-mass).exp();
    let window = cell(x);
    let corner: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let hits = count_hits(replicas, |i| {
        let m = sample_marked(model.lambda, model.nu, &window, &mut stream(seed, tag::INSERTION, i)).expect("validated model");
        (0..m.len()).any(|j| star.admits(&corner, m.center(j), m.radii[j]))
    });
    let mc = Estimate::proportion(hits, replicas, seed);
    let se = (closed_form * (1.0 - closed_form) / replicas as f64).sqrt();
    let verdict = if closed_form == 0.0 { Verdict::exact(hits == 0) } else { Verdict::agreement(mc.value - closed_form, se) };
    let warning = (mass == 0.0).then(|| "admissible region has zero mass; insertion tolerance is 0".to_string());
    Ok(InsertionReport { star: *star, mass, closed_form, mc, verdict, warning })
}
