//! Russo's formula for the Boolean model.

use super::graph::BallGraph;
use super::model::{BooleanModel, TruncationPolicy};
use crate::error::{invalid, Result};
use crate::ppp::{ball_volume, norm, unit_ball_volume, MarkedSample, Window};
use crate::rng::{chunked, stream, tag};
use crate::stats::{Estimate, Moments, Verdict, BAND};
use rand::Rng;
use serde::Serialize;

/// Increasing local events with an observation radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ContinuumEvent {
    OriginCovered,
    OriginToSphere(f64),
}

impl ContinuumEvent {
    /// Radius of the ball the event depends on.
    pub fn reach(&self) -> f64 {
        match self {
            ContinuumEvent::OriginCovered => 0.0,
            ContinuumEvent::OriginToSphere(r) => *r,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ContinuumEvent::OriginCovered => "origin-covered".into(),
            ContinuumEvent::OriginToSphere(r) => format!("origin-to-sphere:{r}"),
        }
    }
}

/// Component flags of a sample used to test the event with one extra ball.
struct Pivots {
    g: BallGraph,
    holds: bool,
    covers_origin: Vec<bool>,
    touches_sphere: Vec<bool>,
}

impl Pivots {
    fn new(sample: &MarkedSample, event: ContinuumEvent) -> Pivots {
        let g = BallGraph::build(sample);
        let k = g.component_count();
        let r = event.reach();
        let mut covers_origin = vec![false; k];
        let mut touches_sphere = vec![false; k];
        for i in 0..g.len() {
            let t = norm(g.center(i));
            let c = g.component(i);
            covers_origin[c] |= t <= g.radii[i];
            touches_sphere[c] |= t - g.radii[i] <= r && r <= t + g.radii[i];
        }
        let holds = match event {
            ContinuumEvent::OriginCovered => covers_origin.iter().any(|&b| b),
            ContinuumEvent::OriginToSphere(_) => (0..k).any(|c| covers_origin[c] && touches_sphere[c]),
        };
        Pivots { g, holds, covers_origin, touches_sphere }
    }

    /// Whether adding B(z, rho) makes the event occur.
    fn completes(&self, event: ContinuumEvent, z: &[f64], rho: f64) -> bool {
        let t = norm(z);
        let mut origin = t <= rho;
        if let ContinuumEvent::OriginCovered = event {
            return origin;
        }
        let r = event.reach();
        let mut sphere = t - rho <= r && r <= t + rho;
        for i in 0..self.g.len() {
            if crate::ppp::distance(z, self.g.center(i)) <= rho + self.g.radii[i] {
                let c = self.g.component(i);
                origin |= self.covers_origin[c];
                sphere |= self.touches_sphere[c];
            }
        }
        origin && sphere
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuumRussoReport {
    pub event: String,
    pub lambda: f64,
    pub step: f64,
    pub finite_difference: Estimate,
    pub pivotal: Estimate,
    pub closed_form: Option<f64>,
    pub verdict: Verdict,
}

/// Ghost balls per replica in the pivotal estimator.
pub const GHOSTS: usize = 16;

/// Centered difference (P_{lambda+h}[A] - P_{lambda-h}[A]) / 2h from one
/// thinned sample per replica, against E[1{A fails} * integral of
/// 1{A holds after adding (z, rho)} dz nu(drho)]. The inner integral is
/// importance-sampled: rho from nu, z uniform in B(0, reach + rho), weight
/// the volume of that ball.
pub fn verify_russo_continuum(
    model: &BooleanModel,
    event: ContinuumEvent,
    step: f64,
    replicas: u64,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<ContinuumRussoReport> {
    if !(step > 0.0) || step > model.lambda {
        return invalid("finite-difference step must lie in (0, lambda]");
    }
    if replicas == 0 {
        return invalid("replicas must be at least 1");
    }
    let d = model.d;
    let reach = event.reach();
    let pad = trunc.padding(model, reach)?;
    let window = reach + pad.padding;
    let top = model.with_lambda(model.lambda + step);
    let keep_low = (model.lambda - step) / (model.lambda + step);
    let keep_mid = model.lambda / (model.lambda + step);
    let parts = chunked(replicas, |s, e| {
        let mut flips = 0u64;
        let mut piv = Moments::default();
        for i in s..e {
            let mut rng = stream(seed, tag::RUSSO, i);
            let full = top.sample_ball(window, &mut rng).expect("validated model");
            let marks: Vec<f64> = (0..full.len()).map(|_| rng.random::<f64>()).collect();
            let low = full.filter(|j| marks[j] < keep_low);
            let mid = full.filter(|j| marks[j] < keep_mid);
            let high_holds = Pivots::new(&full, event).holds;
            let low_holds = Pivots::new(&low, event).holds;
            flips += (high_holds && !low_holds) as u64;
            let p = Pivots::new(&mid, event);
            let mut value = 0.0;
            if !p.holds {
                let mut ghost = stream(seed, tag::GHOST, i);
                let mut z = vec![0.0; d];
                for _ in 0..GHOSTS {
                    let rho = model.nu.sample(&mut ghost);
                    let ball = Window::centered_ball(d, reach + rho);
                    ball.sample_point(&mut ghost, &mut z);
                    if p.completes(event, &z, rho) {
                        value += ball_volume(d, reach + rho);
                    }
                }
                value /= GHOSTS as f64;
            }
            piv.push(value);
        }
        (flips, piv)
    });
    let mut flips = 0u64;
    let mut piv = Moments::default();
    for (f, m) in &parts {
        flips += f;
        piv.merge(m);
    }
    let q = flips as f64 / replicas as f64;
    let finite_difference = Estimate {
        value: q / (2.0 * step),
        stderr: (q * (1.0 - q) / replicas as f64).sqrt() / (2.0 * step),
        replicas,
        seed,
    };
    let pivotal = Estimate::from_moments(&piv, seed);
    let closed_form = match event {
        ContinuumEvent::OriginCovered => model.nu.moment(d as f64).map(|m| {
            let a = unit_ball_volume(d) * m;
            a * (-model.lambda * a).exp()
        }),
        ContinuumEvent::OriginToSphere(_) => None,
    };
    let verdict = match closed_form {
        Some(c) => Verdict::agreement(finite_difference.value - c, finite_difference.stderr)
            .worst(Verdict::agreement(pivotal.value - c, pivotal.stderr)),
        None => {
            let sigma = (finite_difference.stderr.powi(2) + pivotal.stderr.powi(2)).sqrt();
            let v = Verdict::agreement(finite_difference.value - pivotal.value, sigma);
            // A band wider than the value itself says nothing.
            if v == Verdict::Pass && BAND * sigma > finite_difference.value.abs().max(pivotal.value.abs()) {
                Verdict::Inconclusive
            } else {
                v
            }
        }
    };
    Ok(ContinuumRussoReport {
        event: event.name(),
        lambda: model.lambda,
        step,
        finite_difference,
        pivotal,
        closed_form,
        verdict,
    })
}
