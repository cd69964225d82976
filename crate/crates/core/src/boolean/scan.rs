//! Coupled scan over intensities and radii.

use super::graph::BallGraph;
use super::model::{BooleanModel, BooleanRow, TruncationPolicy};
use crate::error::{invalid, Result};
use crate::ppp::RadiusLaw;
use crate::rng::{chunked, stream, tag};
use crate::stats::{Estimate, BAND};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub rows: Vec<BooleanRow>,
    /// Smallest intensity whose annulus estimates no longer decay in r.
    pub split: Option<f64>,
    pub warnings: Vec<String>,
}

/// theta_r and P[S_r <-> S_2r] over a grid of intensities and radii. One
/// sample at the largest intensity per replica; smaller intensities keep
/// each ball independently with probability lambda / lambda_max, so rows
/// are monotone in lambda replica by replica.
pub fn lambda_scan(
    d: usize,
    nu: RadiusLaw,
    r_list: &[f64],
    lambda_grid: &[f64],
    replicas: u64,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<ScanReport> {
    if r_list.is_empty() || lambda_grid.is_empty() || replicas == 0 {
        return invalid("scan needs radii, intensities and at least one replica");
    }
    if r_list.iter().any(|r| !(*r > 0.0)) || lambda_grid.iter().any(|l| !(*l >= 0.0)) {
        return invalid("radii must be positive and intensities non-negative");
    }
    let mut lambdas = lambda_grid.to_vec();
    lambdas.sort_by(f64::total_cmp);
    let mut radii = r_list.to_vec();
    radii.sort_by(f64::total_cmp);
    let top = BooleanModel::new(d, *lambdas.last().expect("non-empty"), nu)?;
    let mut warnings = Vec::new();
    if !nu.has_moment((5 * d - 2) as f64) {
        warnings.push(format!(
            "radius law {nu} lacks a finite moment of order 5d-2 = {}; the equality of the two critical intensities is not covered",
            5 * d - 2
        ));
    }
    let r_max = *radii.last().expect("non-empty");
    let pad = trunc.padding(&top, 2.0 * r_max)?;
    let reach = 2.0 * r_max + pad.padding;
    let (nl, nr) = (lambdas.len(), radii.len());
    let counts = chunked(replicas, |s, e| {
        let mut theta = vec![0u64; nl * nr];
        let mut annulus = vec![0u64; nl * nr];
        for i in s..e {
            let mut rng = stream(seed, tag::SCAN, i);
            let full = top.sample_ball(reach, &mut rng).expect("validated model");
            let marks: Vec<f64> = (0..full.len()).map(|_| rng.random::<f64>()).collect();
            for (a, &lambda) in lambdas.iter().enumerate() {
                let keep = if top.lambda > 0.0 { lambda / top.lambda } else { 0.0 };
                let g = BallGraph::build(&full.filter(|j| marks[j] < keep));
                let ext = g.radial_extents();
                for (b, &r) in radii.iter().enumerate() {
                    theta[a * nr + b] += ext.iter().any(|&(lo, hi)| lo == 0.0 && hi >= r) as u64;
                    annulus[a * nr + b] += ext.iter().any(|&(lo, hi)| lo <= r && hi >= 2.0 * r) as u64;
                }
            }
        }
        (theta, annulus)
    });
    let mut theta = vec![0u64; nl * nr];
    let mut annulus = vec![0u64; nl * nr];
    for (t, a) in &counts {
        for j in 0..nl * nr {
            theta[j] += t[j];
            annulus[j] += a[j];
        }
    }
    let mut rows = Vec::new();
    let mut split = None;
    for (a, &lambda) in lambdas.iter().enumerate() {
        let model = top.with_lambda(lambda);
        let err = trunc.padding(&model, 2.0 * r_max)?.error;
        let mut first = None;
        let mut last = None;
        for (b, &r) in radii.iter().enumerate() {
            let t = Estimate::proportion(theta[a * nr + b], replicas, seed);
            let an = Estimate::proportion(annulus[a * nr + b], replicas, seed);
            rows.push(BooleanRow::new(&model, r, "theta_r", &t, err));
            rows.push(BooleanRow::new(&model, r, "annulus", &an, err));
            first.get_or_insert(an);
            last = Some(an);
        }
        let (f, l) = (first.expect("radii"), last.expect("radii"));
        let sigma = (f.stderr.powi(2) + l.stderr.powi(2)).sqrt();
        let decaying = nr > 1 && l.value < f.value - BAND * sigma;
        if split.is_none() && !decaying {
            split = Some(lambda);
        }
    }
    Ok(ScanReport { rows, split, warnings })
}
