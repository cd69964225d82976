//! Bernoulli grid approximation of a homogeneous PPP.

use super::window::Window;
use super::PointSample;
use crate::error::{invalid, Error, Result};
use crate::rng::{chunked, stream, tag};
use crate::stats::{tv_to_poisson, Verdict};
use rand::Rng;
use serde::Serialize;

fn sites_per_axis(eps: f64, window: &Window) -> Result<Vec<usize>> {
    let Window::Box { lo, hi } = window else {
        return Err(Error::Unsupported("grid approximation needs a box window".into()));
    };
    if !window.is_valid() {
        return invalid("window is degenerate");
    }
    if !(eps > 0.0) {
        return invalid(format!("grid spacing must be positive, got {eps}"));
    }
    lo.iter()
        .zip(hi)
        .map(|(a, b)| {
            let m = (b - a) / eps;
            let r = m.round();
            if r < 1.0 || (m - r).abs() > 1e-9 * m.max(1.0) {
                invalid(format!("side {} is not a multiple of the grid spacing {eps}", b - a))
            } else {
                Ok(r as usize)
            }
        })
        .collect()
}

fn site_probability(eps: f64, lambda: f64, d: usize) -> Result<f64> {
    if !(lambda >= 0.0) {
        return invalid(format!("intensity must be non-negative, got {lambda}"));
    }
    let q = lambda * eps.powi(d as i32);
    if q > 1.0 {
        return invalid(format!("site probability lambda*eps^d = {q} exceeds 1"));
    }
    Ok(q)
}

/// One point at each site of the eps-grid in the window (the lower corners
/// of the eps-cells), independently with probability lambda * eps^d.
pub fn grid_approximation<R: Rng + ?Sized>(eps: f64, lambda: f64, window: &Window, rng: &mut R) -> Result<PointSample> {
    let per_axis = sites_per_axis(eps, window)?;
    let d = per_axis.len();
    let q = site_probability(eps, lambda, d)?;
    let (lo, _) = window.bounds();
    let total: usize = per_axis.iter().product();
    let mut coords = Vec::new();
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        if q > 0.0 && rng.random::<f64>() < q {
            coords.extend(idx.iter().zip(&lo).map(|(i, l)| l + *i as f64 * eps));
        }
        for a in (0..d).rev() {
            idx[a] += 1;
            if idx[a] < per_axis[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(PointSample { d, coords, window: window.clone(), seed: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridTvRow {
    pub eps: f64,
    pub sites: usize,
    pub site_probability: f64,
    pub mean: f64,
    pub tv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridTvReport {
    pub lambda: f64,
    pub runs: u64,
    pub rows: Vec<GridTvRow>,
    pub monotone: bool,
    pub verdict: Verdict,
}

/// Total-variation distance between the grid count histogram and
/// Poisson(lambda |window|) for each spacing, in the given order. The
/// verdict requires the distance to strictly decrease along the ladder.
pub fn grid_tv_ladder(eps_list: &[f64], lambda: f64, window: &Window, runs: u64, seed: u64) -> Result<GridTvReport> {
    if eps_list.is_empty() {
        return invalid("empty spacing ladder");
    }
    if runs == 0 {
        return invalid("runs must be at least 1");
    }
    let mass = lambda * window.volume();
    let mut rows = Vec::with_capacity(eps_list.len());
    for (level, &eps) in eps_list.iter().enumerate() {
        let per_axis = sites_per_axis(eps, window)?;
        let q = site_probability(eps, lambda, per_axis.len())?;
        let sites: usize = per_axis.iter().product();
        let key = crate::rng::derive(seed, level as u64);
        let counts: Vec<usize> = chunked(runs, |s, e| {
            (s..e)
                .map(|i| grid_approximation(eps, lambda, window, &mut stream(key, tag::GRID, i)).expect("validated").len())
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        let mut hist = vec![0u64; counts.iter().copied().max().unwrap_or(0) + 1];
        for &c in &counts {
            hist[c] += 1;
        }
        let mean = counts.iter().sum::<usize>() as f64 / runs as f64;
        rows.push(GridTvRow { eps, sites, site_probability: q, mean, tv: tv_to_poisson(&hist, mass) });
    }
    let monotone = rows.windows(2).all(|w| w[1].tv < w[0].tv);
    Ok(GridTvReport { lambda, runs, rows, monotone, verdict: Verdict::exact(monotone) })
}
