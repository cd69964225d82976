use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

pub fn ball_volume(d: usize, r: f64) -> f64 {
    unit_ball_volume(d) * r.powi(d as i32)
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Bounded sampling region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Window {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Window {
    pub fn unit_cube(d: usize) -> Window {
        Window::Box { lo: vec![0.0; d], hi: vec![1.0; d] }
    }

    pub fn cube(lo: &[f64], hi: &[f64]) -> Window {
        Window::Box { lo: lo.to_vec(), hi: hi.to_vec() }
    }

    pub fn centered_ball(d: usize, radius: f64) -> Window {
        Window::Ball { center: vec![0.0; d], radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Box { lo, .. } => lo.len(),
            Window::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            Window::Box { lo, hi } => {
                !lo.is_empty() && lo.len() == hi.len() && lo.iter().zip(hi).all(|(a, b)| a < b && a.is_finite() && b.is_finite())
            }
            Window::Ball { center, radius } => !center.is_empty() && *radius > 0.0 && radius.is_finite(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Window::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Window::Ball { center, radius } => ball_volume(center.len(), *radius),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Window::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v < *b),
            Window::Ball { center, radius } => distance(x, center) <= *radius,
        }
    }

    /// True iff the closed ball B(x, r) lies inside the window.
    pub fn contains_ball(&self, x: &[f64], r: f64) -> bool {
        match self {
            Window::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v - r >= *a && v + r <= *b),
            Window::Ball { center, radius } => distance(x, center) + r <= *radius,
        }
    }

    /// Uniform point, written into `out`.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Window::Box { lo, hi } => {
                for (o, (a, b)) in out.iter_mut().zip(lo.iter().zip(hi)) {
                    *o = a + (b - a) * rng.random::<f64>();
                }
            }
            Window::Ball { center, radius } => {
                let d = center.len();
                if d == 2 {
                    loop {
                        let x = 2.0 * rng.random::<f64>() - 1.0;
                        let y = 2.0 * rng.random::<f64>() - 1.0;
                        if x * x + y * y <= 1.0 {
                            out[0] = center[0] + radius * x;
                            out[1] = center[1] + radius * y;
                            return;
                        }
                    }
                }
                let mut s = 0.0;
                for o in out.iter_mut() {
                    *o = rng.sample::<f64, _>(StandardNormal);
                    s += *o * *o;
                }
                let scale = radius * rng.random::<f64>().powf(1.0 / d as f64) / s.sqrt();
                for (o, c) in out.iter_mut().zip(center) {
                    *o = c + *o * scale;
                }
            }
        }
    }

    /// Lebesgue measure of the intersection of two boxes.
    pub fn box_overlap(&self, other: &Window) -> Option<f64> {
        match (self, other) {
            (Window::Box { lo: a0, hi: a1 }, Window::Box { lo: b0, hi: b1 }) => Some(
                (0..a0.len())
                    .map(|i| (a1[i].min(b1[i]) - a0[i].max(b0[i])).max(0.0))
                    .product(),
            ),
            _ => None,
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Window::Box { lo, hi } => (lo.clone(), hi.clone()),
            Window::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }
}
