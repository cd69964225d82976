//! Radius laws and marked samples.

use super::window::{ball_volume, Window};
use crate::error::{invalid, Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Law of the ball radii.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RadiusLaw {
    Fixed(f64),
    Uniform(f64, f64),
    /// Density alpha r_min^alpha / r^(alpha+1) on [r_min, inf).
    Pareto { alpha: f64, r_min: f64 },
}

impl RadiusLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadiusLaw::Fixed(r) => r > 0.0 && r.is_finite(),
            RadiusLaw::Uniform(a, b) => a > 0.0 && a < b && b.is_finite(),
            RadiusLaw::Pareto { alpha, r_min } => alpha > 0.0 && r_min > 0.0 && alpha.is_finite() && r_min.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("radius law {self} has invalid parameters"))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform(a, b) => a + (b - a) * rng.random::<f64>(),
            RadiusLaw::Pareto { alpha, r_min } => r_min * (1.0 - rng.random::<f64>()).powf(-1.0 / alpha),
        }
    }

    /// E[rho^k], or `None` when infinite.
    pub fn moment(&self, k: f64) -> Option<f64> {
        match *self {
            RadiusLaw::Fixed(r) => Some(r.powf(k)),
            RadiusLaw::Uniform(a, b) => {
                if (k + 1.0).abs() < 1e-12 {
                    Some((b.ln() - a.ln()) / (b - a))
                } else {
                    Some((b.powf(k + 1.0) - a.powf(k + 1.0)) / ((k + 1.0) * (b - a)))
                }
            }
            RadiusLaw::Pareto { alpha, r_min } => (alpha > k).then(|| alpha * r_min.powf(k) / (alpha - k)),
        }
    }

    pub fn has_moment(&self, k: f64) -> bool {
        self.moment(k).is_some()
    }

    /// Largest possible radius, if bounded.
    pub fn max_radius(&self) -> Option<f64> {
        match *self {
            RadiusLaw::Fixed(r) => Some(r),
            RadiusLaw::Uniform(_, b) => Some(b),
            RadiusLaw::Pareto { .. } => None,
        }
    }

    pub fn min_radius(&self) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform(a, _) => a,
            RadiusLaw::Pareto { r_min, .. } => r_min,
        }
    }

    /// Smallest r with P[rho <= r] >= q, for q in (0, 1).
    pub fn quantile(&self, q: f64) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform(a, b) => a + q * (b - a),
            RadiusLaw::Pareto { alpha, r_min } => r_min * (1.0 - q).powf(-1.0 / alpha),
        }
    }

    /// Interval edges splitting the law into `k` equal-mass pieces. The last
    /// edge is infinite for unbounded laws.
    pub fn quantile_edges(&self, k: usize) -> Vec<f64> {
        let mut edges: Vec<f64> = (0..k).map(|i| self.quantile(i as f64 / k as f64)).collect();
        edges[0] = self.min_radius();
        edges.push(self.max_radius().map_or(f64::INFINITY, |m| m * (1.0 + 1e-12)));
        edges
    }

    /// P[lo <= rho <= hi].
    pub fn interval(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        match *self {
            RadiusLaw::Fixed(r) => (lo <= r && r <= hi) as u8 as f64,
            RadiusLaw::Uniform(a, b) => ((hi.min(b) - lo.max(a)).max(0.0)) / (b - a),
            RadiusLaw::Pareto { alpha, r_min } => {
                let cdf = |x: f64| if x <= r_min { 0.0 } else { 1.0 - (r_min / x).powf(alpha) };
                (cdf(hi) - cdf(lo)).max(0.0)
            }
        }
    }

    /// P[rho > t].
    pub fn tail(&self, t: f64) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => (r > t) as u8 as f64,
            RadiusLaw::Uniform(a, b) => ((b - t.max(a)) / (b - a)).clamp(0.0, 1.0),
            RadiusLaw::Pareto { alpha, r_min } => if t < r_min { 1.0 } else { (r_min / t).powf(alpha) },
        }
    }

    /// E[(s + rho)^d ; rho > t], or `None` when infinite.
    pub fn shifted_tail_moment(&self, s: f64, d: usize, t: f64) -> Option<f64> {
        match *self {
            RadiusLaw::Fixed(r) => Some(if r > t { (s + r).powi(d as i32) } else { 0.0 }),
            RadiusLaw::Uniform(a, b) => {
                let lo = t.max(a);
                if lo >= b {
                    return Some(0.0);
                }
                let prim = |x: f64| (s + x).powi(d as i32 + 1) / (d as f64 + 1.0);
                Some((prim(b) - prim(lo)) / (b - a))
            }
            RadiusLaw::Pareto { alpha, r_min } => {
                if alpha <= d as f64 {
                    return None;
                }
                let lo = t.max(r_min);
                // Binomial expansion of (s + rho)^d against the Pareto density.
                let mut total = 0.0;
                let mut binom = 1.0;
                for j in 0..=d {
                    if j > 0 {
                        binom *= (d - j + 1) as f64 / j as f64;
                    }
                    let integral = alpha * r_min.powf(alpha) * lo.powf(j as f64 - alpha) / (alpha - j as f64);
                    total += binom * s.powi((d - j) as i32) * integral;
                }
                Some(total)
            }
        }
    }
}

impl fmt::Display for RadiusLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusLaw::Fixed(r) => write!(f, "fixed:{r:?}"),
            RadiusLaw::Uniform(a, b) => write!(f, "uniform:{a:?}:{b:?}"),
            RadiusLaw::Pareto { alpha, r_min } => write!(f, "pareto:{alpha:?}:{r_min:?}"),
        }
    }
}

impl FromStr for RadiusLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<RadiusLaw> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidParameter(format!("radius law '{s}' is missing a parameter")))?
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("radius law '{s}' has a bad number")))
        };
        let law = match (parts[0], parts.len()) {
            ("fixed", 2) => RadiusLaw::Fixed(num(1)?),
            ("uniform", 3) => RadiusLaw::Uniform(num(1)?, num(2)?),
            ("pareto", 3) => RadiusLaw::Pareto { alpha: num(1)?, r_min: num(2)? },
            _ => return invalid(format!("unknown radius law '{s}' (fixed:r, uniform:a:b, pareto:alpha:rmin)")),
        };
        law.validate()?;
        Ok(law)
    }
}

/// Balls of one realization of the marked process in a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedSample {
    pub d: usize,
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
    pub window: Window,
    pub lambda: f64,
    pub nu: Option<RadiusLaw>,
    pub seed: u64,
    /// Padding added around the observation region, if any.
    pub padding: f64,
}

impl MarkedSample {
    /// Hand-built sample, mainly for tests and regressions.
    pub fn from_balls(d: usize, balls: &[(Vec<f64>, f64)]) -> MarkedSample {
        let mut centers = Vec::with_capacity(balls.len() * d);
        let mut radii = Vec::with_capacity(balls.len());
        for (c, r) in balls {
            assert_eq!(c.len(), d);
            centers.extend_from_slice(c);
            radii.push(*r);
        }
        let reach = balls.iter().map(|(c, r)| super::window::norm(c) + r).fold(1.0, f64::max);
        MarkedSample {
            d,
            centers,
            radii,
            window: Window::centered_ball(d, reach),
            lambda: 0.0,
            nu: None,
            seed: 0,
            padding: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.d..(i + 1) * self.d]
    }

    pub fn push(&mut self, center: &[f64], r: f64) {
        self.centers.extend_from_slice(center);
        self.radii.push(r);
    }

    /// Balls kept by `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> MarkedSample {
        let mut out = MarkedSample { centers: Vec::new(), radii: Vec::new(), ..self.clone() };
        for i in (0..self.len()).filter(|&i| keep(i)) {
            out.push(self.center(i), self.radii[i]);
        }
        out
    }

    /// Joint rescale of centers and radii by `s`.
    pub fn scaled(&self, s: f64) -> MarkedSample {
        MarkedSample {
            centers: self.centers.iter().map(|c| c * s).collect(),
            radii: self.radii.iter().map(|r| r * s).collect(),
            ..self.clone()
        }
    }

    /// CSV with columns x1..xd,r.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.d).map(|i| format!("x{i}")).collect();
        header.push("r".into());
        out.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.center(i).iter().map(|v| format!("{v:?}")).collect();
            rec.push(format!("{:?}", self.radii[i]));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Metadata sidecar for the CSV.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "window": self.window,
            "lambda": self.lambda,
            "nu": self.nu.map(|n| n.to_string()),
            "seed": self.seed,
            "padding": self.padding,
            "count": self.len(),
        })
    }
}

/// Marked Poisson process: centers PPP(lambda) in the window, radii iid.
pub fn sample_marked<R: Rng + ?Sized>(lambda: f64, nu: RadiusLaw, window: &Window, rng: &mut R) -> Result<MarkedSample> {
    nu.validate()?;
    let points = super::sample_homogeneous(lambda, window, rng)?;
    let radii = (0..points.len()).map(|_| nu.sample(rng)).collect();
    Ok(MarkedSample {
        d: window.dim(),
        centers: points.coords,
        radii,
        window: window.clone(),
        lambda,
        nu: Some(nu),
        seed: 0,
        padding: 0.0,
    })
}

/// Expected number of balls of radius law `nu` at intensity `lambda` that
/// cover a fixed point.
pub fn covering_mass(d: usize, lambda: f64, nu: &RadiusLaw) -> Option<f64> {
    nu.moment(d as f64).map(|m| lambda * ball_volume(d, 1.0) * m)
}
