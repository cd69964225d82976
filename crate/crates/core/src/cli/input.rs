use crate::bernoulli::BernoulliRow;
use crate::boolean::BooleanRow;
use crate::error::{invalid, Error, Result};
use crate::sharpness::{Curve, CurvePoint};
use std::path::Path;

/// "a:b:step" to the inclusive grid a, a + step, ..., b.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad grid '{s}'"))))
        .collect::<Result<_>>()?;
    match nums[..] {
        [x] => Ok(vec![x]),
        [a, b, step] if step > 0.0 && b >= a => {
            let k = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=k).map(|i| ((a + i as f64 * step) * 1e10).round() / 1e10).collect())
        }
        _ => invalid(format!("grid '{s}' must be a:b:step with step > 0 and b >= a")),
    }
}

/// Reads a Bernoulli CSV (parameter p, scale n) or the theta_r rows of a
/// Boolean CSV (parameter lambda, scale r).
pub fn read_curve(path: &Path) -> Result<Curve> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let has = |h: &str| headers.iter().any(|x| x == h);
    let source = path.display().to_string();
    let mut points = Vec::new();
    let mut replicas = 0;
    if has("n") && has("p") {
        for row in rdr.deserialize::<BernoulliRow>() {
            let r = row?;
            if r.model != "theta" {
                continue;
            }
            replicas = replicas.max(r.replicas);
            points.push(CurvePoint { param: r.p, scale: r.n as f64, estimate: r.estimate, stderr: r.stderr });
        }
    } else if has("lambda") && has("r") && has("stat") {
        for row in rdr.deserialize::<BooleanRow>() {
            let r = row?;
            if r.stat != "theta_r" {
                continue;
            }
            replicas = replicas.max(r.replicas);
            points.push(CurvePoint { param: r.lambda, scale: r.r, estimate: r.estimate, stderr: r.stderr });
        }
    } else {
        return Err(Error::Input(format!("{source}: header matches neither the Bernoulli nor the Boolean schema")));
    }
    if points.is_empty() {
        return Err(Error::Input(format!("{source}: no theta rows")));
    }
    Ok(Curve { points, replicas, coupled: false, source })
}
