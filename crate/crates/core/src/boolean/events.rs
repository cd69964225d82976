//! Connection events on a sample.

use super::graph::BallGraph;
use super::region::Region;
use crate::ppp::{MarkedSample, Window};

/// Ball graph of the sample, or of its induced process on `zone`: only the
/// balls entirely inside the zone take part.
pub fn restricted_graph(sample: &MarkedSample, zone: Option<&Window>) -> BallGraph {
    match zone {
        None => BallGraph::build(sample),
        Some(z) => BallGraph::build(&sample.filter(|i| z.contains_ball(sample.center(i), sample.radii[i]))),
    }
}

/// a <-> b in the occupied set of the sample (or of its induced process).
pub fn connects(sample: &MarkedSample, a: &Region, b: &Region, zone: Option<&Window>) -> bool {
    restricted_graph(sample, zone).connects(a, b)
}

/// The event {0 <-> B(x, n)} and {B(x, n) <-> S_r} and not {0 <-> S_r}.
/// When B(x, n) itself meets S_r the middle clause holds.
pub fn event_p_x_n(sample: &MarkedSample, x: &[f64], n: f64, r: f64) -> bool {
    let g = BallGraph::build(sample);
    let d = sample.d;
    let origin = Region::origin(d);
    let target = Region::ball(x, n);
    let sphere = Region::centered_sphere(d, r);
    g.connects(&origin, &target) && g.connects(&target, &sphere) && !g.connects(&origin, &sphere)
}
