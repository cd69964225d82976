use crate::ppp::distance;

/// Target set for connection queries. A point is a ball of radius zero.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Ball { center: Vec<f64>, radius: f64 },
    Sphere { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

fn box_distances(x: &[f64], lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for i in 0..x.len() {
        let below = lo[i] - x[i];
        let above = x[i] - hi[i];
        let gap = below.max(above).max(0.0);
        near += gap * gap;
        let reach = (x[i] - lo[i]).abs().max((hi[i] - x[i]).abs());
        far += reach * reach;
    }
    (near.sqrt(), far.sqrt())
}

impl Region {
    pub fn point(x: &[f64]) -> Region {
        Region::Ball { center: x.to_vec(), radius: 0.0 }
    }

    pub fn origin(d: usize) -> Region {
        Region::point(&vec![0.0; d])
    }

    pub fn ball(center: &[f64], radius: f64) -> Region {
        Region::Ball { center: center.to_vec(), radius }
    }

    pub fn sphere(center: &[f64], radius: f64) -> Region {
        Region::Sphere { center: center.to_vec(), radius }
    }

    pub fn centered_sphere(d: usize, radius: f64) -> Region {
        Region::sphere(&vec![0.0; d], radius)
    }

    /// Unit cell x + [0,1)^d of an integer point.
    pub fn unit_cell(x: &[i64]) -> Region {
        Region::Box {
            lo: x.iter().map(|&v| v as f64).collect(),
            hi: x.iter().map(|&v| v as f64 + 1.0).collect(),
        }
    }

    /// Smallest and largest distance from `x` to the region.
    pub fn distances(&self, x: &[f64]) -> (f64, f64) {
        match self {
            Region::Ball { center, radius } => {
                let t = distance(x, center);
                ((t - radius).max(0.0), t + radius)
            }
            Region::Sphere { center, radius } => {
                let t = distance(x, center);
                ((t - radius).abs(), t + radius)
            }
            Region::Box { lo, hi } => box_distances(x, lo, hi),
        }
    }

    /// Distance from the closed ball B(z, rho) to the region.
    pub fn gap_to_ball(&self, z: &[f64], rho: f64) -> f64 {
        (self.distances(z).0 - rho).max(0.0)
    }

    /// True iff the closed ball B(z, rho) meets the region.
    pub fn meets_ball(&self, z: &[f64], rho: f64) -> bool {
        self.distances(z).0 <= rho
    }

    /// True iff the two regions intersect.
    pub fn meets(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::Ball { center, radius }, o) | (o, Region::Ball { center, radius }) => o.meets_ball(center, *radius),
            (Region::Sphere { center: c1, radius: r1 }, Region::Sphere { center: c2, radius: r2 }) => {
                let t = distance(c1, c2);
                (r1 - r2).abs() <= t && t <= r1 + r2
            }
            (Region::Sphere { center, radius }, Region::Box { lo, hi })
            | (Region::Box { lo, hi }, Region::Sphere { center, radius }) => {
                let (near, far) = box_distances(center, lo, hi);
                near <= *radius && *radius <= far
            }
            (Region::Box { lo: a0, hi: a1 }, Region::Box { lo: b0, hi: b1 }) => {
                (0..a0.len()).all(|i| a0[i].max(b0[i]) <= a1[i].min(b1[i]))
            }
        }
    }
}
