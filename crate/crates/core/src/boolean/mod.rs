//! Poisson-Boolean model: balls centered at a Poisson process with iid radii.

mod discretize;
mod events;
mod exploration;
mod graph;
mod insertion;
mod model;
mod region;
mod russo;
mod scan;

pub use discretize::{discretize, exact_tangencies, DiscreteReport, NearTangency};
pub use events::{connects, event_p_x_n, restricted_graph};
pub use exploration::{
    continuum_revealment, integrated_connection_check, CellRevealment, ContinuumExploration, ExplorationTrace,
    IntegratedCheck,
};
pub use graph::{brute_force_edges, BallGraph};
pub use insertion::{admissible_mass, insertion_tolerance, InsertionReport, StarPair};
pub use model::{
    estimate_annulus, estimate_theta_r, missed_balls, moment_check, truncation_check, vacancy_probability,
    BooleanEstimate, BooleanModel, BooleanRow, Padding, TruncationCheck, TruncationPolicy, VacancyReport,
    DEFAULT_TRUNC_EPS,
};
pub use region::Region;
pub use russo::{verify_russo_continuum, ContinuumEvent, ContinuumRussoReport, GHOSTS};
pub use scan::{lambda_scan, ScanReport};

#[cfg(test)]
mod tests;
