//! C ABI for percolab.
//!
//! Objects cross the boundary as opaque handles created by `*_new` or
//! `*_sample` and released by the matching `*_free`. Every fallible call
//! returns a `PercolabStatus`; on failure the message is kept per thread
//! and read with `percolab_last_error`.

use percolab::boolean::{vacancy_probability, BooleanModel, TruncationPolicy};
use percolab::exact::ExactEngine;
use percolab::lattice::event::OriginToSphere;
use percolab::lattice::{connected_to_boundary, Configuration, LatticeGraph};
use percolab::ppp::RadiusLaw;
use percolab::rng::{stream, tag};
use percolab::{Error, Verdict};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PercolabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    CapExceeded = 3,
    Budget = 4,
    Unsupported = 5,
    Algorithm = 6,
    Hypothesis = 7,
    InfiniteMoment = 8,
    Input = 9,
    Io = 10,
    Panic = 11,
}

/// Verdict of a statistical or exact check.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PercolabVerdict {
    Pass = 0,
    Inconclusive = 1,
    Fail = 2,
}

impl From<Verdict> for PercolabVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => PercolabVerdict::Pass,
            Verdict::Inconclusive => PercolabVerdict::Inconclusive,
            Verdict::Fail => PercolabVerdict::Fail,
        }
    }
}

/// Box of radius n in Z^d with its edge list.
pub struct PercolabLattice {
    graph: LatticeGraph,
}

/// Open/closed state of every edge of one lattice.
pub struct PercolabConfig {
    config: Configuration,
    edges: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PercolabEstimate {
    pub value: f64,
    pub std_error: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PercolabRusso {
    pub probability: f64,
    pub derivative: f64,
    pub pivotal_sum: f64,
    pub covariance_sum: f64,
    /// 1 when both residuals are within tolerance.
    pub pass: i32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PercolabVacancy {
    pub closed_form: f64,
    pub estimate: PercolabEstimate,
    pub verdict: PercolabVerdict,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PercolabStatus {
    match e {
        Error::InvalidParameter(_) => PercolabStatus::InvalidParameter,
        Error::CapExceeded { .. } => PercolabStatus::CapExceeded,
        Error::Budget(_) => PercolabStatus::Budget,
        Error::Unsupported(_) => PercolabStatus::Unsupported,
        Error::Algorithm(_) => PercolabStatus::Algorithm,
        Error::Hypothesis(_) => PercolabStatus::Hypothesis,
        Error::InfiniteMoment(_) => PercolabStatus::InfiniteMoment,
        Error::Input(_) | Error::Csv(_) | Error::Json(_) => PercolabStatus::Input,
        Error::Io(_) => PercolabStatus::Io,
    }
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> percolab::Result<()>) -> PercolabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PercolabStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            PercolabStatus::Panic
        }
    }
}

macro_rules! require {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(format!("null pointer: {}", stringify!($p)));
            return PercolabStatus::NullPointer;
        })+
    };
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn percolab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn percolab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates the box of radius `n` in Z^`d`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn percolab_lattice_new(d: usize, n: usize, out: *mut *mut PercolabLattice) -> PercolabStatus {
    require!(out);
    guard(|| {
        let graph = LatticeGraph::new(d, n)?;
        *out = Box::into_raw(Box::new(PercolabLattice { graph }));
        Ok(())
    })
}

/// Releases a lattice. Null is accepted.
///
/// # Safety
/// `lattice` must come from `percolab_lattice_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn percolab_lattice_free(lattice: *mut PercolabLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Vertex and edge counts of a lattice.
///
/// # Safety
/// All pointers must be valid; `lattice` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn percolab_lattice_counts(
    lattice: *const PercolabLattice,
    vertices: *mut usize,
    edges: *mut usize,
) -> PercolabStatus {
    require!(lattice, vertices, edges);
    let g = &(*lattice).graph;
    *vertices = g.vertex_count();
    *edges = g.edge_count();
    set_error(String::new());
    PercolabStatus::Ok
}

/// Samples each edge open with probability `p` from the stream of `seed`.
///
/// # Safety
/// `lattice` must be a live handle and `out` valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn percolab_config_sample(
    lattice: *const PercolabLattice,
    p: f64,
    seed: u64,
    out: *mut *mut PercolabConfig,
) -> PercolabStatus {
    require!(lattice, out);
    guard(|| {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
        }
        let edges = (*lattice).graph.edge_count();
        let config = Configuration::sample(edges, p, &mut stream(seed, tag::CONFIG, 0));
        *out = Box::into_raw(Box::new(PercolabConfig { config, edges }));
        Ok(())
    })
}

/// Releases a configuration. Null is accepted.
///
/// # Safety
/// `config` must come from `percolab_config_sample` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn percolab_config_free(config: *mut PercolabConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Number of open edges.
///
/// # Safety
/// `config` must be a live handle and `open` valid.
#[no_mangle]
pub unsafe extern "C" fn percolab_config_open_count(config: *const PercolabConfig, open: *mut usize) -> PercolabStatus {
    require!(config, open);
    *open = (*config).config.count_open();
    set_error(String::new());
    PercolabStatus::Ok
}

/// Writes 1 to `result` if the origin reaches the boundary through open edges.
///
/// # Safety
/// Both handles must be live and `result` valid; the configuration must
/// have been sampled on this lattice.
#[no_mangle]
pub unsafe extern "C" fn percolab_connected_to_boundary(
    lattice: *const PercolabLattice,
    config: *const PercolabConfig,
    result: *mut i32,
) -> PercolabStatus {
    require!(lattice, config, result);
    guard(|| {
        let (g, c) = (&(*lattice).graph, &*config);
        if c.edges != g.edge_count() {
            return Err(Error::InvalidParameter("configuration belongs to another lattice".into()));
        }
        *result = connected_to_boundary(&c.config, g) as i32;
        Ok(())
    })
}

/// Monte Carlo estimate of theta_n(p) on Z^d.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn percolab_estimate_theta(
    d: usize,
    n: usize,
    p: f64,
    replicas: u64,
    seed: u64,
    out: *mut PercolabEstimate,
) -> PercolabStatus {
    require!(out);
    guard(|| {
        let e = percolab::bernoulli::estimate_theta_n(d, n, p, replicas, seed)?;
        *out = PercolabEstimate { value: e.value, std_error: e.stderr };
        Ok(())
    })
}

/// Russo's formula for {0 <-> boundary} on the box of radius n, by enumeration.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn percolab_exact_russo(d: usize, n: usize, p: f64, out: *mut PercolabRusso) -> PercolabStatus {
    require!(out);
    guard(|| {
        let g = LatticeGraph::new(d, n)?;
        let r = ExactEngine::new(&g)?.verify_russo(&OriginToSphere { k: n }, p)?;
        *out = PercolabRusso {
            probability: r.probability,
            derivative: r.derivative,
            pivotal_sum: r.pivotal_sum.unwrap_or(f64::NAN),
            covariance_sum: r.covariance_sum,
            pass: r.pass as i32,
        };
        Ok(())
    })
}

/// Vacancy probability of the Boolean model with radius law `nu`
/// ("fixed:1", "uniform:0.5:1.5", "pareto:2.5:1").
///
/// # Safety
/// `nu` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn percolab_boolean_vacancy(
    d: usize,
    lambda: f64,
    nu: *const c_char,
    replicas: u64,
    seed: u64,
    trunc_eps: f64,
    out: *mut PercolabVacancy,
) -> PercolabStatus {
    require!(nu, out);
    guard(|| {
        let text = std::ffi::CStr::from_ptr(nu)
            .to_str()
            .map_err(|_| Error::InvalidParameter("radius law is not UTF-8".into()))?;
        let law: RadiusLaw = text.parse()?;
        let model = BooleanModel::new(d, lambda, law)?;
        let r = vacancy_probability(&model, replicas, &TruncationPolicy { eps: trunc_eps }, seed)?;
        *out = PercolabVacancy {
            closed_form: r.closed_form,
            estimate: PercolabEstimate { value: r.mc.value, std_error: r.mc.stderr },
            verdict: r.verdict.into(),
        };
        Ok(())
    })
}
