use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "percolab", version, about = "Percolation laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum Command {
    /// Monte Carlo for Bernoulli bond percolation.
    #[command(subcommand)]
    Bernoulli(BernoulliCmd),
    /// Exhaustive enumeration on small boxes.
    #[command(subcommand)]
    Exact(ExactCmd),
    /// OSSS inequality, revealments and the differential chain.
    #[command(subcommand)]
    Osss(OsssCmd),
    /// Poisson point process laws.
    #[command(subcommand)]
    Ppp(PppCmd),
    /// Poisson-Boolean model.
    #[command(subcommand)]
    Boolean(BooleanCmd),
    /// Partial sums, the differential inequality and fits.
    #[command(subcommand)]
    Sharp(SharpCmd),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

/// Flags shared by every run.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Common {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory for CSV files and the manifest.
    #[arg(long, default_value = "percolab-out")]
    pub out: PathBuf,
    /// Worker threads; falls back to PERCOLAB_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum BernoulliCmd {
    /// theta_n(p) at one cell.
    Theta {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// theta_k(p) for k = 0..=n over a parameter grid.
    Curve {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "p-grid")]
        p_grid: String,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        /// Independent streams per cell instead of shared uniforms.
        #[arg(long)]
        independent: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Bisection for the parameter where the square crossing probability is 1/2.
    Pc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        replicas: u64,
        #[arg(long, default_value_t = 0.005)]
        resolution: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum ExactCmd {
    /// Russo's formula for {0 <-> boundary} by enumeration.
    Russo {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// FKG for {0 <-> boundary} against a left-right crossing and its complement.
    Fkg {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgorithmKind {
    /// Exploration from the sphere of radius k.
    Exploration,
    /// Edges in index order.
    Sequential,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum OsssCmd {
    /// Both OSSS inequalities for {0 <-> boundary}; replicas 0 means exact.
    Verify {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = AlgorithmKind::Exploration)]
        algorithm: AlgorithmKind,
        /// Sphere radius of the exploration.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Sum over k of the exploration revealments against 4 Sigma_n.
    Revealment {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// n theta (1 - theta) <= 8p(1-p) Sigma theta' <= 2 Sigma theta'.
    Diffcheck {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// Half-width of the centered difference.
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 0)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeckeKind {
    All,
    Indicator,
    CountWeight,
    PairwiseKernel,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum PppCmd {
    /// Count histogram, void probability and independence on the unit cube.
    Counts {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Mecke identities on the unit cube.
    Mecke {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = MeckeKind::All)]
        family: MeckeKind,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Superposition of two independent processes.
    Superpose {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        lambda2: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Total variation of the grid approximation over a spacing ladder.
    Grid {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RussoEvent {
    /// The origin is covered.
    Covered,
    /// The origin is joined to the sphere of radius --r.
    Sphere,
}

/// Model flags of the Boolean commands.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BooleanModelArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub lambda: f64,
    /// Radius law: fixed:R, uniform:A:B or pareto:ALPHA:RMIN.
    #[arg(long, default_value = "fixed:1")]
    pub nu: String,
    #[arg(long = "trunc-eps", default_value_t = crate::boolean::DEFAULT_TRUNC_EPS)]
    pub trunc_eps: f64,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum BooleanCmd {
    /// theta_r = P[0 <-> S_r] for each radius.
    Theta {
        #[command(flatten)]
        model: BooleanModelArgs,
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// P[S_r <-> S_2r] for each radius.
    Annulus {
        #[command(flatten)]
        model: BooleanModelArgs,
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// P[0 not covered] against its closed form.
    Vacancy {
        #[command(flatten)]
        model: BooleanModelArgs,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Insertion tolerance constant at a lattice point.
    Cit {
        #[command(flatten)]
        model: BooleanModelArgs,
        /// Lattice point, comma separated; the origin by default.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<i64>,
        #[arg(long)]
        inner: f64,
        #[arg(long)]
        outer: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// theta_r and annulus crossings over an intensity grid, coupled by thinning.
    Scan {
        #[command(flatten)]
        model: BooleanModelArgs,
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[arg(long = "lambda-grid")]
        lambda_grid: String,
        #[arg(long, default_value_t = 2000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Continuum Russo formula: finite difference against the pivotal functional.
    Russo {
        #[command(flatten)]
        model: BooleanModelArgs,
        #[arg(long, value_enum, default_value_t = RussoEvent::Covered)]
        event: RussoEvent,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Half-width of the finite difference in lambda.
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumKind {
    Discrete,
    Continuum,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// exp(-n a(p)) h(p) with a C^1 rate profile vanishing above --transition.
    Rate,
    /// min(1, exp(n (p - 1/2))).
    Exp,
    /// f_n = 1.
    Constant,
}

/// Where a theta curve comes from: a CSV written by `bernoulli curve` or
/// `boolean theta|scan`, or a fresh coupled Bernoulli curve.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CurveSource {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Treat estimates from --in as coupled across parameters.
    #[arg(long)]
    pub coupled: bool,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Largest scale of a generated curve.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long = "p-grid", default_value = "0.29:0.71:0.01")]
    pub p_grid: String,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: u64,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum SharpCmd {
    /// Partial sums of theta.
    Sums {
        #[command(flatten)]
        source: CurveSource,
        #[arg(long, value_enum, default_value_t = SumKind::Discrete)]
        mode: SumKind,
        #[command(flatten)]
        common: Common,
    },
    /// theta' >= c (scale / Sigma) theta (1 - theta) cell by cell.
    Check {
        #[command(flatten)]
        source: CurveSource,
        #[arg(long, value_enum, default_value_t = SumKind::Discrete)]
        mode: SumKind,
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        /// Continuum mode: skip intensities below this estimate of the critical point.
        #[arg(long)]
        gate: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Log-linear decay of theta_n in n at each parameter.
    Fitdecay {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.4")]
        p: Vec<f64>,
        #[arg(long = "scales", value_delimiter = ',', default_value = "8,16,24,32")]
        scales: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Linear envelope theta >= c (p - pc) at one scale.
    Fitgrowth {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Scale at which the envelope is fitted.
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long = "p-grid", default_value = "0.55:0.7:0.05")]
        p_grid: String,
        #[arg(long, default_value_t = 0.5)]
        pc: f64,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the inequality lemma on a synthetic family.
    Lemma {
        #[arg(long, value_enum, default_value_t = FamilyKind::Rate)]
        family: FamilyKind,
        #[arg(long, default_value_t = 0.4321)]
        transition: f64,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Path to a manifest.json written by an earlier run.
    pub manifest: PathBuf,
}

impl Command {
    /// Space-separated subcommand path, e.g. "bernoulli theta".
    pub fn name(&self) -> String {
        let v = serde_json::to_value(self).unwrap_or_default();
        let mut parts = Vec::new();
        let mut cur = &v;
        while parts.len() < 2 {
            let serde_json::Value::Object(m) = cur else { break };
            let Some((k, inner)) = m.iter().next().filter(|_| m.len() == 1) else { break };
            parts.push(k.to_lowercase());
            cur = inner;
        }
        parts.join(" ")
    }

    pub fn common(&self) -> Option<&Common> {
        use BernoulliCmd as B;
        use BooleanCmd as L;
        use ExactCmd as E;
        use OsssCmd as O;
        use PppCmd as P;
        use SharpCmd as S;
        Some(match self {
            Command::Bernoulli(B::Theta { common, .. } | B::Curve { common, .. } | B::Pc { common, .. }) => common,
            Command::Exact(E::Russo { common, .. } | E::Fkg { common, .. }) => common,
            Command::Osss(O::Verify { common, .. } | O::Revealment { common, .. } | O::Diffcheck { common, .. }) => common,
            Command::Ppp(
                P::Counts { common, .. } | P::Mecke { common, .. } | P::Superpose { common, .. } | P::Grid { common, .. },
            ) => common,
            Command::Boolean(
                L::Theta { common, .. }
                | L::Annulus { common, .. }
                | L::Vacancy { common, .. }
                | L::Cit { common, .. }
                | L::Scan { common, .. }
                | L::Russo { common, .. },
            ) => common,
            Command::Sharp(
                S::Sums { common, .. }
                | S::Check { common, .. }
                | S::Fitdecay { common, .. }
                | S::Fitgrowth { common, .. }
                | S::Lemma { common, .. },
            ) => common,
            Command::Replay(_) => return None,
        })
    }
}
