//! Command-line front end: argument parsing, run manifests and replay.

mod args;
mod input;
mod run;

pub use args::{Cli, Command};
pub use input::{parse_grid, read_curve};
pub use run::{csv_bytes, execute, Outcome};

use crate::error::{Error, Result};
use crate::stats::Verdict;
use clap::Parser;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand path, e.g. "bernoulli theta".
    pub command: String,
    /// Full parsed parameter set; replay runs exactly this.
    pub args: Command,
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub verdict: String,
    /// File name to SHA-256 hex digest.
    pub outputs: BTreeMap<String, String>,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn configure_threads(requested: Option<usize>) {
    let n = requested.or_else(|| std::env::var("PERCOLAB_THREADS").ok().and_then(|s| s.parse().ok()));
    if let Some(n) = n.filter(|&n| n > 0) {
        // A second configuration in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the command and writes its CSV files and manifest.
pub fn run_and_record(cmd: &Command) -> Result<(RunManifest, Outcome)> {
    let common = cmd.common().ok_or_else(|| Error::InvalidParameter("replay is not a run".into()))?;
    configure_threads(common.threads);
    let outcome = execute(cmd)?;
    std::fs::create_dir_all(&common.out)?;
    let mut outputs = BTreeMap::new();
    for (name, bytes) in &outcome.files {
        std::fs::write(common.out.join(name), bytes)?;
        outputs.insert(name.clone(), digest(bytes));
    }
    let manifest = RunManifest {
        command: cmd.name(),
        args: cmd.clone(),
        seed: common.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        verdict: outcome.verdict.as_str().into(),
        outputs,
    };
    std::fs::write(common.out.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    Ok((manifest, outcome))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayReport {
    /// Files whose recomputed digest differs from the manifest.
    pub recomputed: Vec<String>,
    /// Files on disk whose digest differs from the manifest.
    pub on_disk: Vec<String>,
}

impl ReplayReport {
    pub fn matches(&self) -> bool {
        self.recomputed.is_empty() && self.on_disk.is_empty()
    }
}

fn same_major_minor(a: &str, b: &str) -> bool {
    let key = |v: &str| v.split('.').take(2).collect::<Vec<_>>().join(".");
    key(a) == key(b)
}

/// Re-executes a manifest in memory and compares digests with the manifest
/// and with the files next to it. The manifest's `seed` overrides the seed
/// stored in its arguments.
pub fn replay(path: &Path) -> Result<ReplayReport> {
    let text = std::fs::read_to_string(path)?;
    let manifest: RunManifest = serde_json::from_str(&text)?;
    if !same_major_minor(&manifest.version, env!("CARGO_PKG_VERSION")) {
        return Err(Error::Input(format!(
            "manifest from version {} cannot be replayed by {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        )));
    }
    let mut value = serde_json::to_value(&manifest.args)?;
    set_seed(&mut value, manifest.seed);
    let cmd: Command = serde_json::from_value(value)?;
    if let Some(c) = cmd.common() {
        configure_threads(c.threads);
    }
    let outcome = execute(&cmd)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut recomputed = Vec::new();
    let mut on_disk = Vec::new();
    let fresh: BTreeMap<&String, String> = outcome.files.iter().map(|(n, b)| (n, digest(b))).collect();
    for (name, want) in &manifest.outputs {
        if fresh.get(name) != Some(want) {
            recomputed.push(name.clone());
        }
        match std::fs::read(dir.join(name)) {
            Ok(bytes) if digest(&bytes) == *want => {}
            _ => on_disk.push(name.clone()),
        }
    }
    for name in fresh.keys() {
        if !manifest.outputs.contains_key(*name) {
            recomputed.push((*name).clone());
        }
    }
    Ok(ReplayReport { recomputed, on_disk })
}

fn set_seed(v: &mut serde_json::Value, seed: u64) {
    if let serde_json::Value::Object(m) = v {
        if let Some(s) = m.get_mut("common").and_then(|c| c.get_mut("seed")) {
            *s = seed.into();
        }
        for x in m.values_mut() {
            set_seed(x, seed);
        }
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Replay(a) => match replay(&a.manifest) {
            Ok(r) if r.matches() => {
                println!("replay: all digests match");
                EXIT_OK
            }
            Ok(r) => {
                for f in &r.recomputed {
                    println!("replay: recomputed {f} differs from the manifest");
                }
                for f in &r.on_disk {
                    println!("replay: {f} on disk differs from the manifest");
                }
                EXIT_FAIL
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        cmd => match run_and_record(cmd) {
            Ok((m, o)) => {
                for n in &o.notes {
                    println!("{n}");
                }
                println!("{} {}", m.verdict, m.command);
                exit_code(o.verdict)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
    }
}

#[cfg(test)]
mod tests;
