use std::path::Path;
use std::process::Command;

fn percolab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_percolab")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn exact_russo_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = percolab(&["exact", "russo", "--n", "1", "--p", "0.5", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("russo.csv")).unwrap();
    assert!(csv.starts_with("check,d,n,p,probability,derivative"));
    assert!(csv.contains(",PASS"));
    assert!(dir.path().join("manifest.json").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
}

#[test]
fn replay_of_a_fresh_run_matches() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = percolab(&["bernoulli", "theta", "--n", "2", "--p", "0.6", "--replicas", "500", "--seed", "9", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    let manifest = dir.path().join("manifest.json");
    let r = percolab(&["replay", manifest.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(percolab(&["bernoulli", "theta", "--p", "0.5"]).status.code(), Some(1));
    assert_eq!(percolab(&["nonsense"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = percolab(&["bernoulli", "theta", "--n", "2", "--p", "1.5", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let o = percolab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["bernoulli", "exact", "osss", "ppp", "boolean", "sharp", "replay"] {
        assert!(String::from_utf8_lossy(&o.stdout).contains(sub), "{sub}");
    }
}
