use super::*;
use tempfile::tempdir;

fn run(args: &[&str], out: &Path) -> i32 {
    let mut argv = vec!["percolab"];
    argv.extend_from_slice(args);
    let out = out.to_str().unwrap().to_string();
    argv.extend_from_slice(&["--out", &out]);
    dispatch(argv)
}

fn read(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn grid_parsing() {
    assert_eq!(parse_grid("0.3:0.5:0.1").unwrap(), vec![0.3, 0.4, 0.5]);
    assert_eq!(parse_grid("0.25").unwrap(), vec![0.25]);
    assert!(parse_grid("0.5:0.3:0.1").is_err());
    assert!(parse_grid("a:b").is_err());
}

#[test]
fn exact_russo_passes() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["exact", "russo", "--d", "2", "--n", "1", "--p", "0.5"], dir.path()), EXIT_OK);
    let rows = read(&dir.path().join("russo.csv"));
    let pivotal: f64 = rows[0][8].parse().unwrap();
    let covariance: f64 = rows[0][9].parse().unwrap();
    assert!(pivotal < 1e-12 && covariance < 1e-12);
    assert_eq!(&rows[0][10], "PASS");
}

#[test]
fn theta_at_zero_is_zero() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["bernoulli", "theta", "--d", "2", "--n", "1", "--p", "0", "--replicas", "10"], dir.path()), EXIT_OK);
    let rows = read(&dir.path().join("theta.csv"));
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), 0.0);
    let header = csv::Reader::from_path(dir.path().join("theta.csv")).unwrap().headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["model", "d", "n", "p", "estimate", "stderr", "replicas", "seed"]);
}

#[test]
fn vacancy_matches_closed_form() {
    let dir = tempdir().unwrap();
    let code = run(&["boolean", "vacancy", "--d", "2", "--lambda", "1", "--nu", "fixed:1", "--replicas", "100000"], dir.path());
    assert_eq!(code, EXIT_OK);
    let rows = read(&dir.path().join("vacancy.csv"));
    let closed: f64 = rows[1][6].parse().unwrap();
    assert!((closed - (-std::f64::consts::PI).exp()).abs() < 1e-12);
    assert!((closed - 0.043214).abs() < 1e-6);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["bernoulli", "theta", "--n", "1", "--p", "0.5", "--bogus", "1"], dir.path()), EXIT_ERROR);
    assert_eq!(run(&["boolean", "theta", "--lambda", "1", "--nu", "pareto:1.5:1", "--r", "1"], dir.path()), EXIT_ERROR);
    assert_eq!(run(&["bernoulli", "theta", "--n", "1", "--p", "1.5"], dir.path()), EXIT_ERROR);
}

#[test]
fn fail_and_inconclusive_exit_codes() {
    assert_eq!(exit_code(Verdict::Fail), EXIT_FAIL);
    assert_eq!(exit_code(Verdict::Inconclusive), EXIT_INCONCLUSIVE);
    let dir = tempdir().unwrap();
    // A step of 0.3 is too coarse for the centered difference.
    let code = run(&["sharp", "check", "--n", "2", "--p-grid", "0.2:0.8:0.3", "--replicas", "200"], dir.path());
    assert_eq!(code, EXIT_INCONCLUSIVE);
}

#[test]
fn replay_round_trip() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["bernoulli", "curve", "--n", "3", "--p-grid", "0.4:0.6:0.1", "--replicas", "500", "--seed", "9"], dir.path()), EXIT_OK);
    let manifest = dir.path().join(MANIFEST);
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m.command, "bernoulli curve");
    assert_eq!(m.seed, 9);
    assert!(replay(&manifest).unwrap().matches());
    assert_eq!(dispatch(["percolab", "replay", manifest.to_str().unwrap()]), EXIT_OK);

    // A tampered file is reported.
    let csv = dir.path().join("curve.csv");
    let original = std::fs::read(&csv).unwrap();
    std::fs::write(&csv, b"model,d,n,p,estimate,stderr,replicas,seed\n").unwrap();
    let r = replay(&manifest).unwrap();
    assert_eq!(r.on_disk, vec!["curve.csv".to_string()]);
    assert!(r.recomputed.is_empty());
    assert_eq!(dispatch(["percolab", "replay", manifest.to_str().unwrap()]), EXIT_FAIL);
    std::fs::write(&csv, original).unwrap();

    // A different seed recomputes different bytes but still runs.
    let mut edited = m.clone();
    edited.seed = 10;
    std::fs::write(&manifest, serde_json::to_string(&edited).unwrap()).unwrap();
    let r = replay(&manifest).unwrap();
    assert_eq!(r.recomputed, vec!["curve.csv".to_string()]);
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let args = ["ppp", "superpose", "--lambda", "2", "--lambda2", "3", "--replicas", "2000", "--seed", "4"];
    run(&args, a.path());
    run(&args, b.path());
    assert_eq!(std::fs::read(a.path().join("superpose.csv")).unwrap(), std::fs::read(b.path().join("superpose.csv")).unwrap());
}

#[test]
fn sharp_reads_curve_csv() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["bernoulli", "curve", "--n", "4", "--p-grid", "0.45:0.55:0.01", "--replicas", "2000"], dir.path()), EXIT_OK);
    let input = dir.path().join("curve.csv");
    let out = dir.path().join("sums");
    let code = run(&["sharp", "sums", "--in", input.to_str().unwrap()], &out);
    assert_eq!(code, EXIT_OK);
    let rows = read(&out.join("sums.csv"));
    assert_eq!(rows.len(), 11 * 5);
    let out = dir.path().join("check");
    let code = run(&["sharp", "check", "--in", input.to_str().unwrap(), "--coupled"], &out);
    assert_ne!(code, EXIT_FAIL);
    assert_ne!(code, EXIT_ERROR);
}

#[test]
fn lemma_command() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["sharp", "lemma", "--family", "rate", "--horizon", "4000"], dir.path()), EXIT_OK);
    assert_eq!(run(&["sharp", "lemma", "--family", "constant", "--horizon", "100"], dir.path()), EXIT_ERROR);
}
