use percolab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(percolab_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn lattice_lifecycle() {
    let mut lat = ptr::null_mut();
    assert_eq!(unsafe { percolab_lattice_new(2, 1, &mut lat) }, PercolabStatus::Ok);
    let (mut v, mut e) = (0usize, 0usize);
    assert_eq!(unsafe { percolab_lattice_counts(lat, &mut v, &mut e) }, PercolabStatus::Ok);
    assert_eq!((v, e), (9, 12));

    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { percolab_config_sample(lat, 1.0, 3, &mut cfg) }, PercolabStatus::Ok);
    let mut open = 0usize;
    assert_eq!(unsafe { percolab_config_open_count(cfg, &mut open) }, PercolabStatus::Ok);
    assert_eq!(open, 12);
    let mut hit = 0;
    assert_eq!(unsafe { percolab_connected_to_boundary(lat, cfg, &mut hit) }, PercolabStatus::Ok);
    assert_eq!(hit, 1);
    unsafe {
        percolab_config_free(cfg);
        percolab_lattice_free(lat);
        percolab_lattice_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_codes_with_messages() {
    let mut lat = ptr::null_mut();
    assert_eq!(unsafe { percolab_lattice_new(0, 1, &mut lat) }, PercolabStatus::InvalidParameter);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { percolab_lattice_new(2, 1, ptr::null_mut()) }, PercolabStatus::NullPointer);
    assert!(last_error().contains("null"));
    let mut out = PercolabRusso::default();
    assert_eq!(unsafe { percolab_exact_russo(2, 5, 0.5, &mut out) }, PercolabStatus::CapExceeded);
}

#[test]
fn mismatched_configuration_is_rejected() {
    let (mut a, mut b, mut cfg) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(percolab_lattice_new(2, 1, &mut a), PercolabStatus::Ok);
        assert_eq!(percolab_lattice_new(2, 2, &mut b), PercolabStatus::Ok);
        assert_eq!(percolab_config_sample(a, 0.5, 1, &mut cfg), PercolabStatus::Ok);
        let mut hit = 0;
        assert_eq!(percolab_connected_to_boundary(b, cfg, &mut hit), PercolabStatus::InvalidParameter);
        percolab_config_free(cfg);
        percolab_lattice_free(a);
        percolab_lattice_free(b);
    }
}

#[test]
fn exact_russo_through_abi() {
    let mut out = PercolabRusso::default();
    assert_eq!(unsafe { percolab_exact_russo(2, 1, 0.5, &mut out) }, PercolabStatus::Ok);
    assert_eq!(out.pass, 1);
    assert!((out.probability - 15.0 / 16.0).abs() < 1e-12);
    assert!((out.derivative - 0.5).abs() < 1e-12);
}

#[test]
fn theta_and_vacancy() {
    let mut est = PercolabEstimate::default();
    assert_eq!(unsafe { percolab_estimate_theta(2, 1, 0.0, 10, 1, &mut est) }, PercolabStatus::Ok);
    assert_eq!(est.value, 0.0);

    let nu = CString::new("fixed:1").unwrap();
    let mut vac = PercolabVacancy { closed_form: 0.0, estimate: PercolabEstimate::default(), verdict: PercolabVerdict::Fail };
    assert_eq!(unsafe { percolab_boolean_vacancy(2, 1.0, nu.as_ptr(), 20_000, 5, 1e-3, &mut vac) }, PercolabStatus::Ok);
    assert!((vac.closed_form - (-std::f64::consts::PI).exp()).abs() < 1e-12);
    assert_eq!(vac.verdict, PercolabVerdict::Pass);

    let bad = CString::new("pareto:1.5:1").unwrap();
    assert_eq!(unsafe { percolab_boolean_vacancy(2, 1.0, bad.as_ptr(), 10, 5, 1e-3, &mut vac) }, PercolabStatus::InfiniteMoment);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(percolab_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_abi() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/percolab.h")).unwrap();
    for name in [
        "PERCOLAB_H",
        "typedef struct PercolabLattice PercolabLattice",
        "typedef struct PercolabConfig PercolabConfig",
        "percolab_lattice_new",
        "percolab_lattice_free",
        "percolab_config_sample",
        "percolab_connected_to_boundary",
        "percolab_estimate_theta",
        "percolab_exact_russo",
        "percolab_boolean_vacancy",
        "percolab_last_error",
        "PercolabStatus_Ok = 0",
        "PercolabStatus_Panic",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Ok(cc) = which_cc() else { return };
    let target = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    // Integration tests only build the rlib; refresh the static library.
    let built = std::process::Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "percolab-ffi", "--lib"])
        .status()
        .unwrap();
    assert!(built.success());
    let lib = target.join("libpercolab_ffi.a");
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let status = std::process::Command::new(cc)
        .arg(format!("{manifest}/tests/c/smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "9 12 1 0.500000 1 err");
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
