use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use umbilic_cli::report::{HolonomyReport, SearchReport, VerificationReport};

fn umbilic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umbilic")).args(args).output().unwrap()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_round_sphere_passes_every_suite() {
    let o = umbilic(&["verify", "round_sphere", "n=3", "--suite", "all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: VerificationReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.status, "pass");
    assert!(r.rows.iter().any(|row| row.identity == "gauss"));
    assert!(r.rows.iter().any(|row| row.identity == "killing.gamma"));
    assert!(r.rows.iter().all(|row| row.pass == (row.max <= row.tolerance)));
}

#[test]
fn torus_killing_suite_is_degenerate() {
    let o = umbilic(&["verify", "flat_torus", "--suite", "killing"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("degenerate: no umbilical canonical embedding"));
}

#[test]
fn cone_suite_lifts_the_contact_form() {
    let o = umbilic(&["verify", "cone(sasakian_sphere n=3)", "--suite", "cone", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: VerificationReport = serde_json::from_str(&stdout(&o)).unwrap();
    let lift = r.rows.iter().find(|row| row.identity == "cone.lift_parallel").unwrap();
    assert!(lift.pass && lift.count > 0);
}

#[test]
fn tight_tolerance_fails_with_exit_one() {
    let o = umbilic(&["verify", "round_sphere", "n=3", "--suite", "fundamental", "--tolerance", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn holonomy_reports() {
    for (args, dim) in [
        (vec!["holonomy", "fubini_study_cp2", "--degree", "2"], 4),
        (vec!["holonomy", "euclidean", "n=4"], 0),
        (vec!["holonomy", "round_sphere", "n=4"], 6),
    ] {
        let mut a = args.clone();
        a.extend(["--format", "json"]);
        let o = umbilic(&a);
        assert_eq!(o.status.code(), Some(0));
        let r: HolonomyReport = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(r.algebra_dim, dim, "{args:?}");
        if dim == 4 {
            assert_eq!(r.fixed_forms[0].dim, 1);
            assert!(r.fixed_forms[0].nabla_residuals[0] < 1e-5);
        }
    }
}

fn search(name: &str, dir: &Path) -> SearchReport {
    let out: PathBuf = dir.join(name.replace(".json", "-result.json"));
    let o = umbilic(&["search", &config(name), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.with_extension("md").exists());
    serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap()
}

#[test]
fn search_positive_controls_and_probe() {
    let dir = tempfile::tempdir().unwrap();
    let s3 = search("s3-in-r4.json", dir.path());
    assert_eq!(s3.verdict, "converged_to_umbilical");
    let eq = search("equator-in-s4.json", dir.path());
    assert!(eq.lambda_mean.unwrap().abs() < 1e-4);
    let cp2 = search("cp2-probe.json", dir.path());
    assert!(cp2.exploratory);
    assert_eq!(cp2.verdict, "stalled_above_floor");
    assert!(cp2.trace.len() > 1);
    let md = std::fs::read_to_string(dir.path().join("cp2-probe-result.md")).unwrap();
    assert!(md.contains("exploratory") && md.contains("best objective"));
}

#[test]
fn reports_are_byte_identical_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = umbilic(&["verify", "sasakian_sphere", "n=3", "--samples", "5", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let ja = std::fs::read(&a).unwrap();
    assert_eq!(ja, std::fs::read(&b).unwrap());
    let r: VerificationReport = serde_json::from_slice(&ja).unwrap();
    assert_eq!(umbilic_cli::report::to_json(&r).into_bytes(), ja);
    assert_eq!(r.environment.seed, 3);
    assert!(r.environment.overrides.contains(&"samples=5".to_string()));
}

#[test]
fn spec_file_settings_apply_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"manifold": {"name": "euclidean", "params": {"n": 3}}, "samples": 4, "seed": 9}"#,
    )
    .unwrap();
    let o = umbilic(&["verify", spec.to_str().unwrap(), "--seed", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: VerificationReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r.environment.samples, r.environment.seed), (4, 2));
    assert!(r.rows.iter().all(|row| row.count == 4 || row.count == 0));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(umbilic(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(umbilic(&["verify", "round_sphere", "q=3"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"family": "s3-in-r4", "param_dim": 8, "budget": 10, "seed": 1}"#).unwrap();
    assert_eq!(umbilic(&["search", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, r#"{"family": "s3-in-r4"}"#).unwrap();
    assert_eq!(umbilic(&["search", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(umbilic(&["search", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn list_zoo_names_every_entry() {
    let o = umbilic(&["list-zoo"]);
    assert_eq!(o.status.code(), Some(0));
    for name in umbilic_core::zoo::NAMES {
        assert!(stdout(&o).contains(name), "{name}");
    }
}
