use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use specasym_cli::report::{ExperimentReport, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specasym"))
}

fn spec_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn run_spec(spec: &Path, dir: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(spec).arg("--out").arg(dir).args(extra).output().unwrap()
}

fn read_report(path: &Path) -> ExperimentReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn dirac_example_reports_four_pi_squared() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(&spec_file("dirac_t2.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("dirac-t2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let row: Vec<&str> = lines.find(|l| l.split(',').nth(3) == Some("2")).unwrap().split(',').collect();
    let im: f64 = row[5].parse().unwrap();
    let want = 4.0 * std::f64::consts::PI.powi(2);
    assert!((im - want).abs() < 1e-9 * want, "{im}");
    let report = read_report(&dir.path().join("dirac-t2.json"));
    assert!(report.pass);
    assert_eq!(report.rows.len(), 3);
}

#[test]
fn matrix_example_projects_onto_negative_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(&spec_file("matrix_diag.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_report(&dir.path().join("diag-sign.json"));
    let p = &report.matrix.unwrap().projections[0];
    let got = p.projection.as_ref().unwrap();
    assert!((got[1][1].re - 1.0).abs() < 1e-10 && got[0][0].re.abs() < 1e-10);
    assert!(p.error.unwrap() < 1e-10);

    let out = bin().arg("matrix").arg(spec_file("matrix_diag.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
    let m = r.matrix.unwrap();
    assert_eq!(m.clusters.len(), 2);
    assert!(m.projections.iter().all(|p| p.projection.is_none()));
}

#[test]
fn failing_assertion_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(spec_file("dirac_t2.json")).unwrap()).unwrap();
    spec["assertions"][0]["equals"]["im"] = serde_json::json!(1.0);
    let path = dir.path().join("wrong.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = run_spec(&path, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    let report = read_report(&dir.path().join("dirac-t2.json"));
    assert!(!report.pass && !report.assertions[0].pass && report.assertions[1].pass);
}

#[test]
fn schema_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in [
        "{not json",
        r#"{"name":"a","kind":"matrix","matrix":[[{"re":1,"im":0}]],"cuts":[[0.5,20.0]]}"#,
        r#"{"name":"a","kind":"symbolic","n":2,"fiberDim":1,"order":1,"components":[[{"coeff":[[{"re":1,"im":0},{"re":0,"im":0}]]}]]}"#,
        r#"{"name":"a","kind":"dirac","n":3,"dirac":{"twistRank":1},"k":[1]}"#,
    ]
    .iter()
    .enumerate()
    {
        let path = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&path, text).unwrap();
        let out = run_spec(&path, dir.path(), &[]);
        assert_eq!(out.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run_spec(&dir.path().join("missing.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["verify", "--level", "quick"]).env("SPECASYM_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_with_three_and_name_the_module() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"name":"lap","kind":"symbolic","n":2,"fiberDim":1,"order":2,
        "components":[[{"coeff":[[{"re":1,"im":0}]],"xi":[2,0]},{"coeff":[[{"re":1,"im":0}]],"xi":[0,2]}]],
        "cuts":[[1.0,2.0]],"k":[0]}"#;
    let path = dir.path().join("lap.json");
    std::fs::write(&path, spec).unwrap();
    let out = run_spec(&path, dir.path(), &["--depth", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("residue-asymmetry"));

    // cut ray through the principal spectrum
    let bad_cut = spec.replace("[[1.0,2.0]]", "[[0.0,2.0]]");
    std::fs::write(&path, bad_cut).unwrap();
    let out = run_spec(&path, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sectorial-projection"));
}

#[test]
fn run_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let spec = spec_file("dirac_t2.json");
    assert!(run_spec(&spec, a.path(), &[]).status.success());
    let out = bin().arg("run").arg(&spec).arg("--out").arg(b.path()).env("SPECASYM_THREADS", "2").output().unwrap();
    assert!(out.status.success());
    for f in ["dirac-t2.json", "dirac-t2.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn quick_verify_passes_and_mutation_is_caught() {
    let out = bin().args(["verify", "--seed", "42", "--level", "quick"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
    for module in ["matrix-spectral-kernel", "symbol-core", "residue-asymmetry"] {
        assert!(r.checks.iter().any(|c| c.module == module && c.pass), "{module}");
    }

    let out = bin().args(["verify", "--seed", "42", "--level", "quick", "--flip-composition-phase"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r: ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
    let leibniz = r.checks.iter().find(|c| c.property.starts_with("Leibniz")).unwrap();
    assert!(!leibniz.pass && leibniz.measured.unwrap() > 1e-3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}
