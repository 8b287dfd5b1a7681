use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn helixlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helixlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("error line on stderr");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_schema_valid(report: &Value) {
    let schema: Value = serde_json::from_str(helixlab_cli::REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn analyze_helix() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["analyze", fixture("helix.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(out.path().join("report.json"));
    assert_eq!(report["verdict_theorem"], true);
    assert_eq!(report["verdict_corollary"], true);
    assert_schema_valid(&report);

    let profile = std::fs::read_to_string(out.path().join("profile.csv")).unwrap();
    let mut lines = profile.lines();
    assert_eq!(lines.next(), Some("s,k_1,k_2,H*_1,lemma_sum,relation_residual"));
    assert_eq!(lines.count(), 400);
    let axis = std::fs::read_to_string(out.path().join("axis.csv")).unwrap();
    assert!(axis.starts_with("s,X_1,X_2,X_3\n"));
}

#[test]
fn analyze_malformed_json() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["analyze", fixture("malformed.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "ParseError");
    assert_eq!(e["exit_code"], 2);
    assert!(!out.path().join("report.json").exists());
}

#[test]
fn analyze_missing_file() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["analyze", "does/not/exist.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "IoError");
}

#[test]
fn analyze_null_tangent() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["analyze", fixture("null_tangent.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "NullTangentError");
}

#[test]
fn bad_tolerance_flag() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(
        out.path(),
        &[
            "--tol",
            "const_tol=-1",
            "analyze",
            fixture("helix.json").to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "InvalidSpecError");
}

#[test]
fn synthesize_sine_family() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["synthesize", fixture("sine4.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(out.path().join("report.json"));
    assert_eq!(report["verdict_theorem"], true);
    assert_eq!(report["verdict_corollary"], true);
    assert_eq!(report["path"], "sampled");
    assert_schema_valid(&report);

    let curve = std::fs::read_to_string(out.path().join("curve.csv")).unwrap();
    let header = curve.lines().next().unwrap();
    // s, 4 position components, 16 frame components
    assert_eq!(header.split(',').count(), 21);
    assert!(header.starts_with("s,alpha_1,"));
    assert!(header.ends_with(",V4_4"));
}

#[test]
fn synthesize_timelike_helix() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(
        out.path(),
        &["synthesize", fixture("minkowski_helix.json").to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(out.path().join("report.json"));
    assert_eq!(report["verdict_theorem"], true);
    assert_eq!(report["signs"], serde_json::json!([-1, 1, 1]));
}

#[test]
fn synthesize_oversized_step() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(
        out.path(),
        &["synthesize", fixture("oversized_step.json").to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"], "DriftError");
}

#[test]
fn synthesize_unsupported_family_dimension() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["synthesize", "--family", "slant", "--dimension", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "UnsupportedDimensionError");
}

#[test]
fn synthesize_negative_family() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["synthesize", "--family", "ratio_linear"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(out.path().join("report.json"));
    assert_eq!(report["verdict_theorem"], false);
    assert_eq!(report["verdict_corollary"], false);
}

#[test]
fn outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let spec = fixture("sine4.json");
    let args = ["synthesize", "--seed", "5", spec.to_str().unwrap()];
    assert_eq!(helixlab(a.path(), &args).status.code(), Some(0));
    assert_eq!(helixlab(b.path(), &args).status.code(), Some(0));
    for name in ["report.json", "profile.csv", "axis.csv", "curve.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn verify_list() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["verify", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("euclid3_circular_helix"));
    assert!(text.contains("synth_ratio_linear"));
    assert!(!out.path().join("verify.json").exists());
}

#[test]
fn verify_default_passes() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["verify"]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{table}");
    assert!(!table.contains("FAIL"));
    let report = read_json(out.path().join("verify.json"));
    assert_eq!(report["passed"], true);
}

#[test]
fn verify_fails_below_roundoff() {
    let out = tempfile::tempdir().unwrap();
    let o = helixlab(out.path(), &["--tol", "const_tol=1e-15", "verify"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert_eq!(read_json(out.path().join("verify.json"))["passed"], false);
}
