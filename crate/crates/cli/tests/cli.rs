//! End-to-end runs of the binary: exit-code contract, report shapes, and
//! byte-level determinism of the JSON outputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn holocycle(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holocycle"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

const LINEAR_FIELD: &str =
    r#"{"p":[{"i":1,"j":0,"c":[1.0,0.0]}],"q":[{"i":0,"j":1,"c":[2.0,0.0]}]}"#;
const DICRITICAL_FIELD: &str =
    r#"{"p":[{"i":1,"j":0,"c":[1.0,0.0]}],"q":[{"i":0,"j":1,"c":[1.0,0.0]}]}"#;

#[test]
fn analyze_linear_field() {
    let tmp = tempfile::tempdir().unwrap();
    let field = write(tmp.path(), "field.json", LINEAR_FIELD);
    let out = holocycle(
        &[
            "analyze", "--field", &field, "--line", "1,0,1,0", "--out", ".",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("analyze.json")).unwrap())
            .unwrap();
    assert_eq!(report["affine_singularities"].as_array().unwrap().len(), 1);
    assert_eq!(
        report["infinity_singularities"].as_array().unwrap().len(),
        2
    );
    let tangency = &report["tangencies"][0];
    assert_eq!(tangency["count"], 1);
    // tangency of the line w = z + 1 with this field sits at (-2, -1)
    assert!((tangency["points"][0][0][0].as_f64().unwrap() + 2.0).abs() < 1e-9);
}

#[test]
fn analyze_csv_format() {
    let tmp = tempfile::tempdir().unwrap();
    let field = write(tmp.path(), "field.json", LINEAR_FIELD);
    let out = holocycle(
        &[
            "analyze", "--field", &field, "--format", "csv", "--out", ".",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("analyze.csv")).unwrap();
    assert!(csv.starts_with("kind,"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("affine,")).count(), 1);
    assert_eq!(
        csv.lines().filter(|l| l.starts_with("infinity,")).count(),
        2
    );
}

#[test]
fn analyze_rejects_malformed_json() {
    let tmp = tempfile::tempdir().unwrap();
    let field = write(tmp.path(), "field.json", "{ not json");
    let out = holocycle(&["analyze", "--field", &field], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    // the message names the offending file
    assert!(String::from_utf8_lossy(&out.stderr).contains("field.json"));
}

#[test]
fn analyze_dicritical_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let field = write(tmp.path(), "field.json", DICRITICAL_FIELD);
    let out = holocycle(&["analyze", "--field", &field], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cycles_demo_pipeline_certifies() {
    let tmp = tempfile::tempdir().unwrap();
    let out = holocycle(
        &[
            "cycles", "--lambda", "0,1", "--germ", "demo", "--count", "10", "--out", ".",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let cycles: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("cycles.json")).unwrap()).unwrap();
    assert_eq!(cycles["cycles"].as_array().unwrap().len(), 10);
    assert_eq!(cycles["certificate"]["verdict"], "certified");
    // first fixed point matches the closed form to printing precision
    let p1 = cycles["cycles"][0]["p"][0].as_f64().unwrap();
    assert!((p1 - 9.3407e-4).abs() < 1e-7);

    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("certificate.json")).unwrap())
            .unwrap();
    assert_eq!(cert["method"], "multiplier");
    assert_eq!(cert["verdict"], "certified");

    // multiplier re-certification over the emitted file
    let out = holocycle(
        &[
            "certify",
            "--cycles",
            "cycles.json",
            "--method",
            "multiplier",
            "--out",
            "recheck",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    // the integral criterion runs but does not certify this family: the
    // contour integrals of consecutive representatives have comparable
    // magnitude, so the domination chain fails (as it should)
    let out = holocycle(
        &[
            "certify",
            "--cycles",
            "cycles.json",
            "--method",
            "integral",
            "--out",
            "integral",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let cert: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("integral/certificate.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(cert["method"], "integral");
    assert_eq!(cert["verdict"], "not-certified");

    // plot export: one CSV per cycle, samples round-tripping losslessly
    let out = holocycle(
        &["plotdata", "--cycles", "cycles.json", "--out", "plots"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csvs: Vec<_> = fs::read_dir(tmp.path().join("plots")).unwrap().collect();
    assert_eq!(csvs.len(), 10);
    let first_curve = cycles["cycles"][0]["curve"][0][0].as_f64().unwrap();
    let csv = fs::read_to_string(tmp.path().join("plots/cycle_0001.csv")).unwrap();
    let second_line = csv.lines().nth(1).unwrap();
    let re_z: f64 = second_line.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(re_z, first_curve);
}

#[test]
fn cycles_outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = holocycle(
            &[
                "cycles",
                "--lambda",
                "0.2,0.8",
                "--germ",
                "affine:0.4,0.1,0.15,-0.05",
                "--count",
                "6",
                "--out",
                dir,
            ],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["cycles.json", "certificate.json"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn cycles_rejects_real_ratio_and_zero_count() {
    let tmp = tempfile::tempdir().unwrap();
    let out = holocycle(&["cycles", "--lambda", "3,0", "--germ", "demo"], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    let out = holocycle(
        &[
            "cycles", "--lambda", "0,1", "--germ", "demo", "--count", "0",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cycles_from_field_and_entry_path() {
    // chart-coordinate field dz = z, dw = i w + 0.5 z^2: the quadratic term
    // breaks the invariance of w = 0, so the holonomy along a loop around
    // the singular point is affine with a nonzero constant term, exactly the
    // entry-germ shape the pipeline needs
    let tmp = tempfile::tempdir().unwrap();
    let field = write(
        tmp.path(),
        "field.json",
        r#"{"p":[{"i":1,"j":0,"c":[1.0,0.0]}],"q":[{"i":0,"j":1,"c":[0.0,1.0]},{"i":2,"j":0,"c":[0.5,0.0]}]}"#,
    );
    // entry path: one loop around the origin bulging outside the unit bidisc,
    // pinned to the section z = 1 at both ends
    let samples = 64;
    let mut points = Vec::new();
    for k in 0..=samples {
        let t = k as f64 / samples as f64;
        let r = 1.0 + 0.3 * (std::f64::consts::PI * t).sin();
        let theta = std::f64::consts::TAU * t;
        points.push(format!(
            "[{:.17e},[{:.17e},{:.17e}]]",
            t,
            r * theta.cos(),
            r * theta.sin()
        ));
    }
    let beta = write(tmp.path(), "beta.json", &format!("[{}]", points.join(",")));
    let out = holocycle(
        &[
            "cycles",
            "--field",
            &field,
            "--beta",
            &beta,
            "--count",
            "4",
            "--radius",
            "0.4",
            "--tol-ode",
            "1e-9",
            "--out",
            ".",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cycles: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("cycles.json")).unwrap()).unwrap();
    assert_eq!(cycles["cycles"].as_array().unwrap().len(), 4);
    assert_eq!(cycles["certificate"]["verdict"], "certified");
    // the lifted entry germ is w -> nu w + eps (1 - nu) / (2 - lambda) in
    // closed form (variation of constants along the loop); check the first
    // fixed point against it
    let nu_re = (-std::f64::consts::TAU).exp();
    let nu = num_complex::Complex64::new(nu_re, 0.0);
    let lambda = num_complex::Complex64::new(0.0, 1.0);
    let a = 0.5 * (1.0 - nu) / (2.0 - lambda);
    let b = nu;
    let p1 = nu * a / (num_complex::Complex64::new(1.0, 0.0) - nu * b);
    let got = num_complex::Complex64::new(
        cycles["cycles"][0]["p"][0].as_f64().unwrap(),
        cycles["cycles"][0]["p"][1].as_f64().unwrap(),
    );
    assert!(
        (got - p1).norm() < 1e-8 * p1.norm().max(1e-12),
        "fixed point {got} vs closed form {p1}"
    );
}

#[test]
fn holonomy_linear_model_circle() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write(tmp.path(), "path.json", r#"{"kind":"circle","turns":1}"#);
    let out = holocycle(
        &[
            "holonomy", "--lambda", "0,1", "--path", &path, "--start", "0.1,0", "--out", ".",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("holonomy.json")).unwrap())
            .unwrap();
    let endpoint_re = report["endpoint"][0].as_f64().unwrap();
    let expected = 0.1 * (-std::f64::consts::TAU).exp();
    assert!((endpoint_re - expected).abs() < 1e-10);
    assert!(report["trace"].as_array().unwrap().len() > 10);
}

#[test]
fn plotdata_handles_empty_and_corrupt_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = write(
        tmp.path(),
        "empty.json",
        r#"{"model":{"lambda":[0.0,1.0],"nu":[0.0018674,0.0]},"section_radius":0.5,"chart_scale":[1.0,1.0],"cycles":[],"certificate":{"clauses":[],"verdict":"certified","section_log_margin":0.0}}"#,
    );
    let out = holocycle(
        &["plotdata", "--cycles", &empty, "--out", "plots"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    let corrupt = write(tmp.path(), "corrupt.json", "{broken");
    let out = holocycle(
        &["plotdata", "--cycles", &corrupt, "--out", "plots2"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    let out = holocycle(
        &["plotdata", "--cycles", "missing.json", "--out", "p3"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}
