use std::process::{Command, Output};

use serde_json::Value;

fn hyperlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperlab"))
        .args(args)
        .output()
        .expect("spawn hyperlab")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn forms_audit_passes() {
    let out = hyperlab(&[
        "--n", "1", "--a", "1", "--audit", "forms", "--seed", "7", "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["exit_code"], 0);
    let reports = v["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        assert_eq!(r["class"], "assert");
        assert_eq!(r["status"], "pass", "{}", r["claim_id"]);
        assert_eq!(r["seed"], 7);
    }
}

#[test]
fn nonpositive_a_is_rejected() {
    for a in ["0", "-1"] {
        let out = hyperlab(&["--a", a]);
        assert_eq!(out.status.code(), Some(2));
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).contains("must be positive"));
    }
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["--audit", "nonsense"][..],
        &["--backend", "spline"],
        &["--tolerance", "forms.acw"],
        &[
            "--tolerance",
            "no.such_claim=1e-3",
            "--audit",
            "forms",
            "--n",
            "1",
        ],
        &["--n", "0"],
        &["--samples", "many"],
    ] {
        assert_eq!(hyperlab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn measurements_carry_both_backends() {
    let out = hyperlab(&[
        "--n",
        "1",
        "--a",
        "1",
        "--audit",
        "hyperkahler",
        "--backend",
        "both",
        "--curvature-samples",
        "5",
        "--samples",
        "20",
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    let measures: Vec<&Value> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["class"] == "measure" && !r["backends"].is_null())
        .collect();
    assert!(!measures.is_empty());
    for r in measures {
        assert!(r["backends"]["dual"]["max"].is_number());
        assert!(r["backends"]["fd"]["max"].is_number());
        assert!(r["backend_agreement"].as_f64().unwrap() < 1e-6);
        assert_eq!(r["status"], "recorded");
    }
}

#[test]
fn tolerance_override_is_applied() {
    let out = hyperlab(&[
        "--n",
        "1",
        "--a",
        "1",
        "--audit",
        "forms",
        "--samples",
        "20",
        "--tolerance",
        "forms.uniformva=1e-300",
        "--quiet",
    ]);
    let v = report(&out);
    let r = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["claim_id"] == "forms.uniformva")
        .unwrap();
    assert_eq!(r["tolerance"], 1e-300);
    let expected = if r["status"] == "pass" { 0 } else { 1 };
    assert_eq!(out.status.code(), Some(expected));
}

#[test]
fn csv_tables_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out_json = dir.path().join("r.json");
    let csv = dir.path().join("csv");
    let out = Command::new(env!("CARGO_BIN_EXE_hyperlab"))
        .args([
            "--n",
            "1",
            "--a",
            "1",
            "--audit",
            "cc_bounds",
            "--samples",
            "10",
            "--quiet",
        ])
        .arg("--out")
        .arg(&out_json)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    for name in [
        "reports.csv",
        "residuals.csv",
        "curvature_vs_a.csv",
        "geodesics.csv",
    ] {
        let text = std::fs::read_to_string(csv.join(name)).unwrap();
        assert!(text.lines().count() > 1, "{name}");
    }
    let timing: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("r.json.timing.json")).unwrap(),
    )
    .unwrap();
    assert!(timing["timestamp"].as_u64().unwrap() > 0);
}
