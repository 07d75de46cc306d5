use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finsleroid"))
}

#[test]
fn eval_prints_f_and_angles() {
    let out = bin().args(["eval", "--y", "2,0.3,0.2,0.5"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let f = doc["F"].as_f64().unwrap();
    assert!((f - 1.7344944130039865).abs() < 1e-10);
    assert!(doc["angles"]["eta"].as_f64().unwrap() > 0.0);
    assert!(doc["scalar_vars"]["wperp"].as_f64().unwrap() > 0.0);
}

#[test]
fn eval_with_lambda_reports_section() {
    let out = bin().args(["eval", "--y", "2,0.3,0.2,0.5", "--lambda", "2"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let radius = doc["section"]["radius"].as_f64().unwrap();
    assert!((radius - 2.4104036997294207).abs() < 1e-9);
    let k = doc["section"]["curvature"].as_f64().unwrap();
    assert!((k - 2.0 / (radius * radius)).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    // unknown flag (clap) and bad values (our parsing) both exit 2
    let out = bin().args(["eval", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["eval", "--y", "1,2,3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // on-axis tangent is an input error
    let out = bin().args(["eval", "--y", "2,0,0,0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("axis"));
}

#[test]
fn verify_defaults_pass_and_report_round_trips() {
    let dir = std::env::temp_dir().join("finsleroid-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = bin()
        .args(["verify", "--seed", "7", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["overall"], "pass");
    assert!(report["records"].as_array().unwrap().len() >= 40);

    let out = bin().args(["report", "--in", path.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("S1.3.14"));
    assert!(text.contains("(3.36)"));
    assert!(text.contains("overall: pass"));
}

#[test]
fn verify_rejects_bad_params_file() {
    let dir = std::env::temp_dir().join("finsleroid-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad-params.json");
    std::fs::write(&path, r#"{"H":2,"T":3,"Chat":0.4}"#).unwrap();
    let out = bin().args(["verify", "--params", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TChat"));
}

#[test]
fn sample_indicatrix_rows_have_unit_f() {
    let out = bin()
        .args(["sample", "--surface", "indicatrix", "--grid", "16x16x8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "eta,theta,phi,y0,y1,y2,y3,F");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2048);
    for row in rows {
        let f: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((f - 1.0).abs() < 1e-10, "F = {f}");
    }
}

#[test]
fn sample_horizontal_rows_positive_definite() {
    let out = bin()
        .args(["sample", "--surface", "horizontal", "--grid", "4x4x2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "v1,v2,v3,r,detR,min_eigenvalue,curvature_residual");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 32);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[3] > 0.0 && cols[4] > 0.0 && cols[5] > 0.0, "{row}");
        assert!(cols[6] < 1e-4, "curvature residual {row}");
    }
}

#[test]
fn params_file_controls_section_range() {
    let dir = std::env::temp_dir().join("finsleroid-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c1-params.json");
    std::fs::write(&path, r#"{"H":2,"T":2,"Chat":0.25,"C1":4.0}"#).unwrap();
    // lambda = 0.5 is outside the default range but valid once C1 = 4
    let out = bin().args(["eval", "--y", "2,0.3,0.2,0.5", "--lambda", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args([
            "eval",
            "--y",
            "2,0.3,0.2,0.5",
            "--lambda",
            "0.5",
            "--params",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
