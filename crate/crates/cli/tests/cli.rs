use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

fn pcurv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcurv"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pcurv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(body.as_bytes())
        .unwrap();
    path
}

#[test]
fn no_scenarios_prints_usage() {
    let out = pcurv().arg("descend").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage: pcurv"));
    let out = pcurv().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_command_is_an_input_error() {
    let out = pcurv()
        .arg("frobnicate")
        .arg(scenario("shifted.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown command `frobnicate`"));
}

#[test]
fn exit_statuses() {
    let ok = pcurv()
        .arg("descend")
        .arg(scenario("crystalline-1d.json"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("value: x^2 + 2"));
    let bad = pcurv()
        .arg("validate")
        .arg(scenario("broken-antisymmetry.json"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let missing = pcurv()
        .arg("validate")
        .arg("/nonexistent/scenario.json")
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn parse_errors_carry_locations() {
    let body = r#"{"schema_version": 1, "name": "bad", "p": 3, "coordinates": ["x"],
        "algebroid": {"preset": "tangent"}, "module": {"rank": 1, "matrices": [[["x^"]]]}}"#;
    let f = temp_file("bad-poly.json", body);
    let out = pcurv().arg("pcurvature").arg(&f).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("module.matrices[0][0][0]"), "{err}");

    let f = temp_file("bad-json.json", "{\n  \"schema_version\": 1,\n  \"p\": }");
    let out = pcurv().arg("validate").arg(&f).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn descent_rejects_characteristic_two() {
    let body = r#"{"schema_version": 1, "name": "p2", "p": 2, "coordinates": ["x"],
        "algebroid": {"preset": "tangent"}, "module": {"rank": 1, "matrices": [[["x"]]]}}"#;
    let f = temp_file("p2.json", body);
    let out = pcurv().arg("descend").arg(&f).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("characteristic 2"));
}

#[test]
fn unmet_expectation_exits_one() {
    let body = r#"{"schema_version": 1, "name": "wrong-expectation", "p": 3, "coordinates": ["x"],
        "algebroid": {"preset": "tangent"}, "module": {"rank": 1, "matrices": [[["x^2"]]]},
        "expect": "not_descendable"}"#;
    let f = temp_file("wrong-expectation.json", body);
    let out = pcurv().arg("descend").arg(&f).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identities_on_charts() {
    let out = pcurv()
        .args([
            "identities",
            "--chart",
            "3:1",
            "--trials",
            "10",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scenario"], "tangent-p3-n1");
    assert_eq!(v["checks"].as_array().unwrap().len(), 18);

    let out = pcurv()
        .args(["identities", "--chart", "2:1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    let out = pcurv()
        .args(["validate", "--chart", "3:1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
