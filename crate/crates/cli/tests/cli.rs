use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nice-einstein")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn einstein_on_631_6() {
    let o = cli(&["einstein", "631:6", "--k", "0", "--mode", "diagonal"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("½S = {4, 5, 12, 13, 26, 36, 146, 156}"), "{}", stdout(&o));
}

#[test]
fn abelian_admits_every_signature() {
    let o = cli(&["einstein", "(0,0,0)", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("½S = {∅, 1, 2, 3}"), "{}", stdout(&o));
}

#[test]
fn nonexistence_exits_with_two() {
    let o = cli(&["einstein", "75421:4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("failed:P"));
}

#[test]
fn catalog_dimension_seven_has_no_diffs() {
    let o = cli(&["catalog", "run", "--filter", "7*"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).contains("MISMATCH"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 mismatched, 0 errors"));
}

#[test]
fn catalog_reports_a_wrong_expectation() {
    let dir = std::env::temp_dir().join(format!("nice-einstein-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"[{"name":"h3","structure":"(0,0,e^{12})","cases":[{"mode":"diagonal","expect":{"found":true}}]}]"#,
    )
    .unwrap();
    let o = cli(&["catalog", "run", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH found: expected true, got false"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    for out in ["text", "json", "csv"] {
        let a = cli(&["einstein", "741:6", "--param", "lambda=2", "--out", out]);
        let b = cli(&["einstein", "741:6", "--param", "lambda=2", "--out", out]);
        assert_eq!(a.stdout, b.stdout, "{out}");
    }
}

#[test]
fn json_is_versioned() {
    let o = cli(&["einstein", "93:86", "--solve-param", "a", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["records"][0]["values"], serde_json::json!(["-1/8", "1/8"]));
}

#[test]
fn csv_has_the_fixed_columns() {
    let o = cli(&["einstein", "841:48", "--param", "a2=1/2", "--sigma", "(23)(56)", "--out", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,mode,k,outcome,half_S,sigma,p,q"));
    assert!(lines.any(|l| l == "841:48,sigma,0,found,1 238 568,(23)(56),5,3"), "{text}");
}

#[test]
fn printed_certificate_passes_verify() {
    let o = cli(&["einstein", "741:6", "--sigma", "(23)(45)", "--param", "lambda=1/2", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cert = &v["records"][0]["certificates"][0];
    let metric: Vec<&str> = cert["metric"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    let metric = metric.join(",");
    let o = cli(&["verify", "741:6", "--param", "lambda=1/2", "--sigma", "(23)(45)", "--metric", &metric]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 (exact)"));
}

#[test]
fn validate_rejects_a_jacobi_violation() {
    assert_eq!(cli(&["validate", "(0,0,e^{12},e^{13},e^{23})"]).status.code(), Some(0));
    assert_eq!(cli(&["validate", "(0,0,e^{12},e^{12})"]).status.code(), Some(1));
    assert_eq!(cli(&["validate", "(0,0,e^{12},e^{13},e^{34})"]).status.code(), Some(1));
}

#[test]
fn info_lists_involutions() {
    let o = cli(&["info", "741:6", "--param", "lambda=2"]);
    let s = stdout(&o);
    assert!(s.contains("Aut(Δ): 6 elements"));
    assert!(s.contains("involutions: 3"));
}

#[test]
fn curvature_of_a_ricci_flat_metric() {
    let o = cli(&["curvature", "75432:3", "--metric", "1,1,1,2,-2,4,2"]);
    let s = stdout(&o);
    assert!(s.contains("g(R,R) = 6"), "{s}");
    assert!(s.contains("g(R',R') = -35/8"), "{s}");
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_nice-einstein"))
        .args(["einstein", "631:6"])
        .env("NICE_EINSTEIN_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn negative_einstein_constant_and_usage_errors() {
    let o = cli(&["einstein", "75421:4", "--k", "-1"]);
    assert!(matches!(o.status.code(), Some(0) | Some(2) | Some(3)), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("k=-1"), "{}", stdout(&o));
    assert_eq!(cli(&["einstein"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}
