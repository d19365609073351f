use std::process::Command;

fn modvertex(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_modvertex"))
        .args(args)
        .output()
        .expect("run binary")
}

#[test]
fn lucas_report_on_stdout() {
    let out = modvertex(&["--suite", "lucas", "--p", "2,3,5,7"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 4);
    assert!(report["checks"][0].get("elapsed_ms").is_none());
}

#[test]
fn timings_are_opt_in() {
    let out = modvertex(&["--suite", "restricted", "--p", "3", "--timings"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["checks"][0]["elapsed_ms"].is_u64());
}

#[test]
fn bad_input_fails() {
    assert!(!modvertex(&["--suite", "lucas", "--p", "4"])
        .status
        .success());
    assert!(!modvertex(&["--suite", "character", "--depth", "9"])
        .status
        .success());
    assert!(!modvertex(&["--suite", "pcenter-images", "--p", "5"])
        .status
        .success());
    assert!(!modvertex(&["--suite", "nope"]).status.success());
}

#[test]
fn writes_output_file() {
    let path = std::env::temp_dir().join(format!("modvertex-cli-{}.json", std::process::id()));
    let out = modvertex(&[
        "--suite",
        "phi-pformula",
        "--p",
        "2,3",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(report["passed"], true);
}
