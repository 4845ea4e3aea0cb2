use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partideal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn theorem_example() {
    let out = run(&["theorem", "--dims", "2,3,2", "--trials", "50", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["masks_passed"], 8);
    assert_eq!(r["witnesses_found"], 50);
}

#[test]
fn theorem_output_is_reproducible() {
    let args = ["theorem", "--dims", "2,2", "--trials", "10", "--seed", "9", "--quiet"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("partideal-cover-{}.json", std::process::id()));
    let out = run(&["cover", "--dims", "3", "--ranks", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("certificate valid"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(r["family_size"], 3);
    assert_eq!(r["checks"]["remainder_ranks"], serde_json::json!([0]));
}

#[test]
fn partial_ideal_examples() {
    let out = run(&[
        "partial-ideal",
        "--dims",
        "3",
        "--ranks",
        "1",
        "--side",
        "right",
        "--trials",
        "10",
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["consistency"]["verdict"], "pass");
    assert_eq!(r["invariance"]["verdict"], "fail");
    assert!(r["witness"].is_object());

    for ranks in ["0", "3"] {
        let out = run(&[
            "partial-ideal",
            "--dims",
            "3",
            "--ranks",
            ranks,
            "--trials",
            "4",
            "--quiet",
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(report(&out)["invariance"]["verdict"], "pass");
    }
}

#[test]
fn witness_from_projection_file() {
    let path = std::env::temp_dir().join(format!("partideal-p-{}.json", std::process::id()));
    // p = (E11, I2) in M2 ⊕ M2
    let p = r#"{"dims": [2, 2], "blocks": [
        {"rows": 2, "cols": 2, "data": [[1,0],[0,0],[0,0],[0,0]]},
        {"rows": 2, "cols": 2, "data": [[1,0],[0,0],[0,0],[1,0]]}]}"#;
    std::fs::write(&path, p).unwrap();
    let out = run(&["witness", "--projection", path.to_str().unwrap(), "--quiet"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["witness"]["method"]["method"], "swap");
    assert_eq!(r["witness"]["method"]["block"], 0);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["cover", "--dims", "3", "--ranks", "0"][..],
        &["cover", "--dims", "3", "--ranks", "4"],
        &["theorem", "--trials", "0"],
        &["theorem", "--dims", "33"],
        &["theorem", "--eps", "-1"],
        &["witness", "--dims", "2", "--ranks", "2"],
        &["witness", "--dims", "2"],
        &["check", "--projection", "/nonexistent/p.json"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn check_central_and_noncentral() {
    let out = run(&["check", "--dims", "2,2", "--mask", "0,1", "--trials", "6", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["center_value"]["mask"], serde_json::json!([false, true]));
    let out = run(&["check", "--dims", "2,2", "--ranks", "1,0", "--trials", "6", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["invariance"]["verdict"], "fail");
}
