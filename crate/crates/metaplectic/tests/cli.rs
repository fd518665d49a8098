use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_metaplectic")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "stderr: {}", err);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

#[test]
fn hilbert_table_output() {
    let (code, out, _) = run(&["hilbert", "--p", "3", "3", "2", "--format", "table"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "-1");
}

#[test]
fn classify_ss_summary() {
    let v = json(&["classify-ss", "--p", "5", "--r", "1"]);
    assert_eq!(v["summary"]["H"], 39);
    assert_eq!(v["summary"]["Lam"], "1");
    assert_eq!(v["cyclic_form"]["b"], serde_json::json!([3, 2, 1, 0]));
}

#[test]
fn excluded_parameter_exits_with_tag() {
    let (code, _, err) = run(&["classify-ss", "--p", "5", "--r", "2"]);
    assert_eq!(code, 1);
    assert_eq!(err.trim(), "error: excluded parameter");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["classify-ss"]).0, 2);
}

#[test]
fn precision_must_cover_p_squared() {
    let (code, _, err) = run(&["build-rank1", "--p", "5", "--prec", "10"]);
    assert_eq!(code, 1);
    assert!(err.contains("invalid input"));
}

#[test]
fn galois_reduce_and_iso() {
    let v = json(&["galois-reduce", "--p", "3", "--h", "1"]);
    assert_eq!(v["h_prime"], 3);
    let v = json(&["galois-iso", "--p", "5", "--h1", "39", "--h2", "195"]);
    assert_eq!(v["isomorphic"], true);
}

#[test]
fn ss_image_round_trips() {
    let v = json(&["ss-image", "--p", "5", "--r", "1"]);
    assert_eq!(v["image"]["base"]["induced"]["H"], 39);
    assert_eq!(v["image"]["irreducible"], true);
    assert_eq!(v["inverse"]["r"], 1);
}

#[test]
fn normalize_with_noise_is_seed_stable() {
    let args = ["normalize", "--p", "5", "--d", "4,1,4,1", "--t", "-3,-3,-3,-3", "--b", "3,2,1,0", "--noise", "--prec", "30"];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(a, b);
    let plain = json(&args[..args.len() - 3].iter().chain(["--prec", "30"].iter()).copied().collect::<Vec<_>>());
    assert_eq!(a["normal_form"], plain["normal_form"]);
}

#[test]
fn psi_of_x_cubed() {
    let v = json(&["psi", "--p", "3", "--vector", "3:1", "--prec", "30"]);
    let coord = &v["psi"][0]["coeffs"];
    assert_eq!(coord["1"]["coeffs"], serde_json::json!([1]));
    assert_eq!(coord.as_object().unwrap().len(), 1);
}

#[test]
fn bijection_report_at_three() {
    let v = json(&["verify-bijection", "--p", "3", "--m", "4"]);
    let r = &v["report"];
    assert_eq!(r["injective"], true);
    assert_eq!(r["surjective"], true);
    assert_eq!(r["ss_twist_classes"], 2);
}

#[test]
fn quick_selftest_passes() {
    let (code, out, _) = run(&["selftest", "--quick", "--format", "table"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 9);
}
