use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scissors")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn group_json() {
    let o = run(&["group", "RP1", "--ring", "gf(11)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["odd_part"], serde_json::json!([3]));
    assert_eq!(v["ring"], "gf(11)");
    assert_eq!(v["group"], "RP1");
    assert!(v["invariant_factors"].is_array());
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "key-identity", "--ring", "z/7^2"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "idempotent", "--ring", "gf(13)"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "idempotent", "--ring", "gf(11)"]).status.code(), Some(0));
    let o = run(&["verify", "key-identity", "--ring", "gf(10)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gf(10)"));
    assert_eq!(run(&["verify", "nonsense", "--ring", "gf(7)"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn amalgam_output() {
    let o = run(&["amalgam", "--p", "7", "--matrix", "1,0;1/7,1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["length"], 3);
    assert_eq!(v["product_ok"], true);
    assert_eq!(run(&["amalgam", "--p", "7", "--matrix", "2,0;0,1"]).status.code(), Some(2));
}

#[test]
fn tree_ball_and_dot() {
    let o = run(&["tree", "ball", "--p", "7", "--radius", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("vertices,PASS,65 (expected 65)"));
    let dot = stdout(&run(&["tree", "ball", "--p", "3", "--radius", "2", "--dot"]));
    assert!(dot.starts_with("graph ball {"));
    assert_eq!(dot.matches(" -- ").count(), 16);
}

#[test]
fn specialize_witness() {
    let o = run(&["specialize", "--p", "11", "--expr", "<<11>>*g(2)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rho0_zero"], true);
    assert_eq!(v["rho_pi_zero"], false);
    assert_eq!(run(&["specialize", "--p", "11", "--expr", "[1"]).status.code(), Some(2));
}

#[test]
fn pbar_table_formats() {
    let o = run(&["pbar-table", "--p-min", "11", "--p-max", "29", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("29,15,3,5,")));
    let o = run(&["pbar-table", "--p-min", "11", "--p-max", "13", "--check", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["computed"], true);
}

#[test]
fn deterministic_given_seed() {
    let args = ["verify", "specialization", "--ring", "gf(11)", "--seed", "42", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}
