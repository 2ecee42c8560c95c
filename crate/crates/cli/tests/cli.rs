use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ggs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggs")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = ggs(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn config(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ggs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn classify_default_config() {
    let p0 = config("p0.json", r#"{"p":3,"m":[1,2,3,4],"e":[1,-1]}"#);
    let v = json(&["classify", "--config", p0.to_str().unwrap()]);
    assert_eq!(v["branch_route"], "VIA_GAMMA3_SYMMETRIC");
    assert_eq!(v["integer_sum"], 0);
    assert_eq!(json(&["classify"]), v);
}

#[test]
fn order_of_ab() {
    let out = ggs(&["order", "a*b", "--level", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "81");
    assert_eq!(json(&["order", "a*b^3", "--level", "3"])["order"], 27);
}

#[test]
fn identities_suite_exits_zero() {
    let out = ggs(&["identities", "run", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&["identities", "run", "--depth", "3"]);
    assert_eq!(v["fail"], 0);
    let one = json(&["identities", "run", "--id", "AB_POWER", "--bind", "i=2"]);
    assert!(one["pass"].as_u64().unwrap() > 0);
}

#[test]
fn usage_and_validation_errors_exit_two() {
    assert_eq!(ggs(&["order", "a*(b", "--level", "3"]).status.code(), Some(2));
    assert_eq!(ggs(&["order", "a", "--level", "9"]).status.code(), Some(2));
    assert_eq!(ggs(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ggs(&["identities", "run", "--id", "NOPE"]).status.code(), Some(2));
    let bad = config("bad.json", r#"{"p":3,"m":[1,2],"e":[1,1],"extra":0}"#);
    let out = ggs(&["--json", "--config", bad.to_str().unwrap(), "classify"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "INVALID_CONFIG");
}

#[test]
fn parse_errors_point_at_the_span() {
    let out = ggs(&["order", "a*(b", "--level", "2"]);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("PARSE_ERROR") && msg.contains("a*(b") && msg.contains('^'), "{msg}");
}

#[test]
fn beauville_verdicts() {
    let v = json(&["beauville", "verify", "--level", "3"]);
    assert_eq!(v["verdict"], "CERTIFIED_BEAUVILLE");
    assert_eq!(v["certificates"].as_array().unwrap().len(), 9);
    assert!(v["generation"][0]["caveat"].as_str().unwrap().starts_with("NECESSARY"));
    let p1 = config("p1.json", r#"{"p":3,"m":[1,2,3],"e":[1,1]}"#);
    let p1 = p1.to_str().unwrap();
    let v = json(&["--config", p1, "beauville", "verify", "--level", "2", "--pairs", "a", "b", "a*b", "b^-1*a"]);
    assert_eq!(v["verdict"], "NOT_BEAUVILLE");
    assert_eq!(v["obstruction"]["subgroup_order"], 9);
}

#[test]
fn descent_commands() {
    let v = json(&["descent", "locate-b", "b*comm(a,b)"]);
    assert_eq!(v["verified"], true);
    assert!(v["delta"].as_i64().unwrap().rem_euclid(3) != 0);
    let v = json(&["descent", "recover-a", "--delta", "1", "--z", "conj(b,a)*conj(b^-1,a^2)"]);
    assert_eq!(v["verified"], true);
    assert_eq!(ggs(&["descent", "recover-a", "--delta", "1", "--z", "b"]).status.code(), Some(2));
}

#[test]
fn eval_sections_abelianize_oracle() {
    let dot = std::env::temp_dir().join(format!("ggs-{}.dot", std::process::id()));
    let v = json(&["eval", "b", "--depth", "2", "--dot", dot.to_str().unwrap()]);
    assert_eq!(v["portrait"]["labels"][1], serde_json::json!([1, 8, 0]));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let v = json(&["sections", "comm(a,b)"]);
    assert_eq!(v["sections"].as_array().unwrap().len(), 3);
    assert_eq!(ggs(&["sections", "a"]).status.code(), Some(2));
    let v = json(&["abelianize", "b^-5*a"]);
    assert_eq!((v["epsilon_a"].as_u64(), v["epsilon_b"].as_i64()), (Some(1), Some(-5)));
    let v = json(&["oracle", "enumerate", "--level", "2"]);
    assert_eq!(v["size"], 243);
    assert_eq!(v["fingerprint"]["sound"], true);
    assert_eq!(ggs(&["oracle", "enumerate", "--level", "3"]).status.code(), Some(2));
}
