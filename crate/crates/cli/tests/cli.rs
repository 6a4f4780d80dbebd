use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    root.join(format!("{name}.tss")).to_string_lossy().into_owned()
}

fn ruleform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruleform")).args(args).env_remove("RULEFORM_CACHE_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn priority_is_ready_trace() {
    let o = ruleform(&["check", "--format", "ready-trace", &fixture("priority")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("holds"));
}

#[test]
fn priority_is_not_readiness() {
    let o = ruleform(&["check", "--format", "readiness", &fixture("priority")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("does not hold"));
    assert!(out.contains("prio"), "{out}");
}

#[test]
fn decompose_prints_the_inverse_image() {
    let o = ruleform(&["decompose", "--term", "f(f(x))", "--formula", "<b><a>tt", &fixture("inverse")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "x := <b><b>tt");
}

#[test]
fn json_output_parses() {
    let o = ruleform(&["--out", "json", "compare", "--notion", "T", "--left", "a.b", "--right", "a.b+a.c", &fixture("bpa")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["converse"], false);
}

#[test]
fn fixtures_are_addressable_by_name() {
    let o = ruleform(&["sat", "--formula", "<a><b>tt", "--term", "a.b", "@bpa"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("yes"));
}

#[test]
fn transform_yields_a_parsable_specification() {
    let o = ruleform(&["transform", &fixture("closure")]);
    assert_eq!(o.status.code(), Some(0));
    let back = ruleform_parse(&stdout(&o));
    assert!(back.is_ok(), "{:?}", back.err());
}

fn ruleform_parse(src: &str) -> Result<(), String> {
    let dir = std::env::temp_dir().join(format!("ruleform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("plus.tss");
    std::fs::write(&p, src).unwrap();
    let o = ruleform(&["check", "--format", "ntyft-ntyxt", &p.to_string_lossy()]);
    match o.status.code() {
        Some(0 | 1) => Ok(()),
        _ => Err(String::from_utf8_lossy(&o.stderr).into_owned()),
    }
}

#[test]
fn conservative_extension_of_bpa() {
    let o = ruleform(&["conservative", "--syntactic", "--base", &fixture("bpa"), &fixture("priority")]);
    assert_eq!(o.status.code(), Some(0));
    let o = ruleform(&["conservative", "--semantic", "--base", &fixture("bpa"), &fixture("priority")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ruleform(&["check", &fixture("priority")]).status.code(), Some(2));
    assert_eq!(ruleform(&["check", "--format", "nonsense", &fixture("priority")]).status.code(), Some(2));
    assert_eq!(ruleform(&["conservative", "--base", &fixture("bpa"), &fixture("priority")]).status.code(), Some(2));
    let o = ruleform(&["check", "--format", "gsos", "/nonexistent.tss"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn small_fuzz_run_passes() {
    let o = ruleform(&["fuzz-precongruence", "--notion", "RT", "--terms", "4", "--contexts", "2", "--max-instances", "20", &fixture("priority")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("passed"));
}

#[test]
fn fixture_listing_and_criterion_run() {
    let o = ruleform(&["fixtures", "list"]);
    assert!(stdout(&o).lines().any(|l| l == "priority"));
    let o = ruleform(&["fixtures", "run", "--criterion", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS criterion 2"));
}
