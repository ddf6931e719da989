use std::path::PathBuf;
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_blowdown-lab")
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(exe());
    cmd.args(args).env("BLOWDOWN_LAB_COLOR", "0");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn blowdown-lab")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_main_scenario_passes() {
    let out = run(&["verify", scenario("main.json").to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("h1_blowdown: Z/4"), "got: {text}");
    assert!(text.contains("k2 contracted = 2"));
    assert!(text.contains("result: PASS"));
}

#[test]
fn verify_all_bundled_scenarios_in_one_call() {
    let files: Vec<PathBuf> = ["main.json", "main_prime.json", "variant_6_2.json", "appendix.json"]
        .iter()
        .map(|n| scenario(n))
        .collect();
    let args: Vec<&str> = std::iter::once("verify")
        .chain(files.iter().map(|f| f.to_str().unwrap()))
        .collect();
    let out = run(&args, &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("scenario: main"));
    assert!(text.contains("scenario: appendix"));
    assert!(text.contains("h1_blowdown: Z/2 + Z/2"));
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let path = scenario("variant_6_2.json");
    let args = ["verify", path.to_str().unwrap(), "--format", "json"];
    let a = run(&args, &[]);
    let b = run(&args, &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let parsed: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(parsed["pass"], serde_json::Value::Bool(true));
    assert_eq!(parsed["k2_contracted"], "2");
}

#[test]
fn mismatched_expectation_exits_one() {
    let dir = std::env::temp_dir().join(format!("blowdown-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tampered = dir.join("tampered.json");
    let text = std::fs::read_to_string(scenario("main.json"))
        .unwrap()
        .replace("\"k2_contracted\": \"2\"", "\"k2_contracted\": \"3\"");
    std::fs::write(&tampered, text).unwrap();
    let out = run(&["verify", tampered.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("result: FAIL"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["verify", "/no/such/file.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chain_classify_output() {
    let out = run(&["chain", "classify", "7,3,2,2,2,2"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "p=72 q=11 classT d=2 n=6 a=1\n");

    let out = run(&["chain", "classify", "3"], &[]);
    assert_eq!(stdout(&out), "p=3 q=1 classT none\n");

    let out = run(&["chain", "classify", "2,2,2"], &[]);
    assert_eq!(stdout(&out), "p=4 q=3 classT rdp\n");

    let out = run(&["chain", "classify", "7,x"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chain_expand_and_homology_output() {
    let out = run(&["chain", "expand", "72", "11"], &[]);
    assert_eq!(stdout(&out), "[7,3,2,2,2,2]\n");

    let out = run(&["chain", "expand", "36", "5"], &[]);
    assert_eq!(stdout(&out), "[8,2,2,2,2]\n");

    let out = run(&["chain", "expand", "4", "2"], &[]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["chain", "homology", "4"], &[]);
    assert_eq!(stdout(&out), "boundary=Z/4 milnor=Z/2\n");

    let out = run(&["chain", "homology", "3"], &[]);
    assert_eq!(stdout(&out), "boundary=Z/3 milnor=not class T\n");
}

#[test]
fn chain_enumerate_lists_small_chains() {
    let out = run(&["chain", "enumerate", "--max-len", "3"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    for want in ["[4]", "[2,5]", "[5,2]", "[3,3]", "[2]", "[2,2,2]"] {
        assert!(lines.contains(&want), "missing {want} in {lines:?}");
    }
}

#[test]
fn graph_dot_export() {
    let out = run(&["graph", scenario("main.json").to_str().unwrap(), "--dot"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("graph dual {"));
    assert!(text.contains("\"E16\" [label=\"E16 (-7)\"]"));
}

#[test]
fn color_env_controls_ansi() {
    let path = scenario("main.json");
    let plain = run(&["verify", path.to_str().unwrap()], &[("BLOWDOWN_LAB_COLOR", "0")]);
    assert!(!stdout(&plain).contains('\x1b'));
    let colored = run(&["verify", path.to_str().unwrap()], &[("BLOWDOWN_LAB_COLOR", "1")]);
    assert!(stdout(&colored).contains("\x1b[32m"));
}
