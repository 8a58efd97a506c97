use std::process::{Command, Output};

fn vpal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpal"))
        .args(args)
        .env_remove("VPAL_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = vpal(&all);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn v_command() {
    assert_eq!(stdout(&vpal(&["v", "18"])), "7");
    assert_eq!(stdout(&vpal(&["v", "1"])), "0");
    assert_eq!(stdout(&vpal(&["v", "81"])), "7");
    assert_eq!(json(&["v", "18"])["v"], "7");
}

#[test]
fn check_command_text_and_json_agree() {
    assert_eq!(stdout(&vpal(&["check", "18"])), "yes (7=7)");
    assert_eq!(stdout(&vpal(&["check", "12"])), "no (7≠10)");
    assert_eq!(stdout(&vpal(&["check", "22"])), "no (n = r(n))");
    for (n, expect) in [
        ("18", true),
        ("12", false),
        ("22", false),
        ("20", false),
        ("198", true),
    ] {
        assert_eq!(json(&["check", n])["is_vpal"], expect, "{n}");
        let text = stdout(&vpal(&["check", n]));
        assert_eq!(text.starts_with("yes"), expect, "{n}");
    }
}

#[test]
fn type_command() {
    assert_eq!(stdout(&vpal(&["type", "18", "4"])), "(2,2)");
    assert_eq!(stdout(&vpal(&["type", "12", "3"])), "not a v-palindrome");
    assert_eq!(stdout(&vpal(&["type", "13", "15"])), "(2,2)");
    let j = json(&["type", "13", "14"]);
    assert_eq!(j["is_vpal"], false);
    assert!(j["type"].is_null());
}

#[test]
fn procedure_json_follows_the_schema() {
    let j = json(&["procedure", "13"]);
    assert_eq!(j["n"], "13");
    assert_eq!(j["columns"][1]["A"], serde_json::json!(["3", "15"]));
    assert_eq!(j["first_table"][0][1], "ii");
    assert_eq!(j["c"], "15");
    let doc: vpal::procedure::ProcedureJson = serde_json::from_value(j).unwrap();
    assert_eq!(doc.solutions, vec![vec!["1", "1"], vec!["2", "2"]]);

    let j = json(&["procedure", "12"]);
    assert!(j["c"].is_null());
    assert_eq!(j["nondegenerate"], serde_json::json!([]));

    let text = stdout(&vpal(&["procedure", "18"]));
    assert!(text.contains("[iii]") && text.contains("[vi]") && text.contains("S = all k"));
}

#[test]
fn procedure_for_a_concatenation() {
    let j = json(&["procedure", "13", "--k", "3"]);
    assert_eq!(j["concatenations"], 3);
    assert_eq!(j["digit_len"], 6);
}

#[test]
fn exit_codes() {
    assert_eq!(vpal(&[]).status.code(), Some(64));
    assert_eq!(vpal(&["v", "abc"]).status.code(), Some(64));
    assert_eq!(vpal(&["v", "0"]).status.code(), Some(64));
    assert_eq!(vpal(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(vpal(&["procedure", "20"]).status.code(), Some(64));
    assert_eq!(vpal(&["--help"]).status.code(), Some(0));
    // product of two 19-digit primes under a tiny budget
    let hard = "1000000000000000012000000000000000027";
    let o = vpal(&["--budget", "0.001", "v", hard]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn budget_from_environment() {
    let hard = "1000000000000000012000000000000000027";
    let o = Command::new(env!("CARGO_BIN_EXE_vpal"))
        .args(["v", hard])
        .env("VPAL_BUDGET", "0.001")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_subcommands() {
    for args in [
        vec!["verify", "oracle", "--nmax", "200", "--kmax", "4"],
        vec![
            "verify",
            "invariance",
            "--nmax",
            "150",
            "--kmax",
            "3",
            "--jmax",
            "3",
        ],
        vec!["verify", "structure", "--nmax", "100", "--kmax", "3"],
        vec!["verify", "periodicity", "--nmax", "100"],
        vec!["verify", "disjointness", "--nmax", "300"],
        vec!["verify", "lemmas", "--pmax", "50", "--kmax", "12"],
        vec!["verify", "enumerate", "--limit", "1000"],
    ] {
        let o = vpal(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
    let j = json(&["verify", "lemmas", "--pmax", "30"]);
    assert_eq!(j["failed"], 0);
    assert_eq!(j["checked"], j["passed"]);
    let j = json(&["verify", "enumerate", "--limit", "100"]);
    assert_eq!(j["vpals"], serde_json::json!([18, 81]));
    assert_eq!(j["golden_match"], true);
}

#[test]
fn enumerate_against_a_wrong_golden_file_fails() {
    let dir = std::env::temp_dir().join(format!("vpal-golden-{}", std::process::id()));
    std::fs::write(&dir, "18\n80\n").unwrap();
    let o = vpal(&[
        "verify",
        "enumerate",
        "--limit",
        "100",
        "--golden",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_file(&dir).ok();
}

fn schema_keys(file: &str) -> Vec<String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/").to_string() + file;
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let mut keys: Vec<String> = schema["properties"]
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    keys.sort();
    let mut required: Vec<String> = schema["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    required.sort();
    assert_eq!(keys, required, "{file}");
    keys
}

fn object_keys(v: &serde_json::Value) -> Vec<String> {
    let mut keys: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    keys
}

#[test]
fn shipped_schemas_name_every_field() {
    let keys = schema_keys("procedure-result.schema.json");
    for n in ["13", "12", "18"] {
        assert_eq!(object_keys(&json(&["procedure", n])), keys);
    }
    let keys = schema_keys("verification-report.schema.json");
    assert_eq!(
        object_keys(&json(&["verify", "lemmas", "--pmax", "20"])),
        keys
    );
}
