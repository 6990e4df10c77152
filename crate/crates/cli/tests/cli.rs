//! End-to-end checks of the command-line surface against the shipped
//! example configurations.

use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn twistaff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistaff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8")
}

#[test]
fn character_table_untwisted_level_one() {
    let cfg = config("sl2_id_l1.toml");
    let out = twistaff(&["character", "-c", cfg.to_str().unwrap(), "--cutoff", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0\t1\n1\t3\n2\t9\n3\t22\n4\t51\n");
}

#[test]
fn character_table_is_byte_stable() {
    let cfg = config("sl2_order2_l1.toml");
    let args = ["character", "-c", cfg.to_str().unwrap()];
    let a = twistaff(&args);
    let b = twistaff(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    // weights are shifted by the twist weight 1/24 and render reduced
    assert!(stdout(&a).starts_with("1/24\t1\n13/24\t2\n"));
}

#[test]
fn quotient_dims_match_the_lattice_character() {
    let cfg = config("sl2_id_l1.toml");
    let out = twistaff(&["quotient-dims", "-c", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0\t1\n1\t3\n2\t4\n3\t7\n4\t13\n");
}

#[test]
fn decompose_prints_the_nilpotent_log() {
    let cfg = config("sl2_unipotent.toml");
    let out = twistaff(&["decompose", "-c", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    // all exponents are zero and the chain is f -> h -> (-2) e
    assert!(text.contains("exponent\tf\t0\th"));
    assert!(text.contains("exponent\th\t0\ta2"));
    assert!(text.contains("jordan\ta2\t(-2)*e"));
    assert!(text.contains("nilpotent\t0\t-2\t0"));
}

#[test]
fn twist_weight_values() {
    let out = twistaff(&[
        "twist-weight",
        "-c",
        config("sl2_order2_l1.toml").to_str().unwrap(),
    ]);
    assert_eq!(stdout(&out), "w\t1/24\n");
    let out = twistaff(&[
        "twist-weight",
        "-c",
        config("sl2_id_adjoint.toml").to_str().unwrap(),
    ]);
    assert_eq!(stdout(&out), "e\t2/3\nh\t2/3\nf\t2/3\n");
}

#[test]
fn verify_passes_on_the_three_canonical_examples() {
    for name in ["sl2_id_l1.toml", "sl2_order2_l1.toml", "sl2_unipotent.toml"] {
        let out = twistaff(&[
            "verify",
            "-c",
            config(name).to_str().unwrap(),
            "--window",
            "2",
            "--cutoff",
            "2",
        ]);
        assert!(out.status.success(), "{name}: {}", stdout(&out));
        assert!(!stdout(&out).contains("\tfail\t"), "{name}");
    }
}

#[test]
fn validate_runs_lie_and_section2_only() {
    let out = twistaff(&[
        "validate",
        "-c",
        config("sl2_order2_l1.toml").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("section2\t"));
    assert!(text.contains("lie\t"));
    assert!(!text.contains("module\t"));
}

#[test]
fn json_output_is_valid_and_sorted() {
    let out = twistaff(&[
        "character",
        "-c",
        config("sl2_id_l1.toml").to_str().unwrap(),
        "--cutoff",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let rows = v["character"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["dimension"], 9);
}

#[test]
fn usage_errors_exit_one() {
    let out = twistaff(&["character"]);
    assert_eq!(out.status.code(), Some(1));
    let out = twistaff(&["character", "-c", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn math_domain_errors_exit_two() {
    let dir = std::env::temp_dir().join("twistaff-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("critical.toml");
    std::fs::write(
        &path,
        r#"
[algebra]
type = "sl"
n = "2"

[automorphism]
inner_exp = "0"

[module]
mode = "tilde"
level = "-2"
cutoff = "2"
space = "trivial"
"#,
    )
    .unwrap();
    let out = twistaff(&["build", "-c", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn broken_form_fails_validation_with_witness() {
    // sl(2) tables with a non-invariant form: (e,f) = 2 against (h,h) = 2
    let dir = std::env::temp_dir().join("twistaff-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken_form.toml");
    std::fs::write(
        &path,
        r#"
[algebra]
type = "structure"
labels = ["e", "h", "f"]
bracket = [
  ["1", "0", "0", "2"], ["0", "1", "0", "-2"],
  ["1", "2", "2", "-2"], ["2", "1", "2", "2"],
  ["0", "2", "1", "1"], ["2", "0", "1", "-1"],
]
form = [["0", "2", "2"], ["1", "1", "2"]]

[automorphism]
inner_exp = "0"

[module]
mode = "tilde"
level = "1"
cutoff = "2"
space = "trivial"
"#,
    )
    .unwrap();
    let out = twistaff(&["validate", "-c", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("lie\tstructure-invariants\tfail"), "{text}");
    assert!(text.contains("not invariant"), "{text}");
}

#[test]
fn build_summary_reports_central_charge() {
    let out = twistaff(&[
        "build",
        "-c",
        config("sl2_id_l2.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["central_charge"], "3/2");
    assert_eq!(v["mode"], "tilde");
    assert_eq!(v["alpha_policy"], "rational-exponents-only");
}
