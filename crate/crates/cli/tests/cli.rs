//! Behavioural tests for the command-line interface: exit codes, selector
//! resolution and the shape of the reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn valor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

#[test]
fn validate_reports_ok_and_exits_zero() {
    let output = valor(&["validate", "--scenario", &fixture("table3.toml")]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("scenario 'table3': OK"));
}

#[test]
fn validate_rejects_corrupt_files_with_exit_two() {
    let dir = std::env::temp_dir().join("valor-corrupt-fixture");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.toml");
    std::fs::write(&path, "this is not a scenario").unwrap();
    let output = valor(&["validate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn validate_lists_consistency_warnings() {
    let dir = std::env::temp_dir().join("valor-warning-fixture");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("negation.toml");
    std::fs::write(
        &path,
        r#"
name = "negation"
agents = ["robot"]
propositions = ["p"]
actions = ["a"]
start = []
horizon = 1

[[levels]]
values = [
  { name = "up", formula = "G p" },
  { name = "down", formula = "!(G p)" },
]

[[transitions]]
from = "*"
to = ["p"]
"#,
    )
    .unwrap();
    let output = valor(&["validate", "--scenario", path.to_str().unwrap()]);
    assert!(output.status.success(), "warnings do not fail validation");
    assert!(stdout(&output).contains("warning:"));
}

#[test]
fn missing_scenario_file_exits_two() {
    let output = valor(&["validate", "--scenario", "/nonexistent/nowhere.toml"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_strategy_selector_exits_two() {
    let output = valor(&[
        "anticipate",
        "--scenario",
        &fixture("table3.toml"),
        "--agent",
        "anna",
        "--strategy",
        "sigma_Z",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn incomplete_joint_selector_exits_two() {
    let output = valor(&[
        "play",
        "--scenario",
        &fixture("table3.toml"),
        "--joint",
        "anna=sigma_A",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn fuzz_with_zero_count_is_a_usage_error() {
    let output = valor(&["fuzz", "--count", "0", "--seed", "1"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn structured_fuzz_requires_a_seed() {
    let output = valor(&["fuzz", "--count", "1", "--format", "structured"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn fuzz_small_batch_passes() {
    let output = valor(&["fuzz", "--count", "3", "--seed", "21"]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("result: 3/3 passed"));
}

#[test]
fn attribute_reports_blocked_accusations() {
    let output = valor(&[
        "attribute",
        "--scenario",
        &fixture("table3.toml"),
        "--joint",
        "anna=sigma_A,ben=sigma_B_p",
        "--agent",
        "anna",
        "--kind",
        "inexcusable",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("weak excuse"));
    assert!(text.contains("[blocked]"));
}

#[test]
fn liability_query_names_the_accuser() {
    let output = valor(&[
        "attribute",
        "--scenario",
        &fixture("table6.toml"),
        "--joint",
        "anna=sigma_A_p,ben=sigma_B_p",
        "--agent",
        "anna",
        "--liability",
        "!F omega1",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("liable for '!F omega1' via sigma_A"));
}

#[test]
fn recommend_prints_the_three_sets() {
    let output = valor(&[
        "recommend",
        "--scenario",
        &fixture("table6.toml"),
        "--agent",
        "anna",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("regret-minimising: sigma_A"));
    assert!(text.contains("non-dominated: sigma_A"));
    assert!(text.contains("recommended: sigma_A"));
}

#[test]
fn recommend_keeps_both_rows_on_the_symmetric_grid() {
    let output = valor(&[
        "recommend",
        "--scenario",
        &fixture("table3.toml"),
        "--agent",
        "anna",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("recommended: sigma_A, sigma_A_p"));
}

#[test]
fn explain_reproduces_the_compensation_narrative() {
    let output = valor(&[
        "explain",
        "--scenario",
        &fixture("compensation.toml"),
        "--agent",
        "anna",
        "--strategy",
        "sigma",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("{-omega1, +omega2}"));
    assert!(text.contains("{-omega1}"));
    assert!(text.contains("both sigma and sigma_p risk violating omega1"));
    assert!(text.contains("sigma compensates by satisfying omega2"));
}

#[test]
fn explain_cites_the_dominating_alternative() {
    let output = valor(&[
        "explain",
        "--scenario",
        &fixture("table6.toml"),
        "--agent",
        "anna",
        "--strategy",
        "sigma_A_p",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("sigma_A weakly dominates sigma_A_p"));
}

#[test]
fn explain_on_a_dictator_reports_no_avoidable_violations() {
    let dir = std::env::temp_dir().join("valor-dictator-fixture");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dictator.toml");
    std::fs::write(
        &path,
        r#"
name = "dictator"
row_agent = "anna"
col_agent = "ben"
row_labels = ["win", "also_win"]
col_labels = ["one", "two"]
levels = [["omega1"]]
cells = [
  [["omega1"], ["omega1"]],
  [["omega1"], ["omega1"]],
]
"#,
    )
    .unwrap();
    let output = valor(&[
        "explain",
        "--scenario",
        path.to_str().unwrap(),
        "--agent",
        "anna",
        "--strategy",
        "win",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("no avoidable violations"));
}

#[test]
fn regret_all_witnesses_lists_ties() {
    let output = valor(&[
        "regret",
        "--scenario",
        &fixture("table3.toml"),
        "--agent",
        "anna",
        "--strategy",
        "sigma_A",
        "--all-witnesses",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("witness:"));
}

#[test]
fn index_selectors_work() {
    let output = valor(&[
        "anticipate",
        "--scenario",
        &fixture("table6.toml"),
        "--agent",
        "anna",
        "--strategy",
        "1",
        "--kind",
        "inexcusable",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("{-omega1}"));
}
