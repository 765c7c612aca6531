//! Acceptance criterion: repeated runs of every structured-mode command
//! with fixed inputs produce byte-identical output.

use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[String]) -> (Option<i32>, Vec<u8>) {
    let output = Command::new(env!("CARGO_BIN_EXE_valor"))
        .args(args)
        .output()
        .expect("binary runs");
    (output.status.code(), output.stdout)
}

#[test]
fn criterion_5_structured_output_is_byte_identical() {
    let table3 = fixture("table3.toml");
    let table6 = fixture("table6.toml");
    let compensation = fixture("compensation.toml");
    let shopping = fixture("shopping_centre.toml");
    let commands: Vec<Vec<String>> = vec![
        vec!["validate", "--scenario", &table3],
        vec!["validate", "--scenario", &shopping],
        vec!["play", "--scenario", &table3, "--joint", "anna=sigma_A,ben=sigma_B"],
        vec![
            "attribute",
            "--scenario",
            &table3,
            "--joint",
            "anna=sigma_A,ben=sigma_B_p",
            "--agent",
            "anna",
            "--kind",
            "inexcusable",
            "--liability",
            "!F omega1",
        ],
        vec![
            "anticipate",
            "--scenario",
            &table3,
            "--agent",
            "anna",
            "--strategy",
            "sigma_A",
            "--kind",
            "passive",
            "--all-witnesses",
        ],
        vec!["dominance", "--scenario", &table6, "--agent", "anna"],
        vec![
            "regret",
            "--scenario",
            &table6,
            "--agent",
            "anna",
            "--all-witnesses",
        ],
        vec!["recommend", "--scenario", &table6, "--agent", "anna"],
        vec![
            "explain",
            "--scenario",
            &compensation,
            "--agent",
            "anna",
            "--strategy",
            "sigma",
        ],
        vec!["fuzz", "--count", "3", "--seed", "5"],
        vec!["fuzz", "--count", "3", "--seed", "5", "--jobs", "3"],
    ]
    .into_iter()
    .map(|args| {
        let mut args: Vec<String> = args.into_iter().map(str::to_string).collect();
        args.push("--format".into());
        args.push("structured".into());
        args
    })
    .collect();

    let mut failures = Vec::new();
    for args in &commands {
        let (code_a, bytes_a) = run(args);
        let (code_b, bytes_b) = run(args);
        if code_a != Some(0) {
            failures.push(format!("{} exited with {:?}", args.join(" "), code_a));
            continue;
        }
        if code_a != code_b || bytes_a != bytes_b {
            failures.push(format!("{} is not reproducible", args.join(" ")));
        }
    }

    // the text-mode fuzz report is pinned to the same guarantee
    let text_fuzz: Vec<String> =
        ["fuzz", "--count", "3", "--seed", "5"].iter().map(|s| s.to_string()).collect();
    let (_, first) = run(&text_fuzz);
    let (_, second) = run(&text_fuzz);
    if first != second {
        failures.push("text fuzz output is not reproducible".into());
    }

    if failures.is_empty() {
        println!("acceptance 5.determinism: PASS");
    } else {
        println!("acceptance 5.determinism: FAIL ({})", failures.join("; "));
        panic!("acceptance criterion 5 failed: {}", failures.join("; "));
    }
}
