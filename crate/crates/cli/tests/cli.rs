//! End-to-end checks of the binary: exit codes, certificate round trips via
//! the filesystem, and flag handling.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn binstretch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binstretch"))
        .args(args)
        .env_remove("BINSTRETCH_CACHE_CAP_BYTES")
        .output()
        .expect("binary runs")
}

fn binstretch_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binstretch"))
        .args(args)
        .env_remove("BINSTRETCH_CACHE_CAP_BYTES")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn solve_win_and_loss_exit_codes() {
    let win = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "4",
    ]);
    assert_eq!(exit_code(&win), 0, "{win:?}");
    let text = stdout(&win);
    assert!(text.contains("alpha: 4/3 (1.3334)"), "{text}");
    assert!(text.contains("outcome: algorithm wins"), "{text}");

    let loss = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "3",
    ]);
    assert_eq!(exit_code(&loss), 1);
    assert!(stdout(&loss).contains("outcome: adversary wins"));
}

#[test]
fn solve_node_limit_is_inconclusive() {
    let out = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "4",
        "--node-limit",
        "1",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stdout(&out).contains("inconclusive"));
}

#[test]
fn usage_and_model_errors_exit_2() {
    // missing required flag
    let out = binstretch(&["solve", "--bins", "2", "--granularity", "3"]);
    assert_eq!(exit_code(&out), 2);
    // invalid bin count
    let out = binstretch(&[
        "solve",
        "--bins",
        "1",
        "--granularity",
        "3",
        "--capacity",
        "4",
    ]);
    assert_eq!(exit_code(&out), 2);
    // capacity below granularity
    let out = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "2",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn long_runs_are_gated() {
    let out = binstretch(&[
        "solve",
        "--bins",
        "6",
        "--granularity",
        "13",
        "--capacity",
        "19",
    ]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("--i-have-days"), "{err}");

    let out = binstretch(&["sweep", "--bins", "4", "--granularity", "22"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn memory_cap_aborts_with_exit_4() {
    let out = binstretch_with_env(
        &[
            "solve",
            "--bins",
            "2",
            "--granularity",
            "3",
            "--capacity",
            "4",
        ],
        "BINSTRETCH_CACHE_CAP_BYTES",
        "1",
    );
    assert_eq!(exit_code(&out), 4);

    let out = binstretch_with_env(
        &[
            "solve",
            "--bins",
            "2",
            "--granularity",
            "3",
            "--capacity",
            "4",
        ],
        "BINSTRETCH_CACHE_CAP_BYTES",
        "not-a-number",
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn sweep_reports_minimal_capacity() {
    let out = binstretch(&["sweep", "--bins", "2", "--granularity", "3"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("capacity 3: adversary wins"), "{text}");
    assert!(text.contains("capacity 4: algorithm wins"), "{text}");
    assert!(text.contains("minimal capacity: 4"), "{text}");
    assert!(text.contains("alpha: 4/3 (1.3334)"), "{text}");
}

#[test]
fn sweep_with_node_limit_is_inconclusive() {
    let out = binstretch(&[
        "sweep",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--node-limit",
        "1",
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn certificate_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("strategy.json");
    let cert_arg = cert_path.to_str().unwrap();

    let solve = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "4",
        "--cert",
        cert_arg,
    ]);
    assert_eq!(exit_code(&solve), 0, "{solve:?}");
    assert!(cert_path.exists());

    let verify = binstretch(&["verify", "--cert", cert_arg]);
    assert_eq!(exit_code(&verify), 0, "{verify:?}");
    assert!(stdout(&verify).contains("result: valid"));
}

#[test]
fn losing_solve_writes_no_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("strategy.json");

    let solve = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "3",
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&solve), 1);
    assert!(!cert_path.exists());
}

#[test]
fn verify_rejects_missing_truncated_and_tampered_files() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("strategy.json");
    let cert_arg = cert_path.to_str().unwrap();

    // missing file
    let out = binstretch(&["verify", "--cert", cert_arg]);
    assert_eq!(exit_code(&out), 2);

    let solve = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "4",
        "--cert",
        cert_arg,
    ]);
    assert_eq!(exit_code(&solve), 0);
    let text = std::fs::read_to_string(&cert_path).unwrap();

    // truncated file
    write_and_expect(
        &dir.path().join("truncated.json"),
        &text[..text.len() / 2],
        2,
    );

    // tampered bin index
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let nodes = doc["nodes"].as_object_mut().unwrap();
    let mut flipped = false;
    'outer: for (_, node) in nodes.iter_mut() {
        if let Some(branches) = node.get_mut("branches").and_then(|b| b.as_object_mut()) {
            for (_, decision) in branches.iter_mut() {
                if decision.get("bin").is_some() {
                    decision["bin"] = Value::from(63);
                    flipped = true;
                    break 'outer;
                }
            }
        }
    }
    assert!(flipped, "certificate had no placement to tamper with");
    write_and_expect(&dir.path().join("tampered.json"), &doc.to_string(), 1);
}

fn write_and_expect(path: &Path, content: &str, expected_exit: i32) {
    std::fs::write(path, content).unwrap();
    let out = binstretch(&["verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), expected_exit, "{out:?}");
}

#[test]
fn stats_and_trace_flags() {
    let out = binstretch(&[
        "solve",
        "--bins",
        "2",
        "--granularity",
        "3",
        "--capacity",
        "4",
        "--stats",
        "--trace-depth",
        "0",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("stat:solve_calls="), "{text}");
    assert!(text.contains("stat:cache_queries="), "{text}");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("trace: depth=0 L=[0,0];H=[]"), "{err}");
}

#[test]
fn alternative_solver_configurations_agree() {
    for extra in [&["--no-cache"][..], &["--che-literal"], &["--workers", "3"]] {
        let mut args = vec![
            "solve",
            "--bins",
            "2",
            "--granularity",
            "3",
            "--capacity",
            "4",
        ];
        args.extend_from_slice(extra);
        let out = binstretch(&args);
        assert_eq!(exit_code(&out), 0, "{extra:?}: {out:?}");
    }
}
