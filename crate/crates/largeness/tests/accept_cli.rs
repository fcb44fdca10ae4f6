//! Demo suite against the built binary: exit codes and golden records.
//! `UPDATE_GOLDEN=1 cargo test -p largeness --test accept_cli` rewrites the
//! golden files from the current binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::Deserialize;
use serde_json::Value as Json;

#[derive(Deserialize)]
struct Entry {
    name: String,
    args: Vec<String>,
    exit: i32,
}

fn demos() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("demos")
}

fn largeness(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_largeness"))
        .current_dir(demos())
        .env_remove("LARGENESS_COST_GUARD")
        .args(args)
        .output()
        .expect("binary runs")
}

fn suite() -> Vec<Entry> {
    serde_json::from_str(&std::fs::read_to_string(demos().join("suite.json")).unwrap()).unwrap()
}

#[test]
fn suite_matches_exit_codes_and_goldens() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut problems = Vec::new();
    for e in suite() {
        let args: Vec<&str> = e.args.iter().map(String::as_str).collect();
        let out = largeness(&args);
        let code = out.status.code().unwrap_or(-1);
        if code != e.exit {
            problems.push(format!("{}: exit {code}, expected {}: {}", e.name, e.exit, String::from_utf8_lossy(&out.stderr)));
            continue;
        }
        let golden = demos().join("golden").join(format!("{}.json", e.name));
        if code == 3 {
            if !out.stdout.is_empty() || !String::from_utf8_lossy(&out.stderr).starts_with("error") {
                problems.push(format!("{}: usage errors go to stderr only", e.name));
            }
            continue;
        }
        if update {
            std::fs::write(&golden, &out.stdout).unwrap();
            continue;
        }
        match std::fs::read(&golden) {
            Ok(want) if want == out.stdout => {}
            Ok(_) => problems.push(format!("{}: record differs from {}", e.name, golden.display())),
            Err(_) => problems.push(format!("{}: no golden file", e.name)),
        }
    }
    assert!(problems.is_empty(), "{}", problems.join("\n"));
}

#[test]
fn records_carry_the_exit_code_and_validation() {
    // goldens are being rewritten concurrently
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        return;
    }
    for e in suite().into_iter().filter(|e| e.exit != 3) {
        let golden = demos().join("golden").join(format!("{}.json", e.name));
        let rec: Json = serde_json::from_str(&std::fs::read_to_string(golden).unwrap()).unwrap();
        assert_eq!(rec["exit_code"], e.exit, "{}", e.name);
        let replay = shell_words::split(rec["replay"].as_str().unwrap()).unwrap();
        assert_eq!(replay[0], "largeness", "{}", e.name);
        assert_eq!(replay[1..], e.args[..], "{}", e.name);
        assert!(rec["input_digest"].as_str().unwrap().starts_with("sha256:"), "{}", e.name);
        assert!(rec.get("wall_time_ms").is_none(), "{}", e.name);
        // anything found must have passed re-validation
        if e.exit == 0 && !rec["validated"].is_null() {
            assert_eq!(rec["validated"], true, "{}", e.name);
        }
    }
}

#[test]
fn text_format_prints_summary_and_exit() {
    let out = largeness(&["--format", "text", "cr-witness", "--set", "z9_triples.json", "--matrix", "z9_matrix.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 2, "{text}");
    assert!(text.contains("exit 0"), "{text}");
}

#[test]
fn out_flag_writes_the_record_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rec.json");
    let out = largeness(&["vdw", "--terms", "3", "--colors", "2", "--upto", "8", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let rec: Json = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rec["result"]["verdict"], "counterexample");
    assert_eq!(rec["replay"], "largeness vdw --terms 3 --colors 2 --upto 8");
}

#[test]
fn timing_is_opt_in() {
    let args = ["cr-check", "--set", "z4_evens.json", "--n", "2", "--r", "2"];
    let plain: Json = serde_json::from_slice(&largeness(&args).stdout).unwrap();
    assert!(plain.get("wall_time_ms").is_none());
    let mut timed_args = args.to_vec();
    timed_args.push("--timing");
    let timed: Json = serde_json::from_slice(&largeness(&timed_args).stdout).unwrap();
    assert!(timed["wall_time_ms"].is_number());
    assert_eq!(timed["result"], plain["result"]);
}

#[test]
fn cost_guard_from_environment_and_force() {
    let out = Command::new(env!("CARGO_BIN_EXE_largeness"))
        .current_dir(demos())
        .env("LARGENESS_COST_GUARD", "10")
        .args(["cr-check", "--set", "z4_evens.json", "--n", "2", "--r", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));

    let forced = largeness(&["vdw", "--terms", "3", "--colors", "2", "--upto", "30", "--force"]);
    assert_eq!(forced.status.code(), Some(0));
    let rec: Json = serde_json::from_slice(&forced.stdout).unwrap();
    assert!(rec["bounds"]["guard"].is_null());
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(largeness(&["--help"]).status.code(), Some(0));
    assert_eq!(largeness(&["cr-check", "--set", "z4_evens.json"]).status.code(), Some(3));
    assert_eq!(largeness(&["cr-check", "--set", "missing.json", "--n", "1", "--r", "1"]).status.code(), Some(3));
    assert_eq!(largeness(&["lift", "--set", "z9_triples.json", "--pair-matrix", "z9_pairs.json", "--steps", "0"]).status.code(), Some(3));
}
