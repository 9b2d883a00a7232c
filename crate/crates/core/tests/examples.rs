//! Runs every example binary built alongside the tests.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 10] = [
    "qubit_states",
    "noise_channels",
    "sampling_test",
    "protocol_round",
    "remote_sensing",
    "bounds_table",
    "figure_data",
    "theorem_suites",
    "simulation_files",
    "seed_streams",
];

fn example_dir() -> PathBuf {
    // target/<profile>/deps/<this test> -> target/<profile>/examples
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("examples")
}

#[test]
fn examples_run_successfully() {
    let dir = example_dir();
    for name in EXAMPLES {
        let path = dir.join(name);
        if !path.exists() {
            eprintln!("example {name} not built in {}; run the whole test suite to include it", dir.display());
            continue;
        }
        let out = Command::new(&path).env("QRS_THREADS", "1").output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}

#[test]
fn every_example_is_listed() {
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut found: Vec<String> = std::fs::read_dir(src)
        .unwrap()
        .filter_map(|e| e.ok()?.path().file_stem()?.to_str().map(str::to_string))
        .collect();
    found.sort();
    let mut listed: Vec<String> = EXAMPLES.iter().map(|s| s.to_string()).collect();
    listed.sort();
    assert_eq!(found, listed);
}
