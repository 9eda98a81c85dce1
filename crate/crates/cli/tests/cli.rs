use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bfs_sieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfs-sieve"))
        .args(args)
        .arg("--quiet")
        .env_remove("BFS_SIEVE_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn three_algorithms_agree() {
    let out = bfs_sieve(&[
        "--scale",
        "10",
        "--ranks",
        "4",
        "--alg",
        "bit,wah,dir-wah",
        "--codec",
        "wah:64",
        "--seed",
        "7",
        "--source",
        "5",
        "--stable",
    ]);
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    let counts = |r: &Value| -> Vec<u64> {
        r["per_level"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| l["frontier_count"].as_u64().unwrap())
            .collect()
    };
    for r in reports {
        assert_eq!(r["validation"]["passed"], Value::Bool(true));
        assert_eq!(counts(r), counts(&reports[0]));
    }
    let names: Vec<&str> = reports
        .iter()
        .map(|r| r["config"]["algorithm"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["BIT", "WAH", "DIR-WAH"]);
    assert!(reports[1]["totals"]["C"].is_number());
    assert!(reports[2]["totals"]["C_prime"].is_number());
}

#[test]
fn stable_output_is_byte_identical() {
    let args = [
        "--scale", "9", "--ranks", "1,3", "--source", "random:2", "--stable", "--reps", "2",
    ];
    let a = bfs_sieve(&args);
    let b = bfs_sieve(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_has_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("levels.csv");
    let out = bfs_sieve(&[
        "--scale",
        "8",
        "--alg",
        "bit",
        "--source",
        "1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("algorithm,codec,ranks,source,rep,level,frontier_count"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 2);
    assert!(rows.iter().all(|r| r.starts_with("BIT,raw,1,1,0,")));
}

fn export(path: &Path) {
    let out = bfs_sieve(&["--scale", "8", "--seed", "3", "--export-edges", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn edge_list_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.kronel");
    export(&path);
    let from_file = json(&bfs_sieve(&[
        "--graph",
        path.to_str().unwrap(),
        "--ranks",
        "1",
        "--alg",
        "bit",
        "--source",
        "2",
        "--stable",
    ]));
    let generated = json(&bfs_sieve(&[
        "--scale", "8", "--seed", "3", "--ranks", "1", "--alg", "bit", "--source", "2", "--stable",
    ]));
    assert_eq!(from_file[0]["config"]["graph"]["kind"], "edge_list");
    assert_eq!(from_file[0]["per_level"], generated[0]["per_level"]);
    assert_eq!(from_file[0]["totals"], generated[0]["totals"]);
}

#[test]
fn weak_scaling_sweep() {
    let reports = json(&bfs_sieve(&[
        "--ranks",
        "1,2,4",
        "--scale-per-rank",
        "6",
        "--alg",
        "bit,dir-wah",
        "--source",
        "random:1",
        "--stable",
    ]));
    let ns: Vec<u64> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["config"]["graph"]["n"].as_u64().unwrap())
        .collect();
    assert_eq!(ns, [64, 64, 128, 128, 256, 256]);
}

#[test]
fn usage_and_io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.kronel");
    let garbage = dir.path().join("garbage.kronel");
    std::fs::write(&garbage, b"not an edge list").unwrap();
    for args in [
        vec!["--codec", "zlib"],
        vec!["--alg", "dfs"],
        vec!["--ranks", "0"],
        vec!["--source", "random:0"],
        vec!["--scale", "4", "--source", "99"],
        vec!["--scale", "4", "--ranks", "32"],
        vec!["--graph", missing.to_str().unwrap()],
        vec!["--graph", garbage.to_str().unwrap()],
        vec!["--ranks", "3", "--scale-per-rank", "6"],
        vec!["--alpha", "-1"],
        vec!["--unknown-flag"],
    ] {
        let out = bfs_sieve(&args);
        assert_eq!(
            out.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn help_exits_zero() {
    let out = bfs_sieve(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--scale-per-rank"));
}

#[test]
fn thread_cap_is_honoured_and_checked() {
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_bfs-sieve"))
            .args([
                "--scale", "8", "--ranks", "4", "--alg", "dir-wah", "--source", "0", "--quiet",
            ])
            .env("BFS_SIEVE_THREADS", value)
            .output()
            .unwrap()
    };
    assert!(run("2").status.success());
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
}
