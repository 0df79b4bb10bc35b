// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn netcoop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcoop"))
        .args(args)
        .output()
        .expect("spawn netcoop")
}

fn karate() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/karate.txt")
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn stats_prints_table_row() {
    let out = netcoop(&["stats", "--dataset", &karate(), "--format", "edgelist"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row, vec!["karate", "34", "78", "4.59", "3.82", "0.5706"]);
    assert!(text.contains("(2M): 156"));
}

#[test]
fn run_writes_requested_series() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = netcoop(&[
        "run", "--dataset", &karate(), "--format", "edgelist", "--b", "1.5", "--seed", "9",
        "--time-window", "30", "--reps", "2", "--algorithms", "hits,bw", "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec![
            "karate.bw.hamming.csv",
            "karate.bw.mean-kl.csv",
            "karate.bw.var-kl.csv",
            "karate.hits.hamming.csv",
            "karate.hits.mean-kl.csv",
            "karate.hits.var-kl.csv",
            "karate.manifest.txt",
        ]
    );
    let csv = fs::read_to_string(out_dir.join("karate.hits.hamming.csv")).unwrap();
    assert_eq!(csv.lines().count(), 31);
}

#[test]
fn rank_dumps_csv() {
    let out = netcoop(&["rank", "--dataset", &karate(), "--algorithm", "sd"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("node_index,raw,normalized"));
    assert_eq!(text.lines().count(), 35);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    let top = rows.iter().copied().fold((0.0, 0.0), |a, r| if r.0 > a.0 { r } else { a });
    assert_eq!(top, (17.0, 1.0));
}

#[test]
fn failures_exit_nonzero_with_context() {
    let out = netcoop(&["stats", "--dataset", "/nonexistent/graph.txt"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("loading dataset") && err.contains("/nonexistent/graph.txt"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let out = netcoop(&[
        "run", "--dataset", &karate(), "--b", "0.5", "--seed", "1", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("b"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);

    let out = netcoop(&["rank", "--dataset", &karate(), "--algorithm", "eigen"]);
    assert!(!out.status.success());
}

#[test]
fn seed_is_required() {
    let out = netcoop(&["run", "--dataset", &karate(), "--b", "1.8", "--out", "/tmp/never"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}
