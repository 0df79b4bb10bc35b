// SPDX-License-Identifier: Apache-2.0

mod common;

use std::fs;
use std::io::BufReader;
use std::path::Path;

use common::*;
use netcoop::experiment::{self, run_experiment, DatasetFormat, ExperimentConfig};
use netcoop::ranking::Algorithm;

fn karate_config(out: &Path) -> ExperimentConfig {
    ExperimentConfig::new(data_dir().join("karate.txt"), DatasetFormat::EdgeList, 1.8, 42, out)
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    names
}

#[test]
fn default_run_writes_every_series() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = run_experiment(&karate_config(dir.path())).unwrap();
    assert_eq!(manifest.series_files.len(), 18);
    assert_eq!(csv_files(dir.path()).len(), 18);
    for (_, _, path) in &manifest.series_files {
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), 501, "{}", path.display());
        assert!(text.starts_with("timestep,value,omitted\n"));
    }
    let listed = fs::read_to_string(&manifest.manifest_path).unwrap();
    assert!(listed.contains(&manifest.trajectory_checksum));
    assert_eq!(listed.lines().filter(|l| l.ends_with(".csv")).count(), 18);
    assert!(dir.path().join("karate.hits.var-kl.csv").exists());
}

#[test]
fn identical_configs_write_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = karate_config(a.path());
    cfg.repetitions = 1;
    let first = run_experiment(&cfg).unwrap();
    cfg.output_dir = b.path().to_path_buf();
    let second = run_experiment(&cfg).unwrap();
    assert_eq!(first.trajectory_checksum, second.trajectory_checksum);
    for name in csv_files(a.path()) {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn single_algorithm_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = karate_config(dir.path());
    cfg.algorithms = vec![Algorithm::SimpleDegree];
    cfg.time_window = 40;
    run_experiment(&cfg).unwrap();
    assert_eq!(
        csv_files(dir.path()),
        vec!["karate.sd.hamming.csv", "karate.sd.mean-kl.csv", "karate.sd.var-kl.csv"]
    );
}

#[test]
fn series_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = karate_config(dir.path());
    cfg.time_window = 80;
    cfg.algorithms = vec![Algorithm::PageRank, Algorithm::Betweenness];
    let g = netcoop::graph::load_edge_list(&cfg.dataset_path, false).unwrap();
    let trajs = netcoop::game::run_game(&g, &cfg.game_params()).unwrap();
    let ranks: Vec<_> = cfg
        .algorithms
        .iter()
        .map(|&a| netcoop::ranking::rank(&g, a, &cfg.ranking_params()).unwrap())
        .collect();
    let expected = netcoop::correlation::correlate_all(&g, &ranks, &trajs, &cfg.correlation_options()).unwrap();

    let manifest = run_experiment(&cfg).unwrap();
    for (series, (_, _, path)) in expected.iter().zip(&manifest.series_files) {
        let back = experiment::read_series_csv(BufReader::new(fs::File::open(path).unwrap())).unwrap();
        assert_eq!(back.len(), series.len());
        for (t, v) in back.iter().enumerate() {
            match (v, series.value(t)) {
                (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0)),
                (None, None) => {}
                other => panic!("timestep {t}: {other:?}"),
            }
        }
    }
}

#[test]
fn failed_runs_leave_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("karate.cl.hamming.csv");
    fs::create_dir(&blocker).unwrap();
    let mut cfg = karate_config(dir.path());
    cfg.time_window = 20;
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, netcoop::Error::Io { .. }), "{err:?}");
    let left: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(left.len(), 1);
    assert!(blocker.is_dir());

    let fresh = dir.path().join("nested/out");
    fs::remove_dir(&blocker).unwrap();
    let mut bad = karate_config(&fresh);
    bad.dataset_path = dir.path().join("missing.txt");
    let err = run_experiment(&bad).unwrap_err();
    assert!(err.to_string().contains("loading dataset"));
    assert!(!fresh.exists());
}

#[test]
fn gml_datasets_and_trajectory_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let gml = dir.path().join("ring.gml");
    let mut text = String::from("graph [\n  directed 0\n");
    for i in 0..8 {
        text.push_str(&format!("  node [ id {i} label \"n{i}\" ]\n"));
    }
    for i in 0..8 {
        text.push_str(&format!("  edge [ source {i} target {} ]\n", (i + 1) % 8));
    }
    text.push_str("  edge [ source 0 target 4 ]\n]\n");
    fs::write(&gml, text).unwrap();

    let out = dir.path().join("out");
    let mut cfg = ExperimentConfig::new(&gml, DatasetFormat::infer(&gml), 1.5, 3, &out);
    cfg.time_window = 25;
    cfg.repetitions = 2;
    cfg.dump_trajectories = true;
    let manifest = run_experiment(&cfg).unwrap();
    assert_eq!(manifest.stats.node_count, 8);
    assert_eq!(manifest.stats.edge_count, 9);
    assert_eq!(manifest.extra_files.len(), 2);
    let strategies = fs::read_to_string(out.join("ring.strategies.csv")).unwrap();
    assert_eq!(strategies.lines().count(), 1 + 2 * 25 * 8);
    let coop = fs::read_to_string(out.join("ring.cooperativity.csv")).unwrap();
    assert_eq!(coop.lines().count(), 1 + 2 * 25);
}

#[test]
fn directed_edge_lists_can_rank_on_raw_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("arcs.txt");
    fs::write(&path, "0 1\n1 2\n2 0\n3 0\n4 0\n").unwrap();
    let mut cfg = ExperimentConfig::new(&path, DatasetFormat::EdgeList, 1.8, 1, dir.path().join("o"));
    cfg.directed = true;
    cfg.symmetrize = false;
    cfg.time_window = 10;
    let manifest = run_experiment(&cfg).unwrap();
    for r in &manifest.ranks {
        assert_eq!(r.directed_view, matches!(r.algorithm, Algorithm::PageRank | Algorithm::Hits));
    }
}

#[test]
fn stats_of_a_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("triangle.txt");
    fs::write(&path, "a b\nb c\nc a\n").unwrap();
    let g = experiment::load_dataset(&path, DatasetFormat::EdgeList, false).unwrap();
    let s = g.stats();
    assert_eq!((s.node_count, s.edge_count), (3, 3));
    assert_eq!(s.mean_clustering, 1.0);
    let text = experiment::format_stats("triangle", &s);
    assert!(text.lines().nth(1).unwrap().starts_with("triangle\t3\t3\t2.00\t0.00\t1.0000"));
}
