// SPDX-License-Identifier: Apache-2.0

//! End-to-end pipeline: load a dataset, rank, play the game once, correlate
//! every ranking against the shared trajectories and write one CSV per
//! (algorithm, strategy) pair.

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::correlation::{correlate_all, AverageMode, CorrelationOptions, CorrelationSeries, CorrelationStrategy, Strategy3Mode};
use crate::error::{Error, Result};
use crate::game::{self, GameParams};
use crate::graph::{self, Graph, GraphStats};
use crate::ranking::{self, Algorithm, RankingParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    EdgeList,
    Gml,
}

impl DatasetFormat {
    /// `.gml` files are GML, anything else an edge list.
    pub fn infer(path: &Path) -> DatasetFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("gml") => DatasetFormat::Gml,
            _ => DatasetFormat::EdgeList,
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edgelist" | "edge-list" | "txt" => Ok(DatasetFormat::EdgeList),
            "gml" => Ok(DatasetFormat::Gml),
            _ => Err(Error::InvalidArgument(format!("unknown dataset format {s:?}"))),
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetFormat::EdgeList => "edgelist",
            DatasetFormat::Gml => "gml",
        })
    }
}

/// Loads a dataset. `directed` only applies to edge lists; GML files carry
/// their own `directed` flag.
pub fn load_dataset(path: &Path, format: DatasetFormat, directed: bool) -> Result<Graph> {
    let loaded = match format {
        DatasetFormat::EdgeList => graph::load_edge_list(path, directed),
        DatasetFormat::Gml => graph::load_gml(path),
    };
    loaded.map_err(|e| e.context("loading dataset"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset_path: PathBuf,
    pub format: DatasetFormat,
    /// Read edge lists as directed.
    pub directed: bool,
    /// Rank PageRank and HITS on the symmetrized graph (the game always is).
    pub symmetrize: bool,
    pub algorithms: Vec<Algorithm>,
    pub b: f64,
    pub time_window: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub beta: f64,
    pub epsilon: f64,
    pub average_mode: AverageMode,
    pub strategy3_mode: Strategy3Mode,
    pub output_dir: PathBuf,
    /// Also write per-node strategies and per-timestep cooperativity.
    pub dump_trajectories: bool,
}

impl ExperimentConfig {
    /// A config with the standard protocol: 500 timesteps, 10 realizations,
    /// all six algorithms, beta 0.85, epsilon 1e-9.
    pub fn new(
        dataset_path: impl Into<PathBuf>,
        format: DatasetFormat,
        b: f64,
        seed: u64,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        ExperimentConfig {
            dataset_path: dataset_path.into(),
            format,
            directed: false,
            symmetrize: true,
            algorithms: Algorithm::ALL.to_vec(),
            b,
            time_window: 500,
            repetitions: 10,
            seed,
            beta: 0.85,
            epsilon: 1e-9,
            average_mode: AverageMode::PerRealization,
            strategy3_mode: Strategy3Mode::VarVsVar,
            output_dir: output_dir.into(),
            dump_trajectories: false,
        }
    }

    pub fn game_params(&self) -> GameParams {
        GameParams {
            b: self.b,
            time_window: self.time_window,
            repetitions: self.repetitions,
            seed: self.seed,
        }
    }

    pub fn ranking_params(&self) -> RankingParams {
        RankingParams {
            beta: self.beta,
            ..RankingParams::default()
        }
    }

    pub fn correlation_options(&self) -> CorrelationOptions {
        CorrelationOptions {
            epsilon: self.epsilon,
            average_mode: self.average_mode,
            strategy3_mode: self.strategy3_mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.game_params().validate()?;
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no ranking algorithms selected".into()));
        }
        let mut sorted = self.algorithms.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.algorithms.len() {
            return Err(Error::InvalidArgument("ranking algorithms listed twice".into()));
        }
        Ok(())
    }

    /// File stem shared by every output of this dataset.
    pub fn dataset_stem(&self) -> String {
        self.dataset_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string())
    }

    pub fn series_path(&self, algorithm: Algorithm, strategy: CorrelationStrategy) -> PathBuf {
        self.output_dir
            .join(format!("{}.{}.{}.csv", self.dataset_stem(), algorithm, strategy))
    }
}

/// Convergence bookkeeping for one ranking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSummary {
    pub algorithm: Algorithm,
    pub directed_view: bool,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub stats: GraphStats,
    pub series_files: Vec<(Algorithm, CorrelationStrategy, PathBuf)>,
    /// Trajectory dumps, when requested.
    pub extra_files: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    pub ranks: Vec<RankSummary>,
    /// SHA-256 over all strategy snapshots the series were computed from.
    pub trajectory_checksum: String,
    pub mean_final_cooperativity: f64,
    pub duration: Duration,
    pub version: &'static str,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let c = &self.config;
        let s = &self.stats;
        let mut out = String::new();
        let _ = writeln!(out, "netcoop {}", self.version);
        let _ = writeln!(out);
        let _ = writeln!(out, "[config]");
        let _ = writeln!(out, "dataset = {}", c.dataset_path.display());
        let _ = writeln!(out, "format = {}", c.format);
        let _ = writeln!(out, "directed = {}", c.directed);
        let _ = writeln!(out, "symmetrize = {}", c.symmetrize);
        let algs: Vec<_> = c.algorithms.iter().map(|a| a.as_str()).collect();
        let _ = writeln!(out, "algorithms = {}", algs.join(","));
        let _ = writeln!(out, "b = {}", c.b);
        let _ = writeln!(out, "time_window = {}", c.time_window);
        let _ = writeln!(out, "repetitions = {}", c.repetitions);
        let _ = writeln!(out, "seed = {}", c.seed);
        let _ = writeln!(out, "beta = {}", c.beta);
        let _ = writeln!(out, "epsilon = {}", c.epsilon);
        let _ = writeln!(out, "average_mode = {}", c.average_mode);
        let _ = writeln!(out, "strategy3_mode = {}", c.strategy3_mode);
        let _ = writeln!(out);
        let _ = writeln!(out, "[dataset]");
        let _ = writeln!(out, "nodes = {}", s.node_count);
        let _ = writeln!(out, "edges = {}", s.edge_count);
        let _ = writeln!(out, "avg_degree = {:.4}", s.avg_degree);
        let _ = writeln!(out, "degree_std = {:.4}", s.degree_std);
        let _ = writeln!(out, "mean_clustering = {:.4}", s.mean_clustering);
        let _ = writeln!(out);
        let _ = writeln!(out, "[rankings]");
        for r in &self.ranks {
            let _ = writeln!(
                out,
                "{} view={} iterations={} converged={} degenerate={}",
                r.algorithm,
                if r.directed_view { "directed" } else { "undirected" },
                r.iterations,
                r.converged,
                r.degenerate
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "[game]");
        let _ = writeln!(out, "trajectory_sha256 = {}", self.trajectory_checksum);
        let _ = writeln!(out, "mean_final_cooperativity = {:.6}", self.mean_final_cooperativity);
        let _ = writeln!(out);
        let _ = writeln!(out, "[outputs]");
        for (a, st, p) in &self.series_files {
            let _ = writeln!(out, "{a} {st} {}", p.display());
        }
        for p in &self.extra_files {
            let _ = writeln!(out, "trajectory {}", p.display());
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "duration_seconds = {:.3}", self.duration.as_secs_f64());
        out
    }
}

/// Formats a value in plain decimal notation with 17 significant digits.
fn format_decimal(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (16 - magnitude).max(1) as usize;
    format!("{v:.decimals$}")
}

/// Writes `timestep,value,omitted`; omitted timesteps get an empty value.
pub fn write_series_csv<W: Write>(series: &CorrelationSeries, mut out: W) -> std::io::Result<()> {
    writeln!(out, "timestep,value,omitted")?;
    for (t, v) in series.values.iter().enumerate() {
        if v.is_finite() {
            writeln!(out, "{t},{},0", format_decimal(*v))?;
        } else {
            writeln!(out, "{t},,1")?;
        }
    }
    Ok(())
}

/// Reads a series CSV back; omitted rows become `None`.
pub fn read_series_csv<R: BufRead>(input: R) -> Result<Vec<Option<f64>>> {
    let mut values = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<series>", e))?;
        if i == 0 {
            if line.trim() != "timestep,value,omitted" {
                return Err(Error::parse(1, format!("unexpected header {line:?}")));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [t, value, omitted] = fields[..] else {
            return Err(Error::parse(i + 1, "expected three columns"));
        };
        if t.parse::<usize>().ok() != Some(values.len()) {
            return Err(Error::parse(i + 1, format!("timestep {t:?} out of sequence")));
        }
        match omitted {
            "1" => values.push(None),
            "0" => values.push(Some(
                value
                    .parse()
                    .map_err(|_| Error::parse(i + 1, format!("bad value {value:?}")))?,
            )),
            other => return Err(Error::parse(i + 1, format!("bad omitted flag {other:?}"))),
        }
    }
    Ok(values)
}

/// Table-style summary: header row, value row, then the half-edge count.
pub fn format_stats(name: &str, stats: &GraphStats) -> String {
    format!(
        "dataset\tnodes\tedges\tavg\tstd\tCC\n{name}\t{}\t{}\t{:.2}\t{:.2}\t{:.4}\nedges counted per endpoint (2M): {}\n",
        stats.node_count,
        stats.edge_count,
        stats.avg_degree,
        stats.degree_std,
        stats.mean_clustering,
        stats.half_edge_count()
    )
}

/// Deletes files written so far unless disarmed.
struct OutputGuard {
    written: Vec<PathBuf>,
    created_dir: Option<PathBuf>,
    armed: bool,
}

impl OutputGuard {
    fn create(path: &Path, guard: &mut OutputGuard, write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        guard.written.push(path.to_path_buf());
        let mut w = BufWriter::new(file);
        write(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.armed {
            return;
        }
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
        if let Some(dir) = &self.created_dir {
            let _ = fs::remove_dir(dir);
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let started = Instant::now();
    cfg.validate()?;

    let raw = load_dataset(&cfg.dataset_path, cfg.format, cfg.directed)?;
    let stats = raw.stats();
    let game_graph = raw.symmetrize();

    let ranking_params = cfg.ranking_params();
    let ranked: Vec<(ranking::RankVector, bool)> = cfg
        .algorithms
        .par_iter()
        .map(|&alg| {
            let directed_view = !cfg.symmetrize && alg.uses_direction() && raw.is_directed();
            let view = if directed_view { &raw } else { &game_graph };
            ranking::rank(view, alg, &ranking_params)
                .map(|r| (r, directed_view))
                .map_err(|e| e.context(format!("ranking with {alg}")))
        })
        .collect::<Result<_>>()?;
    let rank_summaries = ranked
        .iter()
        .map(|(r, directed_view)| RankSummary {
            algorithm: r.algorithm,
            directed_view: *directed_view,
            iterations: r.iterations,
            converged: r.converged,
            degenerate: r.degenerate,
        })
        .collect();
    let ranks: Vec<_> = ranked.into_iter().map(|(r, _)| r).collect();

    let trajectories = game::run_game(&game_graph, &cfg.game_params())
        .map_err(|e| e.context("running the game"))?;
    let checksum = game::trajectory_checksum(&trajectories);
    let mean_final_cooperativity = trajectories
        .iter()
        .map(|t| *t.cooperativity_series().last().expect("time_window >= 1"))
        .sum::<f64>()
        / trajectories.len() as f64;

    let series = correlate_all(&game_graph, &ranks, &trajectories, &cfg.correlation_options())
        .map_err(|e| e.context("correlating rankings with cooperation"))?;

    let mut guard = OutputGuard {
        written: Vec::new(),
        created_dir: None,
        armed: true,
    };
    if !cfg.output_dir.exists() {
        fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
        guard.created_dir = Some(cfg.output_dir.clone());
    }

    let mut series_files = Vec::with_capacity(series.len());
    for s in &series {
        let path = cfg.series_path(s.algorithm, s.strategy);
        OutputGuard::create(&path, &mut guard, |w| write_series_csv(s, w))?;
        series_files.push((s.algorithm, s.strategy, path));
    }

    let mut extra_files = Vec::new();
    if cfg.dump_trajectories {
        let stem = cfg.dataset_stem();
        let strategies = cfg.output_dir.join(format!("{stem}.strategies.csv"));
        OutputGuard::create(&strategies, &mut guard, |w| game::write_strategies_csv(&trajectories, w))?;
        let coop = cfg.output_dir.join(format!("{stem}.cooperativity.csv"));
        OutputGuard::create(&coop, &mut guard, |w| game::write_cooperativity_csv(&trajectories, w))?;
        extra_files.push(strategies);
        extra_files.push(coop);
    }

    let mut manifest = RunManifest {
        config: cfg.clone(),
        stats,
        series_files,
        extra_files,
        manifest_path: cfg.output_dir.join(format!("{}.manifest.txt", cfg.dataset_stem())),
        ranks: rank_summaries,
        trajectory_checksum: checksum,
        mean_final_cooperativity,
        duration: Duration::ZERO,
        version: VERSION,
    };
    manifest.duration = started.elapsed();
    let text = manifest.render();
    let manifest_path = manifest.manifest_path.clone();
    OutputGuard::create(&manifest_path, &mut guard, |w| w.write_all(text.as_bytes()))?;

    guard.armed = false;
    Ok(manifest)
}
