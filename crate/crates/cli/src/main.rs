// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use netcoop::correlation::{AverageMode, Strategy3Mode};
use netcoop::experiment::{self, DatasetFormat, ExperimentConfig};
use netcoop::ranking::{self, Algorithm, RankingParams};

#[derive(Parser)]
#[command(name = "netcoop", version, about = "Node rankings versus cooperation in the networked prisoner's dilemma")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, play the game and write one correlation series per (algorithm, strategy).
    Run(RunArgs),
    /// Print node count, edge count, degree moments and mean clustering.
    Stats(DatasetArgs),
    /// Write one ranking as CSV to stdout.
    Rank(RankArgs),
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// edgelist or gml; inferred from the file extension when omitted.
    #[arg(long)]
    format: Option<DatasetFormat>,
    /// Read an edge list as directed arcs.
    #[arg(long)]
    directed: bool,
}

impl DatasetArgs {
    fn format(&self) -> DatasetFormat {
        self.format.unwrap_or_else(|| DatasetFormat::infer(&self.dataset))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Rank PageRank and HITS on the raw directed graph.
    #[arg(long)]
    no_symmetrize: bool,
    /// Temptation to defect, b > 1.
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 500)]
    time_window: usize,
    /// Independent realizations of the game.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long)]
    seed: u64,
    /// PageRank damping factor.
    #[arg(long, default_value_t = 0.85)]
    beta: f64,
    /// Smoothing added before KL normalization.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Comma-separated subset of sd,pagerank,hits,cl,bw,cc.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// per-realization or pooled.
    #[arg(long, default_value = "per-realization")]
    average_mode: AverageMode,
    /// var-vs-var or var-vs-mean.
    #[arg(long, default_value = "var-vs-var")]
    strategy3_mode: Strategy3Mode,
    /// Also write per-node strategies and cooperativity per timestep.
    #[arg(long)]
    dump_trajectories: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long)]
    algorithm: Algorithm,
    /// Rank PageRank and HITS on the raw directed graph.
    #[arg(long)]
    no_symmetrize: bool,
    #[arg(long, default_value_t = 0.85)]
    beta: f64,
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::new(
        &args.dataset.dataset,
        args.dataset.format(),
        args.b,
        args.seed,
        &args.out,
    );
    cfg.directed = args.dataset.directed;
    cfg.symmetrize = !args.no_symmetrize;
    if let Some(algs) = args.algorithms {
        cfg.algorithms = algs;
    }
    cfg.time_window = args.time_window;
    cfg.repetitions = args.reps;
    cfg.beta = args.beta;
    cfg.epsilon = args.epsilon;
    cfg.average_mode = args.average_mode;
    cfg.strategy3_mode = args.strategy3_mode;
    cfg.dump_trajectories = args.dump_trajectories;

    let manifest = experiment::run_experiment(&cfg)?;
    for r in manifest.ranks.iter().filter(|r| !r.converged) {
        eprintln!("warning: {} stopped after {} iterations without converging", r.algorithm, r.iterations);
    }
    println!(
        "wrote {} series to {} in {:.2}s (manifest {})",
        manifest.series_files.len(),
        cfg.output_dir.display(),
        manifest.duration.as_secs_f64(),
        manifest.manifest_path.display()
    );
    Ok(())
}

fn stats(args: DatasetArgs) -> Result<()> {
    let g = experiment::load_dataset(&args.dataset, args.format(), args.directed)?;
    print!("{}", experiment::format_stats(&stem(&args.dataset), &g.stats()));
    Ok(())
}

fn rank(args: RankArgs) -> Result<()> {
    let raw = experiment::load_dataset(&args.dataset.dataset, args.dataset.format(), args.dataset.directed)?;
    let directed_view = args.no_symmetrize && args.algorithm.uses_direction() && raw.is_directed();
    let view = if directed_view { raw } else { raw.symmetrize() };
    let params = RankingParams {
        beta: args.beta,
        ..RankingParams::default()
    };
    let r = ranking::rank(&view, args.algorithm, &params)?;
    if !r.converged {
        eprintln!("warning: {} stopped after {} iterations without converging", r.algorithm, r.iterations);
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    r.write_csv(&mut out).context("writing rank CSV")?;
    out.flush().context("writing rank CSV")?;
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Stats(a) => stats(a),
        Command::Rank(a) => rank(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
