use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use splitq_cli::commands::{adapt, list, recover, sweep, train};
use splitq_cli::ExperimentConfig;

#[derive(Parser)]
#[command(name = "splitq", version, about = "Two-stream Q-learning laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the built-in bias-profile table
    ListProfiles,
    /// Train every configured profile and emit per-run metrics plus curves
    Train(RunArgs),
    /// Cross profiles with the configured reward-transform variants
    Sweep(RunArgs),
    /// Tune the four bias weights online against the configured environment
    Adapt(RunArgs),
    /// Identify the bias profile behind a recorded trajectory file
    Recover(RecoverArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_dir; default "out")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the base seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Use the preset means verbatim instead of sampling inside the ± ranges
    #[arg(long)]
    deterministic_profiles: bool,
}

#[derive(Args)]
struct RecoverArgs {
    /// Trajectory CSV (`episode_id,t,state,action,reward`)
    trajectories: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

impl RunArgs {
    fn load(&self) -> splitq_cli::Result<(ExperimentConfig, PathBuf)> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.learning.seed = seed;
        }
        if self.deterministic_profiles {
            config.deterministic_profiles = true;
        }
        let out = self
            .out
            .clone()
            .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok((config, out))
    }
}

fn run() -> splitq_cli::Result<()> {
    match Cli::parse().command {
        Command::ListProfiles => {
            list::cmd_list_profiles();
        }
        Command::Train(args) => {
            let (config, out) = args.load()?;
            let summary = train::cmd_train(&config, &out)?;
            println!(
                "train: {} runs -> {} (aggregate: {}, chart: {})",
                summary.runs.len(),
                out.display(),
                summary.aggregate_path.display(),
                summary.svg_path.display()
            );
        }
        Command::Sweep(args) => {
            let (config, out) = args.load()?;
            let summary = sweep::cmd_sweep(&config, &out)?;
            println!(
                "sweep: {} variants -> {} (matrix: {}, ranking: {})",
                summary.variants.len(),
                out.display(),
                summary.matrix_path.display(),
                summary.ranking_path.display()
            );
            if let Some(flags) = &summary.flags_path {
                println!("sweep: non-stationarity flags: {}", flags.display());
            }
        }
        Command::Adapt(args) => {
            let (config, out) = args.load()?;
            let summary = adapt::cmd_adapt(&config, &out)?;
            let last = summary.history.last().expect("at least one round");
            println!(
                "adapt: {} rounds, incumbent phi = [{}, {}, {}, {}], value = {}",
                summary.history.len(),
                last.incumbent_phi[0],
                last.incumbent_phi[1],
                last.incumbent_phi[2],
                last.incumbent_phi[3],
                last.incumbent_value
            );
            println!("adapt: history: {}", summary.history_path.display());
        }
        Command::Recover(args) => {
            let (config, out) = args.run.load()?;
            let summary = recover::cmd_recover(&args.trajectories, &config, &out)?;
            println!("recover: candidates by distance:");
            for (rank, (label, distance)) in summary.ranked.iter().enumerate() {
                println!("  {}. {label}  distance = {distance}", rank + 1);
            }
            println!("recover: best = {}", summary.best_label);
            println!("recover: report: {}", summary.report_path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
