//! `eda-artifacts`: synthesize data, extract features, train detectors and
//! run the evaluation protocols.

mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eda_artifacts::Error;

#[derive(Parser)]
#[command(name = "eda-artifacts", version, about = "Motion-artifact detection for EDA recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset: recordings, label files and a manifest.
    Synth(SynthArgs),
    /// Write the feature matrix of every window in a manifest.
    Features(FeaturesArgs),
    /// Run the in-sample or out-of-sample protocol.
    Eval(run::EvalArgs),
    /// Evaluate one hyperparameter over a list of values.
    Sweep(run::SweepArgs),
    /// Fit one detector on a labeled manifest and save it as JSON.
    Train(TrainArgs),
    /// Score a feature CSV with a saved detector.
    Score(ScoreArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Dataset description (JSON); omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value = "all")]
    feature_set: String,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    algorithm: String,
    #[arg(long, default_value = "eda")]
    feature_set: String,
    #[arg(long)]
    seed: u64,
    /// Hyperparameter override `name=value`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    overrides: Vec<String>,
    /// Output detector JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Detector JSON written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV written by `features`.
    #[arg(long)]
    features: PathBuf,
    /// Output CSV `subject_id,segment_id,window_index,score`.
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UndefinedAuc(_) => 3,
        Error::TrainingDivergence(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a.config.as_deref(), a.seed, &a.out),
        Command::Features(a) => commands::features(&a.manifest, &a.feature_set, &a.out),
        Command::Eval(a) => run::eval(&a),
        Command::Sweep(a) => run::sweep(&a),
        Command::Train(a) => commands::train(&a.manifest, &a.algorithm, &a.feature_set, a.seed, &a.overrides, &a.out),
        Command::Score(a) => commands::score(&a.model, &a.features, &a.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
