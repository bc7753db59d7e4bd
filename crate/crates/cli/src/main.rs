//! `dlg` — command-line frontend for the dialogue context engine: train and
//! evaluate dialogue-act predictors, mine plan operators, replay annotated
//! dialogues as snapshot streams, and drive a session interactively.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error. All
//! diagnostics go to stderr.

mod commands;
mod config;
mod files;
mod stream;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::Defaults;

#[derive(Parser)]
#[command(
    name = "dlg",
    version,
    about = "Context engine for mediated appointment-scheduling dialogues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a dialogue-act prediction model on an annotated corpus
    Train(TrainArgs),
    /// Evaluate a model's top-n hit rate on a corpus
    Eval(EvalArgs),
    /// Mine turn-level plan operators from a corpus
    LearnOps(LearnOpsArgs),
    /// Replay an annotated corpus, streaming one snapshot per utterance
    Replay(ReplayArgs),
    /// Drive a session from standard input with live clarification prompts
    Interactive(InteractiveArgs),
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0,1), got {v}"))
    }
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0,1], got {v}"))
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Annotated corpus file (JSON)
    #[arg(long)]
    corpus: String,
    /// Where to write the model file
    #[arg(long)]
    model: String,
    /// Highest n-gram order
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_order: Option<u32>,
    /// Corpus fraction held out for weight estimation
    #[arg(long, value_parser = parse_fraction)]
    held_out: Option<f64>,
    /// Seed of the held-out split
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Model file written by `dlg train`
    #[arg(long)]
    model: String,
    /// Corpus to evaluate on
    #[arg(long)]
    corpus: String,
    /// A position counts as a hit when its act is among the top n
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    top_n: Option<u32>,
}

#[derive(Args)]
struct LearnOpsArgs {
    /// Corpus to mine turn patterns from
    #[arg(long)]
    corpus: String,
    /// Where to write the learned operator file
    #[arg(long)]
    out: String,
    /// Minimum number of supporting turns
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    min_support: Option<u64>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Corpus to replay
    #[arg(long)]
    corpus: String,
    /// Prediction model
    #[arg(long)]
    model: String,
    /// Plan operator file
    #[arg(long)]
    operators: String,
    /// Confusable-token lexicon
    #[arg(long)]
    lexicon: Option<String>,
    /// Ranked predictions per utterance
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    top_k: Option<u32>,
    /// How clarification prompts are answered during batch replay
    #[arg(long, value_enum)]
    clarify: Option<config::ClarifyChoice>,
    /// Analysis track driving the inferences
    #[arg(long)]
    track: Option<String>,
    /// Confusable similarity threshold
    #[arg(long, value_parser = parse_threshold)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct InteractiveArgs {
    /// Prediction model
    #[arg(long)]
    model: String,
    /// Plan operator file
    #[arg(long)]
    operators: String,
    /// Confusable-token lexicon
    #[arg(long)]
    lexicon: Option<String>,
    /// Deictic anchor of the session, YYYY-MM-DD[THH:MM]
    #[arg(long)]
    speaking_time: Option<String>,
    /// Ranked predictions per utterance
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    top_k: Option<u32>,
    /// Confusable similarity threshold
    #[arg(long, value_parser = parse_threshold)]
    threshold: Option<f64>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let defaults = Defaults::load()?;
    match cli.command {
        Command::Train(args) => commands::train::run(&args, &defaults),
        Command::Eval(args) => commands::eval::run(&args, &defaults),
        Command::LearnOps(args) => commands::learn_ops::run(&args, &defaults),
        Command::Replay(args) => commands::replay::run(&args, &defaults),
        Command::Interactive(args) => commands::interactive::run(&args, &defaults),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
