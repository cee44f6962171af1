//! `a2`: check and evaluate assurance cases from the command line.
//!
//! Exit status is 0 when the requested evaluation passes its gate, 1 when it
//! does not, and 2 for usage, input and parse errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "a2", version, about = "Check and evaluate assurance cases")]
pub struct Cli {
    /// Key = value TOML file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Case format; by default `.json` files are JSON and anything else is DSL.
    #[arg(long, global = true, value_enum)]
    input_format: Option<CaseFormat>,
    /// JSON file of evaluation inputs (concurrence, acceptance, confidence values).
    #[arg(long, global = true, value_name = "FILE")]
    inputs: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseFormat {
    Dsl,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Concur {
    /// Record concurrence with every step's justification.
    #[arg(long)]
    concur_all: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural validity.
    Check { case: PathBuf },
    /// Three-valued assessment and active defeaters.
    Validity {
        case: PathBuf,
        #[command(flatten)]
        concur: Concur,
    },
    /// Full soundness gate and report.
    Sound {
        case: PathBuf,
        #[command(flatten)]
        concur: Concur,
    },
    /// Probabilistic confidence propagation.
    Confidence {
        case: PathBuf,
        #[arg(long, value_parser = ["product", "doubts"])]
        method: Option<String>,
        /// Propagate even if the case is not sound.
        #[arg(long)]
        exploratory: bool,
        #[command(flatten)]
        concur: Concur,
    },
    /// Confirmation measures of elicited evidence.
    Measures {
        case: PathBuf,
        #[arg(long)]
        node: Option<String>,
        /// Logarithm base, greater than 1.
        #[arg(long)]
        base: Option<f64>,
    },
    /// Residual-risk ledger and final gate.
    Risks {
        case: PathBuf,
        /// TOML file with `individual`, `class` and `negligible` keys.
        #[arg(long, value_name = "FILE")]
        thresholds: Option<PathBuf>,
    },
    /// Graphviz or report JSON.
    Export {
        case: PathBuf,
        #[arg(long, conflicts_with = "json", required_unless_present = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        concur: Concur,
    },
    /// Canonical serialization.
    Fmt {
        case: PathBuf,
        /// Convert to this format instead of keeping the input's.
        #[arg(long, value_enum)]
        to: Option<CaseFormat>,
    },
    /// Start the JSON service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        case: Option<PathBuf>,
        /// Write the case back to this file after every change.
        #[arg(long, value_name = "FILE")]
        persist: Option<PathBuf>,
        #[command(flatten)]
        concur: Concur,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("A2_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(msg) => {
            eprintln!("a2: {msg}");
            ExitCode::from(2)
        }
    }
}
