// SPDX-License-Identifier: Apache-2.0

//! `nushap`: explanations, scores, rankings and the boolean-function census
//! from the command line.

mod commands;
mod selftest;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nushap_core::{Error, ErrorClass};

#[derive(Parser, Debug)]
#[command(name = "nushap", version, about = "Feature attribution from abductive explanations")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "NUSHAP_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal sufficient (AXp) and contrastive (CXp) explanations of one instance.
    Explain(ExplainArgs),
    /// Shapley scores of one instance.
    Score(ScoreArgs),
    /// Rank-biased overlap between two score reports.
    Compare(CompareArgs),
    /// Scores every boolean function on k variables and flags irrelevant
    /// features with nonzero scores.
    Flawscan(FlawscanArgs),
    /// Checks the built-in fixtures.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
#[group(skip)]
pub struct Source {
    /// Space declaration (JSON); required with --data.
    #[arg(long, requires = "data")]
    pub space: Option<std::path::PathBuf>,
    /// Dataset (CSV); explanations are sample-based.
    #[arg(long)]
    pub data: Option<std::path::PathBuf>,
    /// Truth-table model (JSON); explanations range over the whole space.
    #[arg(long)]
    pub table: Option<std::path::PathBuf>,
    /// Built-in rule-list model.
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    /// Comma-separated feature values. Defaults to the fixture's instance.
    #[arg(long)]
    pub instance: Option<String>,
    /// Prediction of the instance. Looked up in the dataset, or computed by
    /// the model, when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub prediction: Option<String>,
    /// Tolerance override for one feature, as INDEX=TAU with 1-based INDEX.
    #[arg(long = "tau", value_name = "INDEX=TAU")]
    pub taus: Vec<String>,
    /// Tolerance override for predictions.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Fixture {
    M3,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("backend").required(true).args(["data", "table", "fixture"])))]
pub struct ExplainArgs {
    #[command(flatten)]
    pub source: Source,
    /// Comma-separated outputs among axps, cxps, relevancy.
    #[arg(long, default_value = "axps,cxps", value_delimiter = ',')]
    pub emit: Vec<String>,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharFn {
    /// Indicator of weak AXps.
    Axp,
    /// Conditional expectation of the prediction.
    Expv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Estimate,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("backend").required(true).args(["data", "table", "fixture"])))]
pub struct ScoreArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value = "axp")]
    pub cf: CharFn,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Absolute error bound of each estimate.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Failure probability of each estimate.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Seed for permutation sampling; drawn at random and reported if absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Explicit number of sampled permutations.
    #[arg(long)]
    pub runs: Option<u64>,
    /// Split alpha over the features so the bound holds for all at once.
    #[arg(long)]
    pub union_bound: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 0.5)]
    pub rbo_p: f64,
    #[arg(long, default_value_t = 5)]
    pub rbo_depth: usize,
    pub a: std::path::PathBuf,
    pub b: std::path::PathBuf,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct FlawscanArgs {
    #[arg(long)]
    pub vars: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Directory holding d1.space.json and d1.csv to check instead of the
    /// built-in copies.
    #[arg(long)]
    pub fixtures_dir: Option<std::path::PathBuf>,
}

/// Failure of a command.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    /// Selftest found failing checks; the table is already printed.
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn report(failure: &Failure) -> ExitCode {
    let (tag, message, code) = match failure {
        Failure::Core(e) => {
            let code = match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Degenerate => 3,
            };
            (e.tag().to_string(), e.to_string(), code)
        }
        Failure::Usage(m) => ("usage".to_string(), m.clone(), 2),
        Failure::Checks(n) => ("selftest".to_string(), format!("{n} check(s) failed"), 1),
    };
    eprintln!("{}", serde_json::json!({ "error": tag, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(&Failure::Usage(e.render().to_string().trim_end().to_string())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return report(&Failure::Usage("--threads must be positive".into()));
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match cli.command {
        Command::Explain(a) => commands::explain(&a),
        Command::Score(a) => commands::score(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Flawscan(a) => commands::flawscan(&a),
        Command::Selftest(a) => selftest::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(&f),
    }
}
