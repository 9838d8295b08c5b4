mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgeval_core::human::Deviation;
use qgeval_core::qascore::Aggregation;
use qgeval_core::stats::Alternative;

#[derive(Parser, Debug)]
#[command(name = "qgeval", version, about = "Evaluation toolkit for question generation systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every randomized output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Quality-control significance level.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub alpha: f64,
    /// p-value threshold for significance-matrix cells.
    #[arg(long, global = true, default_value_t = 0.1)]
    pub sig_threshold: f64,
    #[arg(long, global = true, value_enum, default_value_t = ModelKind::Mock)]
    pub model: ModelKind,
    /// Bridge address (host:port) when --model bridge.
    #[arg(long, global = true, env = "QGEVAL_BRIDGE_ADDR")]
    pub bridge_addr: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = AggregationArg::PerWordMean)]
    pub aggregation: AggregationArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Mock,
    Bridge,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregationArg {
    PerWordMean,
    Sum,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::PerWordMean => Aggregation::PerWordMean,
            AggregationArg::Sum => Aggregation::Sum,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockModeArg {
    Uniform,
    Seeded,
    Cooccurrence,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternativeArg {
    Greater,
    Less,
    TwoSided,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::Greater => Alternative::Greater,
            AlternativeArg::Less => Alternative::Less,
            AlternativeArg::TwoSided => Alternative::TwoSided,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationArg {
    Population,
    Sample,
}

impl From<DeviationArg> for Deviation {
    fn from(d: DeviationArg) -> Self {
        match d {
            DeviationArg::Population => Deviation::Population,
            DeviationArg::Sample => Deviation::Sample,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reference-based metrics per item and per system.
    Metrics {
        /// EvalItem JSONL with references.
        input: PathBuf,
        /// Answerability configuration file.
        #[arg(long)]
        answerability_config: Option<PathBuf>,
        /// Tab-separated synonym groups for METEOR.
        #[arg(long)]
        synonyms: Option<PathBuf>,
    },
    /// QAScore per item and per system.
    Qascore {
        /// EvalItem JSONL.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MockModeArg::Cooccurrence)]
        mock_mode: MockModeArg,
    },
    /// HIT construction.
    Hits {
        #[command(subcommand)]
        command: HitsCommand,
    },
    /// Quality control, standardization, system scores and significance.
    Analyze {
        /// RatingRecord JSONL.
        ratings: PathBuf,
        /// Optional wide CSV of per-system metric scores to correlate.
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DeviationArg::Population)]
        deviation: DeviationArg,
    },
    /// Agreement between two significance matrices.
    Overlap { a: PathBuf, b: PathBuf },
    /// Correlate per-system metric scores with human scores.
    Correlate {
        /// Wide CSV: system column then one column per score.
        table: PathBuf,
        /// Take human scores from an analyze report instead of a column.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Column holding the human overall z scores.
        #[arg(long, default_value = "z")]
        human_column: String,
    },
    /// Write synthetic ratings with planted system qualities.
    Simulate {
        /// Run label; also prefixes worker and HIT ids.
        #[arg(long, default_value = "run1")]
        run: String,
        #[arg(long, default_value_t = 500)]
        hits: usize,
    },
    /// Run a single significance test.
    Test {
        #[command(subcommand)]
        command: TestCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum HitsCommand {
    /// Build HITs from a corpus with one question per system per passage.
    Build {
        /// EvalItem JSONL; items sharing passage and answer form one HIT.
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum TestCommand {
    RankSum {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        y: Vec<f64>,
        #[arg(long, value_enum, default_value_t = AlternativeArg::Greater)]
        alternative: AlternativeArg,
    },
    SignedRank {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        y: Vec<f64>,
        #[arg(long, value_enum, default_value_t = AlternativeArg::Greater)]
        alternative: AlternativeArg,
    },
    Williams {
        #[arg(long, allow_negative_numbers = true)]
        r12: f64,
        #[arg(long, allow_negative_numbers = true)]
        r13: f64,
        #[arg(long, allow_negative_numbers = true)]
        r23: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = AlternativeArg::Greater)]
        alternative: AlternativeArg,
    },
}

/// Map an error to the process exit code: 2 for degenerate analyses, 3 for
/// model transport failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<qgeval_core::Error>() {
            return match e {
                qgeval_core::Error::DegenerateInput(_) => 2,
                qgeval_core::Error::Model { .. } => 3,
                _ => 1,
            };
        }
        if cause.downcast_ref::<commands::Degenerate>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
