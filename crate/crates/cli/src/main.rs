//! `driftlink` command-line runner.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "driftlink",
    version,
    about = "Link prediction on evolving networks"
)]
struct Cli {
    /// key = value file with defaults for any long flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure statistics of the giant component
    Stats {
        #[command(flatten)]
        data: DataArgs,
        /// Write the table here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rank the unlinked pairs of the whole network (no split)
    Predict {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[command(flatten)]
        drift: DriftArgs,
        /// Number of ranked pairs to print
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply position drift and write the reweighted edge list
    Drift {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        drift: DriftArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Repeated train/probe evaluation of the similarity indices
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[command(flatten)]
        drift: DriftArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// With drift on, also evaluate the undrifted training graphs
        #[arg(long)]
        compare_original: bool,
    },
    /// Evaluate for every drift iteration count in a range
    SweepIterations {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[command(flatten)]
        drift: DriftArgs,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        min_iterations: Option<u32>,
        #[arg(long)]
        max_iterations: Option<u32>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct DataArgs {
    /// Edge list file
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Column layout, letters u v w t and _ (default uvwt)
    #[arg(long)]
    format: Option<String>,
    /// How repeated interactions merge: count-interactions, sum-weights, keep-max-weight
    #[arg(long)]
    aggregation: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct IndexArgs {
    /// Index name or comma list (WCN, WAA, WRA, WLP, WSD or all)
    #[arg(long)]
    index: Option<String>,
    /// Weight of the longer walks in WLP and WSD
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
struct DriftArgs {
    /// Drift rounds applied to the graph (absent: no drift)
    #[arg(long)]
    drift_iterations: Option<u32>,
    /// average or one-sided
    #[arg(long)]
    symmetrization: Option<String>,
    /// use-timestamps or uniform
    #[arg(long)]
    temporal_mode: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct EvalArgs {
    /// evolving-temporal or static-random
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Deletion ratio or comma list, e.g. 0,0.1,0.2
    #[arg(long)]
    delete_ratio: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sampled AUC comparisons; 0 selects the exact statistic
    #[arg(long)]
    auc_samples: Option<usize>,
    /// Precision cutoff (default: probe size)
    #[arg(long)]
    precision_l: Option<usize>,
    /// Output directory (default: $DRIFTLINK_OUT_DIR or driftlink-out)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Command failure with its exit code class.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Data(m) => write!(f, "data error: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<driftlink::Error> for Failure {
    fn from(e: driftlink::Error) -> Self {
        use driftlink::Error as E;
        fn root(e: &E) -> &E {
            match e {
                E::Cell { source, .. } => root(source),
                other => other,
            }
        }
        let msg = e.to_string();
        if e.is_data_error() {
            return Failure::Data(msg);
        }
        match root(&e) {
            E::InvalidParameter(_)
            | E::TooManyIterations(_)
            | E::PrecisionCutoff { .. }
            | E::ExactAucTooLarge(_)
            | E::WalkLength(_) => Failure::Usage(msg),
            E::Connectivity { .. } => Failure::Data(msg),
            _ => Failure::Runtime(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("driftlink: {f}");
            ExitCode::from(f.code())
        }
    }
}
