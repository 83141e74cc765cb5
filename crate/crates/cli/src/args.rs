use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use uqdecomp::Unit;

#[derive(Debug, Parser)]
#[command(
    name = "uqdecomp",
    version,
    about = "Total / aleatoric / epistemic uncertainty of second-order distributions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Logarithm base of reported values.
    #[arg(long, value_enum, default_value_t = UnitArg::Bits, global = true)]
    pub unit: UnitArg,
    /// Report raw values instead of dividing by log K.
    #[arg(long, global = true)]
    pub raw: bool,
    /// Absolute quadrature tolerance (nats).
    #[arg(long = "tol", default_value_t = 1e-10, global = true)]
    pub tolerance: f64,
    /// Samples per Monte Carlo estimate.
    #[arg(long, default_value_t = 100_000, global = true)]
    pub mc_samples: usize,
    /// Seed for every Monte Carlo path and the learning-curve simulator.
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    Bits,
    Nats,
}

impl From<UnitArg> for Unit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Bits => Unit::Bits,
            UnitArg::Nats => Unit::Nats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose one distribution given as JSON (inline or a file path).
    Eval {
        /// Inline JSON spec, a path to a JSON file, or `-` for standard input.
        spec: String,
        /// Value of the `name` column.
        #[arg(long, default_value = "input")]
        name: String,
    },
    /// Evaluate the built-in panel of example distributions.
    Panel {
        /// JSON array of {"name": ..., "spec": {...}} replacing the built-in set.
        #[arg(long)]
        panels: Option<PathBuf>,
    },
    /// Simulate a Bayesian learning curve.
    Curve {
        /// Ground-truth categorical, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.7")]
        theta: Vec<f64>,
        /// Dirichlet prior counts, comma-separated (default: all ones).
        #[arg(long, value_delimiter = ',')]
        prior: Option<Vec<f64>>,
        /// Sample sizes, comma-separated, strictly increasing from 0.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
        #[arg(long, default_value_t = 200)]
        replications: usize,
    },
    /// Decompose an ensemble given as a prediction matrix or ensemble JSON.
    Ensemble {
        /// Matrix file (one member per line) or `-` for standard input.
        file: String,
    },
}
