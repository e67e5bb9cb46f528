use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "gammactl", version, about = "Gamma-contractions, fundamental operators and distinguished varieties")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for the ChaCha8 generator behind every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub tol_psd: Option<f64>,
    #[arg(long, global = true)]
    pub tol_residual: Option<f64>,
    /// Angles of the polar grid over the closed unit disc.
    #[arg(long, global = true)]
    pub grid_angular: Option<usize>,
    /// Radii of the polar grid over the closed unit disc.
    #[arg(long, global = true)]
    pub grid_radial: Option<usize>,
    /// Number of boundary angles to sample.
    #[arg(long, global = true)]
    pub sample: Option<usize>,
    /// Output path for the report (or, with `variety --sample`, the CSV).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Where an operator pair comes from.
#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Matrix file holding S.
    #[arg(long, requires = "p", conflicts_with_all = ["pair", "scalar"])]
    pub s: Option<PathBuf>,
    /// Matrix file holding P.
    #[arg(long, requires = "s")]
    pub p: Option<PathBuf>,
    /// Pair document, either `{"s": .., "p": ..}` or the output of `gen`.
    #[arg(long, conflicts_with = "scalar")]
    pub pair: Option<PathBuf>,
    /// Instance to take from a `gen` document.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Scalar pair, e.g. `--scalar 1 0.25` or `--scalar 0.5+0.5i -0.25i`.
    #[arg(long, num_args = 2, value_names = ["S", "P"], allow_hyphen_values = true)]
    pub scalar: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gamma-contraction, strictness, purity and Gamma-isometry checks.
    Check {
        #[command(flatten)]
        pair: PairArgs,
        /// Double both grid resolutions.
        #[arg(long)]
        refine: bool,
    },
    /// Solve for the fundamental operator.
    Fundop {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Classify the variety det(A + pA* - sI) = 0.
    Variety {
        /// Matrix file holding A, or a `gen matrix` document.
        #[arg(long)]
        a: PathBuf,
        /// Instance to take from a `gen` document.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Compare ||f(S, P)|| with its maximum over the boundary of the variety.
    Vn(VnArgs),
    /// Build the truncated model and check the dilation identities.
    Model {
        #[command(flatten)]
        pair: PairArgs,
        /// Fixed number of blocks; by default N doubles until the tail is below 1e-8.
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
    /// Seeded random instances.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Args)]
pub struct VnArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Monomial `coeff * s^i p^j` of a scalar polynomial; repeatable. Defaults to f = s.
    #[arg(long, num_args = 3, value_names = ["I", "J", "COEFF"], action = ArgAction::Append, allow_hyphen_values = true)]
    pub term: Vec<String>,
    /// Matrix polynomial document.
    #[arg(long, conflicts_with = "term")]
    pub poly: Option<PathBuf>,
    /// Run this many seeded random instances instead of a single pair.
    #[arg(long, conflicts_with_all = ["term", "poly", "s", "pair", "scalar"])]
    pub random: Option<usize>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CountArgs {
    /// Matrix dimension.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Number of instances.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// (T1 + T2, T1 T2) for random commuting contractions.
    Pair {
        #[command(flatten)]
        count: CountArgs,
    },
    /// Truncated converse model from a random F_hat.
    Model {
        /// Size of F_hat.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        blocks: usize,
        /// Number of instances.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// (rS, r^2 P) with a certified positive strictness constant.
    Strict {
        #[command(flatten)]
        count: CountArgs,
        #[arg(long, default_value_t = 0.9)]
        r: f64,
    },
    /// Matrix for `variety`, with prescribed numerical radius or a unimodular eigenvalue.
    Matrix {
        #[command(flatten)]
        count: CountArgs,
        #[arg(long, conflicts_with = "planted")]
        nr: Option<f64>,
        #[arg(long)]
        planted: bool,
    },
}
