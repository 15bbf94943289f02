use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use threshold_lab_core::bounds::{DEFAULT_GRID, DEFAULT_K};
use threshold_lab_core::forge::BVariant;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "threshold-lab",
    version,
    about = "Exact thresholds and conditional bounds for finite set families"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Bisection tolerance for q, p_c and interval endpoints.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,

    /// Grid points on (0, 1) for the floor scan and interval search.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,

    /// The constant K in g(p).
    #[arg(long = "K", global = true, default_value_t = DEFAULT_K)]
    pub k: f64,

    /// Target epsilon for admissible intervals and epsilon-dependent bounds.
    #[arg(long, global = true)]
    pub eps: Option<f64>,

    /// Seed for the Monte Carlo sampler.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum BVariantArg {
    /// B = {∅, {a}, {c}, {a,c}}
    #[default]
    Formula,
    /// B = {∅, {a}, {b}, {c}, {a,c}}
    Diagram,
}

impl From<BVariantArg> for BVariant {
    fn from(v: BVariantArg) -> Self {
        match v {
            BVariantArg::Formula => BVariant::Formula,
            BVariantArg::Diagram => BVariant::Diagram,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleFamily {
    /// A = {{a}, {c}}
    A,
    /// A′ = {{a}, {c}, {a,c}}
    APrime,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical probability, expectation threshold and bounds for the
    /// up-closure of a family.
    Family {
        /// Family JSON; the upper set generated by its members is analysed.
        input: PathBuf,
    },

    /// Conditional bound report for a nested pair A ⊆ B.
    Conditional {
        /// Family JSON for A.
        #[arg(required_unless_present = "example", requires = "b")]
        a: Option<PathBuf>,
        /// Family JSON for B, over the same ground set.
        b: Option<PathBuf>,
        /// Use the built-in three-element example instead of input files.
        #[arg(long, value_enum, conflicts_with = "a")]
        example: Option<ExampleFamily>,
        #[arg(long, value_enum, default_value_t = BVariantArg::Formula)]
        b_variant: BVariantArg,
        /// Number of (p, r, g) samples in the report.
        #[arg(long, default_value_t = 99)]
        samples: usize,
    },

    /// Push an upper set of a poset through an injection into a power set
    /// and report the conditional bounds.
    Poset(PosetArgs),

    /// Check the worked three-element example against its published values.
    #[command(name = "paper-repro")]
    Repro {
        #[arg(long, value_enum, default_value_t = BVariantArg::Formula)]
        b_variant: BVariantArg,
    },

    /// Monte Carlo estimate of P(X_p ∈ A), or P(X_p ∈ A | X_p ∈ B) with --given.
    Mc {
        /// Family JSON for A.
        a: PathBuf,
        /// Family JSON for the conditioning family B.
        #[arg(long)]
        given: Option<PathBuf>,
        #[arg(long)]
        p: f64,
        /// Samples (accepted samples when conditioning).
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Give up after this many draws when conditioning.
        #[arg(long, default_value_t = 100_000_000)]
        max_draws: u64,
        /// Treat the input families as generators of upper sets.
        #[arg(long)]
        up: bool,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
    },
}

#[derive(Debug, Args)]
pub struct PosetArgs {
    /// Poset JSON.
    #[arg(long, required_unless_present = "network")]
    pub poset: Option<PathBuf>,
    /// Embedding JSON mapping each element to a subset.
    #[arg(long, conflicts_with_all = ["downset", "network"])]
    pub embedding: Option<PathBuf>,
    /// Embed each element as its principal down-set.
    #[arg(long, conflicts_with = "network")]
    pub downset: bool,
    /// Weighted graph JSON; the poset is its partial edge-weightings.
    #[arg(long, conflicts_with = "poset")]
    pub network: Option<PathBuf>,
    /// Comma-separated members of the upper set (repeatable; commas inside
    /// braces, as in network labels, do not split).
    #[arg(long, conflicts_with = "generated_by")]
    pub upper: Vec<String>,
    /// Comma-separated elements whose up-closure is the upper set.
    #[arg(long)]
    pub generated_by: Vec<String>,
    #[arg(long, default_value_t = 99)]
    pub samples: usize,
}

/// Validated numeric configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tol: f64,
    pub grid: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub eps: Option<f64>,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self, CliError> {
        if !(g.tol > 0.0) {
            return Err(CliError::Config(format!("--tol must be positive, got {}", g.tol)));
        }
        if g.grid < 100 {
            return Err(CliError::Config(format!("--grid must be at least 100, got {}", g.grid)));
        }
        if !(g.k > 0.0 && g.k.is_finite()) {
            return Err(CliError::Config(format!("--K must be positive, got {}", g.k)));
        }
        if let Some(eps) = g.eps {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(CliError::Config(format!("--eps must lie in (0, 1), got {eps}")));
            }
        }
        Ok(Self {
            tol: g.tol,
            grid: g.grid,
            k: g.k,
            eps: g.eps,
            seed: g.seed,
            format: g.format,
        })
    }
}

/// Splits each argument on commas that are not inside `{...}`.
pub fn split_labels(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for arg in args {
        let mut depth = 0usize;
        let mut current = String::new();
        for c in arg.chars() {
            match c {
                '{' => depth += 1,
                '}' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    out.push(std::mem::take(&mut current));
                    continue;
                }
                _ => {}
            }
            current.push(c);
        }
        out.push(current);
    }
    out.into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
