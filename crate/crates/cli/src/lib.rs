//! The `threshold-lab` command line: argument parsing, command dispatch and
//! report rendering. [`run`] returns the text for stdout so that it can be
//! exercised without spawning a process.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod format;

use args::{Cli, Command, Format, RunConfig};
use commands::McArgs;
pub use error::CliError;

/// JSON Schema for every report `run` emits in JSON format.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = RunConfig::from_args(&cli.global)?;
    let csv = cfg.format == Format::Csv;
    let out = match &cli.command {
        Command::Family { input } => {
            let r = commands::cmd_family(input, &cfg)?;
            if csv {
                commands::family_csv(&r)
            } else {
                format::to_json("family", &cfg, &r)
            }
        }
        Command::Conditional {
            a,
            b,
            example,
            b_variant,
            samples,
        } => {
            let r = commands::cmd_conditional(a.as_deref(), b.as_deref(), *example, *b_variant, *samples, &cfg)?;
            if csv {
                commands::conditional_csv(&r)
            } else {
                format::to_json("conditional", &cfg, &r)
            }
        }
        Command::Poset(args) => {
            let r = commands::cmd_poset(args, &cfg)?;
            if csv {
                commands::poset_csv(&r)
            } else {
                format::to_json("poset", &cfg, &r)
            }
        }
        Command::Repro { b_variant } => {
            let r = commands::cmd_repro(*b_variant, &cfg)?;
            if csv {
                commands::repro_csv(&r)
            } else {
                format::to_json("paper-repro", &cfg, &r)
            }
        }
        Command::Mc {
            a,
            given,
            p,
            samples,
            max_draws,
            up,
            confidence,
        } => {
            let args = McArgs {
                a,
                given: given.as_deref(),
                p: *p,
                samples: *samples,
                max_draws: *max_draws,
                up: *up,
                confidence: *confidence,
            };
            let r = commands::cmd_mc(&args, &cfg)?;
            if csv {
                commands::mc_csv(&r)
            } else {
                format::to_json("mc", &cfg, &r)
            }
        }
    };
    Ok(out)
}
