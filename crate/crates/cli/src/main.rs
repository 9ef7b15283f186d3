//! `maslov-cli`: Maslov indices, spectral flows and splitting-formula checks
//! from JSON or TOML inputs.
//!
//! Exit codes: 0 success, 2 invalid input or flags, 3 numerical failure,
//! `16 + mask` when `verify` finds a failing identity (bit `k` of `mask`
//! marks the `k`-th theorem check).

mod commands;
mod defaults;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use maslov_core::bvp::Side;

use commands::Run;
use output::Sink;

#[derive(Parser)]
#[command(name = "maslov-cli", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input file (JSON, or TOML when the extension is `.toml`).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Directory for `<command>.json` and traces; JSON goes to stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = defaults::SEED)]
    seed: u64,

    /// `lo,hi`, or a single `w` meaning `-w,w`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,

    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Also write `<command>_trace.csv`.
    #[arg(long, global = true)]
    trace: bool,

    #[arg(long, global = true, default_value_t = defaults::TOL_KERNEL)]
    tol_kernel: f64,

    #[arg(long, global = true, default_value_t = defaults::TOL_SUBSPACE)]
    tol_subspace: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Maslov index of a Lagrangian path against a fixed Lagrangian.
    Maslov,
    /// Spectral flow of a path of symmetric matrices.
    Sf,
    /// Check the four index identities for a model problem (default: the demo).
    Verify,
    /// Eigenvalues of one operator of a model problem.
    Spectrum {
        #[arg(long, value_enum, default_value_t = SideArg::Circle)]
        side: SideArg,
        /// Family parameter.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
    },
    /// Print the table of numerical defaults.
    Defaults,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Circle,
    Minus,
    Plus,
}

fn parse_window(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let window = match parts.as_slice() {
        [w] => {
            let w: f64 = w.parse()?;
            (-w, w)
        }
        [lo, hi] => (lo.parse()?, hi.parse()?),
        _ => bail!("--window takes `lo,hi` or a single half-width"),
    };
    if !(window.0.is_finite() && window.1.is_finite() && window.0 < window.1) {
        bail!("--window {text} is empty");
    }
    Ok(window)
}

fn run(cli: Cli) -> Result<i32> {
    for (name, tol) in [("--tol-kernel", cli.tol_kernel), ("--tol-subspace", cli.tol_subspace)] {
        if !(tol.is_finite() && tol > 0.0) {
            bail!("{name} must be positive, got {tol}");
        }
    }
    if cli.grid == Some(0) {
        bail!("--grid must be positive");
    }
    let run = Run {
        input: cli.input,
        sink: Sink { out: cli.out },
        seed: cli.seed,
        window: cli.window.as_deref().map(parse_window).transpose()?,
        grid: cli.grid,
        trace: cli.trace,
        tol_kernel: cli.tol_kernel,
        tol_subspace: cli.tol_subspace,
    };
    match cli.command {
        Command::Maslov => commands::maslov(&run),
        Command::Sf => commands::sf(&run),
        Command::Verify => commands::verify(&run),
        Command::Spectrum { side, t } => {
            let side = match side {
                SideArg::Circle => Side::Circle,
                SideArg::Minus => Side::Minus,
                SideArg::Plus => Side::Plus,
            };
            commands::spectrum(&run, side, t)
        }
        Command::Defaults => {
            let table: Vec<_> = defaults::TABLE
                .iter()
                .map(|d| {
                    serde_json::json!({
                        "key": d.key, "value": d.value, "flag": d.flag,
                        "commands": d.commands, "meaning": d.meaning,
                    })
                })
                .collect();
            run.sink.json("defaults", serde_json::Value::Array(table))?;
            Ok(0)
        }
    }
}

/// The error chain joined by `: `, skipping causes already spelled out by
/// their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut text = String::new();
    for cause in err.chain() {
        let part = cause.to_string();
        if text.ends_with(&part) {
            continue;
        }
        if !text.is_empty() {
            text.push_str(": ");
        }
        text.push_str(&part);
    }
    text
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            let code = commands::exit_code(&err);
            let kind = if code == 3 { "numerical failure" } else { "invalid input" };
            eprintln!("error ({kind}): {}", describe(&err));
            ExitCode::from(code as u8)
        }
    }
}
