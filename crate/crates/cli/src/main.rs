//! `genmeans`: evaluate generalized means, run comparisons and the
//! verification suites.
//!
//! Exit status: 0 on success, `Holds` or `Inconclusive`; 1 when a comparison
//! fails or the verification suite finds a disagreement; 2 on invalid input;
//! 3 on numeric or capability errors.

mod commands;
mod format;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use genmeans::{Error, Execution, Status, Tolerances};

use commands::{Output, Settings};

#[derive(Debug, Parser)]
#[command(name = "genmeans", version, about = "Generalized means: evaluation, derivatives and comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration for the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output encoding; csv is available for gini-region and lemma2.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for the oracle and the verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for grid sweeps; 1 runs sequentially. Defaults to all cores.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Relative slack tolerance of the comparison conditions.
    #[arg(long = "tol-cmp", global = true, default_value_t = 1e-10, value_name = "X")]
    tol_cmp: f64,

    /// Oracle sample count (verify: 64, compare-local: 256) or number of
    /// sampled ratios in the Gini cross-check (2001).
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a mean at a point: {"mean", "x", "method": implicit|explicit|both}.
    Eval,
    /// Diagonal first and second derivatives: {"mean", "x0", "finite_differences"}.
    Derivatives,
    /// Dirac-mixture difference quotients and their limit: {"pair", "family", "t0", "nu", "x", "gammas"}.
    Lemma2,
    /// Local comparison at a diagonal point: {"left", "right", "x0", "radius", "oracle"}.
    CompareLocal,
    /// Comparison for every measure: {"left", "right", "family", "domain"}, {"f", "h", "domain"} or {"p", "q"}.
    CompareGlobal,
    /// Gini comparison verdicts over a (p, q) grid: {"p": [lo, hi, step], "q": [..], "r", "s", "m_star"}.
    GiniRegion,
    /// Run the scenario suites: {"scenarios": [..]}.
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Derivatives => "derivatives",
            Command::Lemma2 => "lemma2",
            Command::CompareLocal => "compare-local",
            Command::CompareGlobal => "compare-global",
            Command::GiniRegion => "gini-region",
            Command::Verify => "verify",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) => 2,
        _ => 3,
    }
}

fn read_config(path: &Option<PathBuf>) -> Result<Option<Value>, Error> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Error::Input(format!("{} is not valid JSON: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<(String, Status), Error> {
    if !(cli.tol_cmp >= 0.0 && cli.tol_cmp.is_finite()) {
        return Err(Error::Input(format!("--tol-cmp must be a non-negative number, got {}", cli.tol_cmp)));
    }
    let exec = match cli.jobs {
        Some(0) => return Err(Error::Input("--jobs must be at least 1".into())),
        Some(1) => Execution::Sequential,
        Some(n) => {
            // an already initialized pool is fine; it only happens in tests
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Execution::Parallel
        }
        None => Execution::Parallel,
    };
    let settings = Settings {
        seed: cli.seed,
        samples: cli.samples,
        tol: Tolerances {
            cmp: cli.tol_cmp,
            ..Tolerances::default()
        },
        exec,
    };
    let config = read_config(&cli.config)?;
    let out: Output = match cli.command {
        Command::Eval => commands::eval(config)?,
        Command::Derivatives => commands::derivatives(config)?,
        Command::Lemma2 => commands::lemma2(config)?,
        Command::CompareLocal => commands::compare_local(config, &settings)?,
        Command::CompareGlobal => commands::compare_global(config, &settings)?,
        Command::GiniRegion => commands::gini_region(config, &settings)?,
        Command::Verify => commands::verify_cmd(config, &settings)?,
    };
    let text = match cli.format {
        Format::Json => {
            let mut doc = json!({
                "command": cli.command.name(),
                "settings": {
                    "seed": cli.seed,
                    "samples": cli.samples,
                    "tol_cmp": cli.tol_cmp,
                },
            });
            if let Value::Object(extra) = out.json {
                doc.as_object_mut().expect("object").extend(extra);
            }
            format::to_json(&doc).map_err(|e| Error::Numeric(format!("serializing output: {e}")))?
        }
        Format::Csv => {
            let Some((header, rows)) = out.csv else {
                return Err(Error::Input(format!("--format csv is not available for {}", cli.command.name())));
            };
            format::to_csv(&header, &rows)
        }
    };
    Ok((text, out.status))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, status)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            ExitCode::from(if status == Status::Fails { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
