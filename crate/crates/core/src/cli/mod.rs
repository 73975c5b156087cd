//! Command-line front end: `simulate`, `bounds` and `verify`.
//!
//! Every subcommand writes one CSV (header plus rows) to `--out` or to
//! standard output. Exit status is 0 on success, 1 when a verified
//! inequality fails, and 2 on usage or configuration errors. The worker
//! thread count follows `RAYON_NUM_THREADS`.

mod bounds_table;
pub mod config;
mod simulate;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use bounds_table::{run_bounds, BOUNDS_CSV_HEADER};
pub use config::{gaussian_designs, orthogonal_designs, DesignKind, ExperimentConfig, GridPoint};
pub use simulate::{run_simulate, SIMULATE_CSV_HEADER};

use crate::error::{invalid, Result};
use crate::infotheory::{run_suite, SUITE_CSV_HEADER, SUITE_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "commest", version, about = "Communication-constrained estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo risk sweep described by a key = value config file.
    Simulate {
        config: PathBuf,
        /// Output CSV path (default: the config's `out`, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print suggested gnuplot commands to stderr.
        #[arg(long)]
        gnuplot_hints: bool,
    },
    /// Evaluate rate formulas for each row of a query CSV.
    Bounds {
        queries: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        gnuplot_hints: bool,
    },
    /// Run randomized inequality suites (comma-separated names).
    Verify {
        suites: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        gnuplot_hints: bool,
    },
}

/// Parse arguments, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Simulate {
            config,
            out,
            gnuplot_hints,
        } => {
            let text = match fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return usage(format!("cannot read {}: {e}", config.display())),
            };
            let cfg = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => return usage(format!("{}: {e}", config.display())),
            };
            let lines = run_simulate(&cfg);
            let target = out.or_else(|| cfg.out.clone());
            if gnuplot_hints {
                simulate_hints(target.as_deref());
            }
            emit(&lines, target.as_deref(), EXIT_OK)
        }
        Command::Bounds {
            queries,
            out,
            gnuplot_hints,
        } => {
            let text = match fs::read_to_string(&queries) {
                Ok(t) => t,
                Err(e) => return usage(format!("cannot read {}: {e}", queries.display())),
            };
            let lines = match run_bounds(&text) {
                Ok(l) => l,
                Err(e) => return usage(format!("{}: {e}", queries.display())),
            };
            if gnuplot_hints {
                eprintln!("# gnuplot: set datafile separator ','");
                eprintln!("# gnuplot: plot '{}' using 1:8 with points title 'value by query'", name_of(out.as_deref()));
            }
            emit(&lines, out.as_deref(), EXIT_OK)
        }
        Command::Verify {
            suites,
            count,
            seed,
            out,
            gnuplot_hints,
        } => {
            let (lines, all_hold) = match run_verify(&suites, count, seed) {
                Ok(r) => r,
                Err(e) => return usage(e.to_string()),
            };
            if gnuplot_hints {
                eprintln!("# gnuplot: set datafile separator ','");
                eprintln!("# gnuplot: plot '{}' using 3:4 with points title 'lhs vs rhs', x with lines", name_of(out.as_deref()));
            }
            emit(&lines, out.as_deref(), if all_hold { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

fn usage(msg: String) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn name_of(out: Option<&Path>) -> String {
    out.map_or_else(|| "-".into(), |p| p.display().to_string())
}

fn simulate_hints(out: Option<&Path>) {
    let name = name_of(out);
    eprintln!("# gnuplot: set datafile separator ','; set logscale xy");
    eprintln!("# gnuplot: plot '{name}' using 3:12 with linespoints title 'mse vs m', '' using 3:17 with lines title 'centralized'");
}

fn emit(lines: &[String], out: Option<&Path>, status: i32) -> i32 {
    let mut text = lines.join("\n");
    text.push('\n');
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                return usage(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    status
}

/// Run the named suites. Returns the CSV lines and whether every instance
/// satisfied its inequality.
pub fn run_verify(suites: &str, count: usize, seed: u64) -> Result<(Vec<String>, bool)> {
    let names: Vec<&str> = suites.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(invalid("no suite names given"));
    }
    if let Some(bad) = names.iter().find(|n| !SUITE_NAMES.contains(n)) {
        return Err(invalid(format!(
            "unknown suite {bad:?} (known: {})",
            SUITE_NAMES.join(", ")
        )));
    }
    let mut lines = vec![SUITE_CSV_HEADER.to_string()];
    let mut all_hold = true;
    for name in names {
        let rows = run_suite(name, count, seed)?;
        let violations = rows.iter().filter(|r| !r.holds).count();
        eprintln!("{name}: {} instances, {violations} violations", rows.len());
        all_hold &= violations == 0;
        lines.extend(rows.iter().map(|r| r.csv_row()));
    }
    Ok((lines, all_hold))
}
