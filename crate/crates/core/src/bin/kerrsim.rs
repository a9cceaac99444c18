//! Batch CLI for the dissipative Kerr-cavity simulator.
//!
//! Exit codes: 0 success, 1 a validation or threshold check failed,
//! 2 usage/config error.

use clap::{Args, Parser, Subcommand};
use kerrsim::config::{
    parse_config, OutputFormat, RunConfig, DEFAULT_COMPARE_THRESHOLD,
    DEFAULT_KRAUS_CHECK_THRESHOLD,
};
use kerrsim::runner;
use kerrsim::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kerrsim", version, about = "Dissipative Kerr-cavity simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; omit to print the payload to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured state over the time grid and emit observables.
    Evolve(CommonArgs),
    /// Run several solvers on the same problem and compare them pairwise.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest tolerated pairwise deviation.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Run the invariant-validation suite and print one line per check.
    Validate(CommonArgs),
    /// Inspect the generalized Kraus pairs term by term.
    KrausCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest tolerated reconstruction deviation.
        #[arg(long)]
        threshold: Option<f64>,
    },
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| {
        Error::Usage(format!(
            "cannot read config file {}: {e}",
            common.config.display()
        ))
    })?;
    let mut cfg = parse_config(&text)?;
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    if let Some(format) = common.format {
        cfg.format = format;
    }
    cfg.validate_format_constraints()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Evolve(common) => {
            let cfg = load_config(&common)?;
            let outcome = runner::run_evolve(&cfg)?;
            if outcome.tail_warning {
                eprintln!(
                    "warning: initial state lost probability mass {:.3e} to truncation",
                    outcome.tail_mass
                );
            }
            match &outcome.written_to {
                Some(path) => eprintln!(
                    "wrote {} rows to {}",
                    outcome.rows.len(),
                    path.display()
                ),
                None => print!("{}", outcome.payload),
            }
            Ok(true)
        }
        Command::Compare { common, threshold } => {
            let cfg = load_config(&common)?;
            let threshold = threshold.unwrap_or(DEFAULT_COMPARE_THRESHOLD);
            let outcome = runner::run_compare(&cfg, threshold)?;
            for run in &outcome.runs {
                println!(
                    "t={:<8} {:<10} trace_drift={:.3e} wall={:.3}s",
                    run.t, run.solver, run.trace_drift, run.wall_seconds
                );
            }
            for pair in &outcome.pairs {
                let status = if pair.max_abs_deviation <= threshold {
                    "ok"
                } else {
                    "EXCEEDS"
                };
                println!(
                    "t={:<8} {:<10} vs {:<10} max_dev={:.6e}  [{status}]",
                    pair.t, pair.solver_a, pair.solver_b, pair.max_abs_deviation
                );
            }
            for err in &outcome.errors {
                eprintln!("t={} solver {} failed: {}", err.t, err.solver, err.message);
            }
            if let Some(path) = &outcome.written_to {
                eprintln!("wrote report to {}", path.display());
            }
            println!(
                "compare: {} (threshold {:.1e})",
                if outcome.passed { "PASS" } else { "FAIL" },
                threshold
            );
            Ok(outcome.passed)
        }
        Command::Validate(common) => {
            let cfg = load_config(&common)?;
            let outcome = runner::run_validate(&cfg)?;
            for check in &outcome.checks {
                println!(
                    "{:<28} {}  residual={:.3e}  (tolerance {:.1e})",
                    check.name,
                    if check.passed { "PASS" } else { "FAIL" },
                    check.residual,
                    check.tolerance
                );
            }
            if let Some(path) = &outcome.written_to {
                eprintln!("wrote report to {}", path.display());
            }
            println!("validate: {}", if outcome.passed { "PASS" } else { "FAIL" });
            Ok(outcome.passed)
        }
        Command::KrausCheck { common, threshold } => {
            let cfg = load_config(&common)?;
            let threshold = threshold.unwrap_or(DEFAULT_KRAUS_CHECK_THRESHOLD);
            let outcome = runner::run_kraus_check(&cfg, threshold)?;
            for row in &outcome.rows {
                println!(
                    "t={:<8} terms={:<5} max_defect={:.6e} defects>1e-3: {:<5} \
                     reconstruction_dev={:.3e} completeness={:.3e}",
                    row.t,
                    row.terms,
                    row.max_conjugacy_defect,
                    row.strongly_non_conjugate_terms,
                    row.reconstruction_deviation,
                    row.completeness_residual
                );
            }
            if let Some(path) = &outcome.written_to {
                eprintln!("wrote per-term table to {}", path.display());
            }
            println!(
                "kraus-check: {} (threshold {:.1e})",
                if outcome.passed { "PASS" } else { "FAIL" },
                threshold
            );
            Ok(outcome.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
