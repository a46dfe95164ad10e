use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use scatterlab::{Config, ExperimentKind, Report};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "scatterlab",
    about = "Spectral experiments for point-scatterer eigenfunctions on round spheres",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a flat-text config file.
    Run {
        /// Path to the config (`key = value` lines; see the README).
        config: PathBuf,
        /// Output directory override (defaults to the config's `out` key,
        /// then to `results/<experiment>-d<dim>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every experiment with its default configuration.
    VerifyAll {
        /// Sphere dimension.
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
        dim: u32,
        /// Output directory for the reports.
        #[arg(long)]
        out: PathBuf,
    },
    /// List the available experiments.
    ListExperiments,
}

fn main() {
    let code = match dispatch() {
        Ok(all_pass) => {
            if all_pass {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

/// Prints a line, tolerating a closed pipe (e.g. `... | head`).
fn say(line: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn dispatch() -> Result<bool> {
    match Cli::parse().command {
        Command::ListExperiments => {
            for kind in ExperimentKind::all() {
                say(format_args!("{:<14} {}", kind.name(), kind.description()));
            }
            Ok(true)
        }
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("cannot read config {}", config.display()))?;
            let cfg = Config::parse(&text)?;
            let report = scatterlab::run(&cfg)?;
            let out_dir = out.unwrap_or_else(|| {
                cfg.get("out")
                    .map(PathBuf::from)
                    .unwrap_or_else(|| default_out_dir(&report))
            });
            finish(&[report], &out_dir)
        }
        Command::VerifyAll { dim, out } => {
            let mut reports = Vec::new();
            for kind in ExperimentKind::all() {
                let cfg = kind.default_config(dim);
                reports.push(kind.run(&cfg)?);
            }
            finish(&reports, &out)
        }
    }
}

fn default_out_dir(report: &Report) -> PathBuf {
    PathBuf::from(format!("results/{}-d{}", report.experiment, report.d))
}

fn finish(reports: &[Report], out_dir: &std::path::Path) -> Result<bool> {
    let mut all_pass = true;
    for report in reports {
        report.emit(out_dir)?;
        let failures = report.failures();
        all_pass &= failures == 0;
        say(format_args!(
            "{:<14} d={} rows={:<4} {}",
            report.experiment,
            report.d,
            report.rows.len(),
            if failures == 0 {
                "PASS".to_string()
            } else {
                format!("FAIL ({failures} rows)")
            }
        ));
    }
    say(format_args!(
        "reports written to {} ({})",
        out_dir.display(),
        if all_pass {
            "all pass"
        } else {
            "failures present"
        }
    ));
    Ok(all_pass)
}
