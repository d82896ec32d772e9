//! `acc`: angular control charts from the command line.
//!
//! Exit codes: 0 when every point is in control (or a check passes), 2 when
//! any point is out of control (or verification fails), 1 on usage, parse or
//! I/O errors.

mod config;
mod io;

use std::fs::{self, File};
use std::io::{stdout, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acc::chart::build_chart;
use acc::oracle::{default_grid, sweep};
use acc::render::{render_svg, RenderOptions};
use acc::simulate::{aggregate_r, run_scenario};
use acc::{Chart, DrawingScale, FalseAlarmProb};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::SystemConfig;
use crate::io::{ClassificationReport, LimitsReport};

#[derive(Debug, Parser)]
#[command(name = "acc", version, about = "Angular control charts for multi-state reliability monitoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SystemArgs {
    /// System configuration (TOML).
    config: PathBuf,
    /// Override the configured drawing scale (linear, sqrt, cbrt, qrt).
    #[arg(long)]
    drawing_scale: Option<DrawingScale>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print time and angular control limits for every state.
    Limits {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        json: bool,
    },
    /// Classify observations against the limits.
    Classify {
        #[command(flatten)]
        system: SystemArgs,
        /// Observations: CSV `seq,state,ttf`, or a classification JSON.
        observations: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Render the chart as SVG and write the classification JSON next to it.
    Chart {
        #[command(flatten)]
        system: SystemArgs,
        observations: PathBuf,
        /// SVG output path.
        #[arg(long)]
        out: PathBuf,
        /// Classification JSON path; defaults to the SVG path with a .json extension.
        #[arg(long)]
        json_out: Option<PathBuf>,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
        #[arg(long, default_value_t = 600.0)]
        height: f64,
    },
    /// Generate observations from the `[[phases]]` of a configuration.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum every r consecutive times to failure within each state.
    Aggregate {
        #[arg(long)]
        r: usize,
        input: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check closed-form limits against the bisection oracle on the default grid.
    Verify {
        #[arg(long, default_value_t = FalseAlarmProb::DEFAULT.value())]
        false_alarm: f64,
        /// Angle tolerance in degrees.
        #[arg(long, default_value_t = acc::oracle::ANGLE_AGREEMENT_DEG)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
}

enum Outcome {
    Clean,
    Flagged,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_system(args: &SystemArgs) -> Result<SystemConfig> {
    Ok(config::load(&args.config)?.with_scale(args.drawing_scale))
}

fn build(cfg: &SystemConfig, observations: &Path) -> Result<Chart> {
    let obs = io::load_observations(&cfg.system, observations)?;
    Ok(build_chart(&cfg.system, cfg.resolved_design(), &obs)?)
}

fn flagged(report: &ClassificationReport) -> Outcome {
    if report.any_out_of_control() {
        Outcome::Flagged
    } else {
        Outcome::Clean
    }
}

fn write_json<T: serde::Serialize>(mut out: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    io::ensure_parent(path)?;
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Limits { system, json } => {
            let cfg = load_system(&system)?;
            let chart = build_chart(&cfg.system, cfg.resolved_design(), &[])?;
            let report = LimitsReport::new(&chart);
            if json {
                write_json(stdout().lock(), &report)?;
            } else {
                io::print_limits(stdout().lock(), &report)?;
            }
            Ok(Outcome::Clean)
        }
        Command::Classify { system, observations, json } => {
            let cfg = load_system(&system)?;
            let report = ClassificationReport::new(&build(&cfg, &observations)?);
            if json {
                write_json(stdout().lock(), &report)?;
            } else {
                io::print_classification(stdout().lock(), &report)?;
            }
            Ok(flagged(&report))
        }
        Command::Chart { system, observations, out, json_out, width, height } => {
            let cfg = load_system(&system)?;
            let chart = build(&cfg, &observations)?;
            let options = RenderOptions { width, height, ..RenderOptions::default() };
            let svg = render_svg(&chart, &options)?;
            io::ensure_parent(&out)?;
            fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
            let json_path = json_out.unwrap_or_else(|| out.with_extension("json"));
            let report = ClassificationReport::new(&chart);
            let mut w = create(&json_path)?;
            write_json(&mut w, &report)?;
            w.flush()?;
            Ok(flagged(&report))
        }
        Command::Simulate { scenario, seed, out } => {
            let cfg = config::load(&scenario)?;
            let obs = run_scenario(&cfg.scenario(seed)?)?;
            let rows: Vec<_> = obs
                .iter()
                .map(|o| (o.seq, cfg.system.states()[o.state - 1].label.clone(), o.ttf.to_string()))
                .collect();
            emit_rows(out.as_deref(), &rows)?;
            Ok(Outcome::Clean)
        }
        Command::Aggregate { r, input, out } => {
            let rows = io::read_rows(&input)?;
            // States are opaque here: number them in order of appearance.
            let mut labels: Vec<String> = Vec::new();
            let obs: Vec<_> = rows
                .iter()
                .map(|row| {
                    let index = match labels.iter().position(|l| *l == row.state) {
                        Some(i) => i + 1,
                        None => {
                            labels.push(row.state.clone());
                            labels.len()
                        }
                    };
                    acc::Observation::new(row.seq, index, row.ttf)
                })
                .collect();
            let decimals = io::max_decimals(&rows);
            let aggregated = aggregate_r(&obs, r)?;
            let rows: Vec<_> = aggregated
                .iter()
                .map(|o| (o.seq, labels[o.state - 1].clone(), format!("{:.*}", decimals, o.ttf)))
                .collect();
            emit_rows(out.as_deref(), &rows)?;
            Ok(Outcome::Clean)
        }
        Command::Verify { false_alarm, tol, json } => {
            if tol < acc::oracle::ANGLE_AGREEMENT_DEG {
                bail!("tolerance must be at least {:e} degrees", acc::oracle::ANGLE_AGREEMENT_DEG);
            }
            let report = sweep(&default_grid(), FalseAlarmProb::new(false_alarm)?, tol)?;
            let mut out = stdout().lock();
            if json {
                write_json(&mut out, &report)?;
            } else {
                writeln!(out, "{:<28} {:<7} {:>12} {:>12}  result", "distribution", "scale", "max |Δθ|°", "max rel Δt")?;
                for r in &report.reports {
                    writeln!(
                        out,
                        "{:<28} {:<7} {:>12.3e} {:>12.3e}  {}",
                        r.spec.to_string(),
                        r.scale,
                        r.max_angle_deviation(),
                        r.max_quantile_deviation(),
                        if r.pass { "pass" } else { "FAIL" }
                    )?;
                }
                let failed = report.failures().count();
                writeln!(out, "{} cases, {} failed", report.reports.len(), failed)?;
            }
            Ok(if report.pass() { Outcome::Clean } else { Outcome::Flagged })
        }
    }
}

fn emit_rows(out: Option<&Path>, rows: &[(u64, String, String)]) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            io::write_rows(&mut w, rows)?;
            w.flush()?;
        }
        None => io::write_rows(stdout().lock(), rows)?,
    }
    Ok(())
}
