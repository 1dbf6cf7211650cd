//! The `dpencil` command-line front end.
//!
//! Subcommands `simulate`, `eigen`, `verify` and `plot` share the scenario
//! flags. Exit codes: 0 success, 1 parse error, 2 validation error, 3 I/O
//! error, 4 verification failure.

pub mod config;
pub mod output;
pub mod scenario;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::samuelson::{self, SamuelsonParams};
use config::{Engine, Expenditure, ScenarioConfig};
use output::{render_svg, write_csv, Series};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::VerifyFailed => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dpencil",
    version,
    about = "Multiplier-accelerator model as a singular discrete-time system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the trajectory as CSV (k,T,C,I,G).
    Simulate(ScenarioArgs),
    /// Print the pencil's determinant polynomial, eigenvalues and regime.
    Eigen(ScenarioArgs),
    /// Compare every engine with the recursion oracle.
    Verify {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Run the 45-point (a, b) grid with gbar in {0, 1, 5} instead of one scenario.
        #[arg(long)]
        grid: bool,
    },
    /// Write an SVG plot of T, C and I.
    Plot(ScenarioArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// key = value scenario file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Constant government expenditure.
    #[arg(long, allow_negative_numbers = true)]
    gbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    horizon: Option<i64>,
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                ScenarioConfig::parse(&text)?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(v) = self.a {
            cfg.a = v;
        }
        if let Some(v) = self.b {
            cfg.b = v;
        }
        if let Some(v) = self.gbar {
            cfg.expenditure = Expenditure::Constant(v);
        }
        if let Some(v) = self.t0 {
            cfg.t0 = v;
        }
        if let Some(v) = self.t1 {
            cfg.t1 = v;
        }
        if self.t2.is_some() {
            cfg.t2 = self.t2;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if self.engine.is_some() {
            cfg.engine = self.engine;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// CSV text of a scenario's trajectory.
pub fn simulate_csv(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let params = cfg.validate()?;
    let engine = cfg.engine.unwrap_or(Engine::Pencil);
    let states = scenario::engine_states(cfg, &params, engine)?;
    Ok(write_csv(&scenario::csv_rows(cfg, &params, &states)))
}

/// SVG text of a scenario's trajectory.
pub fn plot_svg(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let params = cfg.validate()?;
    let engine = cfg.engine.unwrap_or(Engine::Pencil);
    let states = scenario::engine_states(cfg, &params, engine)?;
    let t: Vec<f64> = states.iter().map(|s| s.t).collect();
    let c: Vec<f64> = states.iter().map(|s| s.c).collect();
    let i: Vec<f64> = states.iter().map(|s| s.i).collect();
    let title = format!("a = {}, b = {} ({engine})", params.a(), params.b());
    let series = [
        Series {
            name: "T",
            color: "#1f77b4",
            values: &t,
        },
        Series {
            name: "C",
            color: "#2ca02c",
            values: &c,
        },
        Series {
            name: "I",
            color: "#d62728",
            values: &i,
        },
    ];
    Ok(render_svg(&title, samuelson::START_INDEX, &series).0)
}

/// Multipliers and accelerators of the reference grid.
pub const GRID_A: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const GRID_B: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const GRID_GBAR: [f64; 3] = [0.0, 1.0, 5.0];

fn verify_grid(base: &ScenarioConfig, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let mut all = true;
    let mut lines = String::new();
    for &a in &GRID_A {
        for &b in &GRID_B {
            for &g in &GRID_GBAR {
                let cfg = ScenarioConfig {
                    a,
                    b,
                    t2: None,
                    expenditure: Expenditure::Constant(g),
                    ..base.clone()
                };
                let params = cfg.validate()?;
                let r = scenario::verify(&cfg, &params, None)?;
                all &= r.pass;
                lines.push_str(&format!(
                    "a={a} b={b} gbar={g}: {} pencil {:e} closed_form {:e}\n",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.pencil.relative,
                    r.closed_form.relative
                ));
            }
        }
    }
    lines.push_str(&format!("result: {}\n", if all { "PASS" } else { "FAIL" }));
    emit(&lines, base.out.as_deref(), stdout)?;
    Ok(all)
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            let csv = simulate_csv(&cfg)?;
            emit(&csv, cfg.out.as_deref(), stdout)
        }
        Command::Eigen(args) => {
            let cfg = args.resolve()?;
            let params: SamuelsonParams = cfg.validate()?;
            let report = scenario::eigen_report(&params)?;
            emit(&report, cfg.out.as_deref(), stdout)
        }
        Command::Verify { args, grid } => {
            let cfg = args.resolve()?;
            if let Some(e) = cfg.engine.filter(|e| *e != Engine::VerifyAll) {
                return Err(CliError::Validation(format!(
                    "verify runs every engine; engine = {e} is not allowed"
                )));
            }
            let pass = if grid {
                cfg.validate()?;
                verify_grid(&cfg, stdout)?
            } else {
                let params = cfg.validate()?;
                let report = scenario::verify(&cfg, &params, None)?;
                emit(&report.render(), cfg.out.as_deref(), stdout)?;
                report.pass
            };
            if pass {
                Ok(())
            } else {
                Err(CliError::VerifyFailed)
            }
        }
        Command::Plot(args) => {
            let cfg = args.resolve()?;
            let svg = plot_svg(&cfg)?;
            emit(&svg, cfg.out.as_deref(), stdout)
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "dpencil: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("dpencil").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["simulate", "--horizon", "4"]).0, 0);
        assert_eq!(run_args(&["simulate", "--a", "zero"]).0, 1);
        assert_eq!(run_args(&["bogus"]).0, 1);
        let (code, _, err) = run_args(&["simulate", "--a", "1.2"]);
        assert_eq!(code, 2);
        assert!(err.contains("0 < a < 1"), "{err}");
        assert_eq!(
            run_args(&["simulate", "--config", "/nonexistent/x.cfg"]).0,
            3
        );
        assert_eq!(run_args(&["simulate", "--engine", "verify_all"]).0, 2);
        assert_eq!(run_args(&["verify", "--engine", "oracle"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn negative_overrides() {
        let (code, out, _) =
            run_args(&["simulate", "--t0", "-3", "--t1", "-1.5", "--horizon", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("\n0,-3,,,1\n"), "{out}");
    }

    #[test]
    fn inconsistent_t2_is_rejected() {
        let (code, _, err) = run_args(&["simulate", "--t2", "7", "--horizon", "5"]);
        assert_eq!(code, 2);
        assert!(err.contains("inconsistent"));
        // the recursion continuation of t0 = t1 = 0, gbar = 1 is t2 = 1
        assert_eq!(run_args(&["simulate", "--t2", "1", "--horizon", "5"]).0, 0);
    }
}
