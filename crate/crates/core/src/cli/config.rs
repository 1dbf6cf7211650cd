//! Scenario configuration: flat `key = value` files plus flag overrides.
//!
//! ```text
//! # canonical damped-cycle scenario
//! a = 0.5
//! b = 1
//! gbar = 1            # or: expenditure = 1, 1, 1.5, 2, ...  (G_0, G_1, ...)
//! t0 = 0
//! t1 = 0
//! horizon = 100
//! engine = pencil     # pencil | closed_form | oracle | verify_all
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::samuelson::{GovernmentExpenditure, SamuelsonParams};

use super::CliError;

/// Solution route used to produce a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    #[value(name = "pencil")]
    Pencil,
    #[value(name = "closed_form")]
    ClosedForm,
    #[value(name = "oracle")]
    Oracle,
    #[value(name = "verify_all")]
    VerifyAll,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pencil" => Ok(Engine::Pencil),
            "closed_form" => Ok(Engine::ClosedForm),
            "oracle" => Ok(Engine::Oracle),
            "verify_all" => Ok(Engine::VerifyAll),
            other => Err(format!(
                "unknown engine `{other}` (expected pencil, closed_form, oracle or verify_all)"
            )),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Pencil => "pencil",
            Engine::ClosedForm => "closed_form",
            Engine::Oracle => "oracle",
            Engine::VerifyAll => "verify_all",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expenditure {
    Constant(f64),
    /// `G_0, G_1, ...`
    Inline(Vec<f64>),
}

/// Default deviation tolerance for `verify`.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

/// A fully specified scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub a: f64,
    pub b: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: Option<f64>,
    pub expenditure: Expenditure,
    pub horizon: i64,
    pub engine: Option<Engine>,
    pub out: Option<PathBuf>,
    pub tolerance: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            a: 0.5,
            b: 1.0,
            t0: 0.0,
            t1: 0.0,
            t2: None,
            expenditure: Expenditure::Constant(1.0),
            horizon: 100,
            engine: None,
            out: None,
            tolerance: DEFAULT_VERIFY_TOL,
        }
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64, CliError> {
    value.parse::<f64>().map_err(|_| {
        CliError::Parse(format!(
            "line {line}: `{key}` expects a number, got `{value}`"
        ))
    })
}

impl ScenarioConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ScenarioConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                CliError::Parse(format!(
                    "line {line}: expected `key = value`, got `{content}`"
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "a" => cfg.a = parse_f64(key, value, line)?,
                "b" => cfg.b = parse_f64(key, value, line)?,
                "t0" => cfg.t0 = parse_f64(key, value, line)?,
                "t1" => cfg.t1 = parse_f64(key, value, line)?,
                "t2" => cfg.t2 = Some(parse_f64(key, value, line)?),
                "gbar" => cfg.expenditure = Expenditure::Constant(parse_f64(key, value, line)?),
                "expenditure" => {
                    let values = value
                        .split(',')
                        .map(|v| parse_f64(key, v.trim(), line))
                        .collect::<Result<Vec<_>, _>>()?;
                    cfg.expenditure = Expenditure::Inline(values);
                }
                "horizon" => {
                    cfg.horizon = value.parse::<i64>().map_err(|_| {
                        CliError::Parse(format!(
                            "line {line}: `horizon` expects an integer, got `{value}`"
                        ))
                    })?
                }
                "engine" => {
                    cfg.engine = Some(
                        value
                            .parse()
                            .map_err(|e| CliError::Parse(format!("line {line}: {e}")))?,
                    )
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                "tolerance" => cfg.tolerance = parse_f64(key, value, line)?,
                other => {
                    return Err(CliError::Parse(format!(
                        "line {line}: unknown key `{other}`"
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Checks model bounds and data coverage, returning the model parameters.
    pub fn validate(&self) -> Result<SamuelsonParams, CliError> {
        if self.horizon < 3 {
            return Err(CliError::Validation(format!(
                "horizon = {} violates horizon >= 3",
                self.horizon
            )));
        }
        for (name, v) in [
            ("t0", self.t0),
            ("t1", self.t1),
            ("tolerance", self.tolerance),
        ] {
            if !v.is_finite() {
                return Err(CliError::Validation(format!("{name} must be finite")));
            }
        }
        if let Some(t2) = self.t2 {
            if !t2.is_finite() {
                return Err(CliError::Validation("t2 must be finite".into()));
            }
        }
        let g = match &self.expenditure {
            Expenditure::Constant(g) => GovernmentExpenditure::Constant(*g),
            Expenditure::Inline(values) => {
                if (values.len() as i64) < self.horizon + 1 {
                    return Err(CliError::Validation(format!(
                        "expenditure lists {} values but horizon {} needs G_0..G_{}",
                        values.len(),
                        self.horizon,
                        self.horizon
                    )));
                }
                GovernmentExpenditure::Sequence {
                    start: 0,
                    values: values.clone(),
                }
            }
        };
        SamuelsonParams::new(self.a, self.b, g).map_err(|e| CliError::Validation(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let cfg = ScenarioConfig::parse(
            "# comment\na = 0.7\nb=2 # trailing\n\nt0 = -1\nt1 = 3e0\nt2 = 4\n\
             expenditure = 1, 2, 3, 4\nhorizon = 3\nengine = closed_form\nout = x.csv\n",
        )
        .unwrap();
        assert_eq!(cfg.a, 0.7);
        assert_eq!(cfg.b, 2.0);
        assert_eq!(cfg.t0, -1.0);
        assert_eq!(cfg.t2, Some(4.0));
        assert_eq!(
            cfg.expenditure,
            Expenditure::Inline(vec![1.0, 2.0, 3.0, 4.0])
        );
        assert_eq!(cfg.engine, Some(Engine::ClosedForm));
        assert_eq!(cfg.out, Some(PathBuf::from("x.csv")));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "a 0.5",
            "a = x",
            "horizon = 2.5",
            "engine = qz",
            "colour = red",
        ] {
            assert!(
                matches!(ScenarioConfig::parse(bad), Err(CliError::Parse(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn validation_errors() {
        let cfg = ScenarioConfig {
            a: 1.2,
            ..Default::default()
        };
        match cfg.validate() {
            Err(CliError::Validation(msg)) => assert!(msg.contains("0 < a < 1"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let cfg = ScenarioConfig {
            horizon: 2,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(CliError::Validation(_))));
        let cfg = ScenarioConfig {
            horizon: 5,
            expenditure: Expenditure::Inline(vec![1.0; 5]),
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(CliError::Validation(_))));
    }
}
