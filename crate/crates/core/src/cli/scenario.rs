//! Running a scenario: trajectories per engine, eigen reports, verification.

use std::fmt::Write as _;

use crate::descriptor::check_consistency;
use crate::pencil::{eigenstructure, weierstrass_decompose};
use crate::samuelson::{
    self, build_system, classify_regime, closed_form_trajectory, consistent_initial_state,
    natural_t2, pencil_trajectory, recursion_oracle, EconomicState, SamuelsonParams,
};

use super::config::{Engine, ScenarioConfig};
use super::output::{fmt_sig12, CsvRow};
use super::CliError;

fn model_err(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

/// Rejects an explicit `t2` that is off the solution manifold.
pub fn check_t2(cfg: &ScenarioConfig, params: &SamuelsonParams) -> Result<(), CliError> {
    let Some(t2) = cfg.t2 else { return Ok(()) };
    let system = build_system(params).map_err(model_err)?;
    let wform = weierstrass_decompose(system.pencil()).map_err(model_err)?;
    let ic = consistent_initial_state(params, cfg.t0, cfg.t1, t2);
    let report = check_consistency(&system, &wform, &ic).map_err(model_err)?;
    if !report.consistent {
        let expected = natural_t2(params, cfg.t0, cfg.t1).map_err(model_err)?;
        return Err(CliError::Validation(format!(
            "t2 = {t2} is inconsistent with t0, t1 and G_2 (the income identity requires t2 = {expected})"
        )));
    }
    Ok(())
}

/// States `k = 2..=horizon` from one engine.
pub fn engine_states(
    cfg: &ScenarioConfig,
    params: &SamuelsonParams,
    engine: Engine,
) -> Result<Vec<EconomicState>, CliError> {
    check_t2(cfg, params)?;
    let h = cfg.horizon;
    match engine {
        Engine::Pencil => pencil_trajectory(params, cfg.t0, cfg.t1, cfg.t2, h),
        Engine::ClosedForm => closed_form_trajectory(params, cfg.t0, cfg.t1, h),
        Engine::Oracle => recursion_oracle(params, cfg.t0, cfg.t1, h),
        Engine::VerifyAll => {
            return Err(CliError::Validation(
                "engine verify_all only applies to the verify command".into(),
            ))
        }
    }
    .map_err(model_err)
}

/// CSV rows from `k = 0`, with blanks where a quantity is undefined.
pub fn csv_rows(
    cfg: &ScenarioConfig,
    params: &SamuelsonParams,
    states: &[EconomicState],
) -> Vec<CsvRow> {
    let g = |k: i64| params.expenditure().at(k);
    let mut rows = vec![
        CsvRow {
            k: 0,
            t: cfg.t0,
            c: None,
            i: None,
            g: g(0),
        },
        CsvRow {
            k: 1,
            t: cfg.t1,
            c: Some(params.a() * cfg.t0),
            i: None,
            g: g(1),
        },
    ];
    rows.extend(states.iter().enumerate().map(|(j, s)| {
        let k = j as i64 + samuelson::START_INDEX;
        CsvRow {
            k,
            t: s.t,
            c: Some(s.c),
            i: Some(s.i),
            g: g(k),
        }
    }));
    rows
}

fn complex_str(z: num_complex::Complex64) -> String {
    if z.im == 0.0 {
        fmt_sig12(z.re)
    } else if z.im > 0.0 {
        format!("{} + {}i", fmt_sig12(z.re), fmt_sig12(z.im))
    } else {
        format!("{} - {}i", fmt_sig12(z.re), fmt_sig12(-z.im))
    }
}

fn poly_str(coefficients: &[f64]) -> String {
    let mut terms = Vec::new();
    for (deg, &c) in coefficients.iter().enumerate().rev() {
        let mag = fmt_sig12(c.abs());
        let term = match deg {
            0 => mag,
            1 => format!("{mag} s"),
            d => format!("{mag} s^{d}"),
        };
        let sign = if c < 0.0 { "-" } else { "+" };
        if terms.is_empty() {
            terms.push(if c < 0.0 { format!("-{term}") } else { term });
        } else {
            terms.push(format!("{sign} {term}"));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" ")
    }
}

/// Human-readable eigen report for the scenario's pencil.
pub fn eigen_report(params: &SamuelsonParams) -> Result<String, CliError> {
    let pencil = samuelson::pencil(params);
    let es = eigenstructure(&pencil).map_err(model_err)?;
    let wform = weierstrass_decompose(&pencil).map_err(model_err)?;
    let roots = samuelson::roots(params);
    let regime = classify_regime(params);
    let (rf, rg) = wform.residuals(&pencil);
    let mut out = String::new();
    let _ = writeln!(out, "a = {}", fmt_sig12(params.a()));
    let _ = writeln!(out, "b = {}", fmt_sig12(params.b()));
    let _ = writeln!(
        out,
        "det(sF - G) = {}",
        poly_str(es.det_poly.coefficients())
    );
    let coeffs: Vec<String> = es
        .det_poly
        .coefficients()
        .iter()
        .map(|&c| fmt_sig12(c))
        .collect();
    let _ = writeln!(out, "coefficients (ascending) = [{}]", coeffs.join(", "));
    let _ = writeln!(out, "discriminant = {}", fmt_sig12(roots.discriminant));
    let _ = writeln!(out, "s1 = {}", complex_str(roots.s1));
    let _ = writeln!(out, "s2 = {}", complex_str(roots.s2));
    for (n, ev) in es.finite.iter().enumerate() {
        let _ = writeln!(
            out,
            "pencil eigenvalue {} = {} (multiplicity {})",
            n + 1,
            complex_str(ev.value),
            ev.multiplicity
        );
    }
    let _ = writeln!(out, "p = {}", wform.p());
    let _ = writeln!(out, "q = {}", wform.q());
    let _ = writeln!(out, "q_star = {}", wform.q_star());
    let _ = writeln!(
        out,
        "weierstrass residuals = {}, {}",
        fmt_sig12(rf),
        fmt_sig12(rg)
    );
    let _ = writeln!(
        out,
        "regime = {}, {}",
        if regime.oscillatory {
            "oscillatory"
        } else {
            "non-oscillatory"
        },
        if regime.stable { "stable" } else { "unstable" }
    );
    let _ = writeln!(
        out,
        "spectral radius = {}",
        fmt_sig12(regime.spectral_radius)
    );
    Ok(out)
}

/// Maximum deviation of one engine from the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub absolute: f64,
    /// `absolute / max(1, max |oracle|)`.
    pub relative: f64,
}

pub fn deviation(engine: &[EconomicState], oracle: &[EconomicState]) -> Deviation {
    let scale = oracle
        .iter()
        .map(|s| s.t.abs().max(s.c.abs()).max(s.i.abs()))
        .fold(1.0, f64::max);
    let absolute = engine
        .iter()
        .zip(oracle)
        .map(|(x, y)| {
            (x.t - y.t)
                .abs()
                .max((x.c - y.c).abs())
                .max((x.i - y.i).abs())
        })
        .fold(0.0, f64::max);
    let absolute = if engine.len() == oracle.len() {
        absolute
    } else {
        f64::INFINITY
    };
    Deviation {
        absolute,
        relative: absolute / scale,
    }
}

/// Largest `|T - C - I - G|` along a trajectory.
pub fn accounting_gap(params: &SamuelsonParams, states: &[EconomicState]) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for (j, s) in states.iter().enumerate() {
        let g = params
            .expenditure_at(j as i64 + samuelson::START_INDEX)
            .map_err(model_err)?;
        worst = worst.max((s.t - s.c - s.i - g).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub pencil: Deviation,
    pub closed_form: Deviation,
    pub consistent: bool,
    pub consistency_residual: f64,
    pub accounting_gap: f64,
    pub q: usize,
    pub q_star: usize,
    pub s1: num_complex::Complex64,
    pub s2: num_complex::Complex64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, name: &str, d: &Deviation| {
            let _ = writeln!(
                out,
                "{name}: max abs deviation {} relative {}",
                fmt_sig12(d.absolute),
                fmt_sig12(d.relative)
            );
        };
        line(&mut out, "pencil", &self.pencil);
        line(&mut out, "closed_form", &self.closed_form);
        let _ = writeln!(
            out,
            "initial state Y2: {} (residual {})",
            if self.consistent {
                "consistent"
            } else {
                "inconsistent"
            },
            fmt_sig12(self.consistency_residual)
        );
        let _ = writeln!(
            out,
            "accounting identity gap = {}",
            fmt_sig12(self.accounting_gap)
        );
        let _ = writeln!(
            out,
            "eigen: s1 = {}, s2 = {}, q = {}, q_star = {}",
            complex_str(self.s1),
            complex_str(self.s2),
            self.q,
            self.q_star
        );
        let _ = writeln!(out, "tolerance = {}", fmt_sig12(self.tolerance));
        let _ = writeln!(out, "result: {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

/// Injected fault for exercising the failure path of `verify`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fault {
    pub engine: Engine,
    pub k: i64,
    pub delta: f64,
}

fn inject(states: &mut [EconomicState], engine: Engine, fault: Option<Fault>) {
    if let Some(f) = fault {
        if f.engine == engine {
            if let Some(s) = states.get_mut((f.k - samuelson::START_INDEX) as usize) {
                s.t += f.delta;
            }
        }
    }
}

/// Runs every engine against the oracle.
pub fn verify(
    cfg: &ScenarioConfig,
    params: &SamuelsonParams,
    fault: Option<Fault>,
) -> Result<VerifyReport, CliError> {
    let oracle = engine_states(cfg, params, Engine::Oracle)?;
    let mut pencil = engine_states(cfg, params, Engine::Pencil)?;
    let mut closed = engine_states(cfg, params, Engine::ClosedForm)?;
    inject(&mut pencil, Engine::Pencil, fault);
    inject(&mut closed, Engine::ClosedForm, fault);

    let system = build_system(params).map_err(model_err)?;
    let wform = weierstrass_decompose(system.pencil()).map_err(model_err)?;
    let t2 = match cfg.t2 {
        Some(t) => t,
        None => natural_t2(params, cfg.t0, cfg.t1).map_err(model_err)?,
    };
    let ic = consistent_initial_state(params, cfg.t0, cfg.t1, t2);
    let consistency = check_consistency(&system, &wform, &ic).map_err(model_err)?;
    let roots = samuelson::roots(params);

    let pencil_dev = deviation(&pencil, &oracle);
    let closed_dev = deviation(&closed, &oracle);
    let gap = accounting_gap(params, &pencil)?;
    let scale = oracle.iter().map(|s| s.t.abs()).fold(1.0, f64::max);
    let pass = pencil_dev.relative <= cfg.tolerance
        && closed_dev.relative <= cfg.tolerance
        && consistency.consistent
        && gap <= 1e-9 * scale;
    Ok(VerifyReport {
        pencil: pencil_dev,
        closed_form: closed_dev,
        consistent: consistency.consistent,
        consistency_residual: consistency.residual,
        accounting_gap: gap,
        q: wform.q(),
        q_star: wform.q_star(),
        s1: roots.s1,
        s2: roots.s2,
        tolerance: cfg.tolerance,
        pass,
    })
}
