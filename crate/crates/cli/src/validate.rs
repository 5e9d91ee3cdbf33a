use std::f64::consts::PI;

use degjc_core::closedform::{
    appendix_a_propagate, concurrence_closed, esd_concurrence_closed, esd_interval,
    modulation_factor,
};
use degjc_core::entanglement::negativity;
use degjc_core::oracle::{build_hamiltonian, propagate_state, SubsystemState, TruncationSpec};
use degjc_core::specialfn::coherent_fock_amplitudes;
use degjc_core::{make_bell, BellState, FieldSpec, ModelParams, QubitBasis, Spin};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{InitialState, ScenarioConfig};
use crate::error::Result;
use crate::scenarios::{oracle_concurrence, separability_trace, start_truncation, RunOutput};
use crate::table::{format_float, Cell, Table};

/// One row of the validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_error,
            tolerance,
        }
    }

    pub fn pass(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// `n` evenly spaced points on `[0, 2π]`, both ends included.
fn period_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 2.0 * PI * i as f64 / (n - 1) as f64)
        .collect()
}

fn envelope_checks(tol: impl Fn(f64) -> f64) -> Vec<Check> {
    let mut out = Vec::new();
    for (beta, expected) in [(0.75, (-4.5f64).exp()), (0.1, (-0.08f64).exp())] {
        let err = (modulation_factor(beta, PI) - expected).abs();
        out.push(Check::new(
            format!("envelope_minimum[beta={beta}]"),
            err,
            tol(1e-12),
        ));
        let period = (0..1000)
            .map(|i| {
                let wt = 4.0 * PI * i as f64 / 1000.0;
                (modulation_factor(beta, wt) - modulation_factor(beta, wt + 2.0 * PI)).abs()
            })
            .fold(0.0, f64::max);
        out.push(Check::new(
            format!("envelope_period[beta={beta}]"),
            period,
            tol(1e-12),
        ));
    }
    out
}

fn oracle_grid_checks(
    cfg: &ScenarioConfig,
    tol: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<Vec<Check>> {
    let bell = match cfg.initial {
        InitialState::Bell(b) => b,
        InitialState::EsdMixture => BellState::PhiPlus,
    };
    let grid = period_grid(64);
    let cases: Vec<(f64, FieldSpec)> = cfg
        .betas
        .iter()
        .flat_map(|&b| cfg.fields.iter().map(move |&f| (b, f)))
        .collect();
    let per_case: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|&(beta, field)| -> Result<Vec<Check>> {
            let p = ModelParams::from_beta(cfg.omega, 0.0, beta)?;
            let run = oracle_concurrence(cfg, &p, field, InitialState::Bell(bell), &grid)?;
            let mut err: f64 = 0.0;
            for (&wt, &o) in grid.iter().zip(&run.values) {
                err = err.max((o - concurrence_closed(bell, field, beta, wt)?).abs());
            }
            let revival = (run.values[grid.len() - 1] - 1.0).abs();
            let label = format!("beta={beta},field={field},ncut={}", run.ncut);
            Ok(vec![
                Check::new(format!("oracle_vs_closed[{label}]"), err, tol(1e-7)),
                Check::new(format!("oracle_revival[{label}]"), revival, tol(1e-7)),
                Check::new(
                    format!("closed_revival[beta={beta},field={field}]"),
                    (concurrence_closed(bell, field, beta, 2.0 * PI)? - 1.0).abs(),
                    tol(1e-12),
                ),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

/// Deterministic (α, β, ωt) triples spread over the tested range.
fn appendix_a_points() -> Vec<(Complex64, f64, f64)> {
    let golden = 0.618_033_988_749_894_9;
    (0..16)
        .map(|k| {
            let u = |m: f64| ((k as f64 + 1.0) * golden * m).fract();
            (
                Complex64::new(3.0 * u(1.0) - 1.5, 3.0 * u(2.0) - 1.5),
                0.8 * u(3.0),
                2.0 * PI * u(5.0),
            )
        })
        .collect()
}

fn appendix_a_check(tol: impl Fn(f64) -> f64) -> Result<Check> {
    let ncut = 70;
    let trunc = TruncationSpec::new(ncut)?;
    let mut worst: f64 = 0.0;
    for (alpha, beta, wt) in appendix_a_points() {
        let prop = build_hamiltonian(&ModelParams::degenerate(beta)?, &trunc)?;
        for spin in Spin::BOTH {
            let (f, _) = coherent_fock_amplitudes(alpha, ncut);
            let out = propagate_state(&prop, &SubsystemState::product(spin, &f), wt)?;
            let an = appendix_a_propagate(alpha, spin, beta, wt);
            let phase = an.phase * Complex64::from_polar(1.0, beta * beta * wt);
            let (g, _) = coherent_fock_amplitudes(an.amplitude, ncut);
            let (SubsystemState::Vector(out), SubsystemState::Vector(target)) =
                (out, SubsystemState::product(spin, &g))
            else {
                unreachable!("vector states propagate to vectors")
            };
            let overlap = (target * phase).dotc(&out);
            worst = worst
                .max((overlap - 1.0).norm())
                .max(1.0 - overlap.norm_sqr());
        }
    }
    Ok(Check::new("appendix_a_overlap", worst, tol(1e-8)))
}

fn spectrum_check(tol: impl Fn(f64) -> f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for beta in [0.25, 0.5, 1.0] {
        let p = build_hamiltonian(&ModelParams::degenerate(beta)?, &TruncationSpec::new(40)?)?;
        let low = p.low_spectrum(10);
        for (k, e) in low.iter().enumerate() {
            worst = worst.max((e - low[0] - (k / 2) as f64).abs());
        }
    }
    Ok(Check::new("ladder_spectrum[ncut=40]", worst, tol(1e-8)))
}

fn esd_checks(cfg: &ScenarioConfig, tol: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Vec<Check>> {
    let grid = period_grid(64);
    let points = [(0.1, 25.0), (0.1, 2.0), (0.5, 2.0), (0.25, 1.0)];
    let per: Vec<Vec<Check>> = points
        .par_iter()
        .map(|&(beta, nbar)| -> Result<Vec<Check>> {
            let p = ModelParams::from_beta(cfg.omega, 0.0, beta)?;
            let field = FieldSpec::Thermal(nbar);
            let run = oracle_concurrence(cfg, &p, field, InitialState::EsdMixture, &grid)?;
            let mut err: f64 = 0.0;
            for (&wt, &o) in grid.iter().zip(&run.values) {
                err = err.max((o - esd_concurrence_closed(beta, nbar, wt)?).abs());
            }
            let predicted = 16.0 * (1.0 + 2.0 * nbar) * beta * beta >= 3f64.ln();
            let oracle_dies = run.values.iter().any(|&c| c <= 1e-9);
            let consistent =
                predicted == esd_interval(beta, nbar)?.is_some() && predicted == oracle_dies;
            Ok(vec![
                Check::new(
                    format!(
                        "esd_oracle_vs_closed[beta={beta},nbar={nbar},ncut={}]",
                        run.ncut
                    ),
                    err,
                    tol(1e-7),
                ),
                Check::new(
                    format!("esd_threshold[beta={beta},nbar={nbar}]"),
                    if consistent { 0.0 } else { 1.0 },
                    0.0,
                ),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

fn separability_checks(
    cfg: &ScenarioConfig,
    tol: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<Vec<Check>> {
    let grid = period_grid(33);
    let mut out = Vec::new();
    for beta in [0.3, 0.75] {
        let p = ModelParams::from_beta(cfg.omega, 0.0, beta)?;
        for field in [FieldSpec::Vacuum, FieldSpec::Number(1)] {
            let trunc = start_truncation(cfg, field, beta);
            let v = separability_trace(&p, BellState::PhiPlus, field, &trunc, &grid)?;
            let worst = v.iter().map(|r| r[0]).fold(0.0, f64::max);
            out.push(Check::new(
                format!("field_negativity[beta={beta},field={field}]"),
                worst,
                tol(1e-9),
            ));
        }
    }
    let bell = make_bell(BellState::PhiPlus, QubitBasis::SigmaZ);
    let dense = DMatrix::from_fn(4, 4, |i, j| bell.rho()[(i, j)]);
    out.push(Check::new(
        "bell_negativity_control",
        (negativity(&dense, (2, 2))? - 0.5).abs(),
        tol(1e-12),
    ));
    Ok(out)
}

/// Runs every closed-form and oracle check and reports one row per check.
///
/// A check's tolerance is its nominal value, or the configured tolerance
/// when that is tighter.
pub fn run_validate(cfg: &ScenarioConfig) -> Result<RunOutput> {
    if cfg.omega0 != 0.0 {
        return Err(crate::error::CliError::Config(
            "validate compares closed forms and needs omega0 = 0".into(),
        ));
    }
    let user = cfg.tolerance;
    let tol = move |nominal: f64| nominal.min(user);
    let mut checks = envelope_checks(tol);
    checks.extend(oracle_grid_checks(cfg, &tol)?);
    checks.push(appendix_a_check(tol)?);
    checks.push(spectrum_check(tol)?);
    checks.extend(esd_checks(cfg, &tol)?);
    checks.extend(separability_checks(cfg, &tol)?);

    let mut t = Table::new(["check", "max_error", "tolerance", "pass"]);
    t.meta("generator", format!("degjc {}", env!("CARGO_PKG_VERSION")));
    for (k, v) in cfg.echo() {
        t.meta(format!("config.{k}"), v);
    }
    t.meta("truncation_policy", crate::scenarios::TRUNCATION_NOTE);
    for c in &checks {
        t.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Float(c.max_error),
            Cell::Float(c.tolerance),
            Cell::Bool(c.pass()),
        ]);
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass()).collect();
    t.meta("checks", checks.len());
    t.meta("failed", failed.len());
    let failure = (!failed.is_empty()).then(|| {
        failed
            .iter()
            .map(|c| {
                format!(
                    "{} ({} > {})",
                    c.name,
                    format_float(c.max_error),
                    format_float(c.tolerance)
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    });
    Ok(RunOutput { table: t, failure })
}
