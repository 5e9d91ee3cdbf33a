use std::f64::consts::PI;

use degjc_core::closedform::{
    concurrence_at_half_period, concurrence_closed, esd_concurrence_closed, esd_interval,
    modulation_factor,
};
use degjc_core::oracle::{
    build_hamiltonian, converge, converged_concurrence_trace, evolve_four_party, field_ensemble,
    TruncationSpec,
};
use degjc_core::{BellState, DynamicsTrace, FieldSpec, ModelParams, TracePoint};
use rayon::prelude::*;

use crate::config::{InitialState, Scenario, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::table::{format_float, Cell, Table};

/// Largest change between cutoffs `ncut` and `2·ncut` accepted by the
/// doubling test.
pub const DOUBLING_TOL: f64 = 1e-9;

pub const TRUNCATION_NOTE: &str =
    "the Fock cutoff starts at ceil((|alpha0| + 2 beta + 3 sqrt(nbar) + sqrt(N))^2) + 20 \
(raised to cover the tail tolerance) and is accepted only when results at ncut and 2 ncut agree; \
this policy belongs to this tool, the closed forms need no truncation";

/// Result of a scenario: the table to write and, if a tolerance was
/// breached, why.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub failure: Option<String>,
}

impl RunOutput {
    fn ok(table: Table) -> Self {
        Self {
            table,
            failure: None,
        }
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    match cfg.scenario {
        Scenario::Envelope => run_envelope(cfg).map(RunOutput::ok),
        Scenario::ConcurrenceSweep => run_concurrence_sweep(cfg),
        Scenario::BetaSweep => run_beta_sweep(cfg).map(RunOutput::ok),
        Scenario::Esd => run_esd(cfg),
        Scenario::Separability => run_separability(cfg),
        Scenario::Validate => crate::validate::run_validate(cfg),
    }
}

fn base_table(cfg: &ScenarioConfig, header: Vec<&str>) -> Table {
    let mut t = Table::new(header);
    t.meta("generator", format!("degjc {}", env!("CARGO_PKG_VERSION")));
    for (k, v) in cfg.echo() {
        t.meta(format!("config.{k}"), v);
    }
    t
}

fn params(cfg: &ScenarioConfig, beta: f64) -> Result<ModelParams> {
    Ok(ModelParams::from_beta(cfg.omega, cfg.omega0, beta)?)
}

fn require_degenerate(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.omega0 != 0.0 {
        return Err(CliError::Config(format!(
            "{} uses closed forms only, which need omega0 = 0 (got {})",
            cfg.scenario, cfg.omega0
        )));
    }
    Ok(())
}

/// Columns `omega_t` and, when `omega` was given, `t`.
fn time_header(cfg: &ScenarioConfig) -> Vec<&'static str> {
    if cfg.time_column {
        vec!["omega_t", "t"]
    } else {
        vec!["omega_t"]
    }
}

fn time_cells(cfg: &ScenarioConfig, omega_t: f64) -> Vec<Cell> {
    let mut v = vec![Cell::Float(omega_t)];
    if cfg.time_column {
        v.push(Cell::Float(omega_t / cfg.omega));
    }
    v
}

pub fn run_envelope(cfg: &ScenarioConfig) -> Result<Table> {
    require_degenerate(cfg)?;
    let mut header = vec!["beta"];
    header.extend(time_header(cfg));
    header.push("envelope");
    let mut t = base_table(cfg, header);
    for &beta in &cfg.betas {
        for wt in cfg.grid() {
            let mut row = vec![Cell::Float(beta)];
            row.extend(time_cells(cfg, wt));
            row.push(Cell::Float(modulation_factor(beta, wt)));
            t.push(row);
        }
    }
    Ok(t)
}

/// Converged oracle concurrence trace with its truncation diagnostics.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub values: Vec<f64>,
    pub ncut: usize,
    pub tail_mass: f64,
    pub max_change: f64,
}

pub fn start_truncation(cfg: &ScenarioConfig, field: FieldSpec, beta: f64) -> TruncationSpec {
    match cfg.ncut {
        Some(ncut) => TruncationSpec {
            ncut,
            tail_tol: cfg.tail_tol,
        },
        None => TruncationSpec::heuristic_with_tol(field, beta, cfg.tail_tol),
    }
}

pub fn oracle_concurrence(
    cfg: &ScenarioConfig,
    params: &ModelParams,
    field: FieldSpec,
    initial: InitialState,
    omega_ts: &[f64],
) -> Result<OracleRun> {
    let start = start_truncation(cfg, field, params.beta());
    let conv = converged_concurrence_trace(
        params,
        field,
        &initial.state(),
        Some(start),
        DOUBLING_TOL,
        omega_ts,
    )?;
    let tail_mass = field_ensemble(field, &conv.trunc)?.tail_mass;
    Ok(OracleRun {
        values: conv.value,
        ncut: conv.trunc.ncut,
        tail_mass,
        max_change: conv.max_change,
    })
}

fn oracle_meta(t: &mut Table, label: &str, run: &OracleRun) {
    t.meta(
        format!("oracle[{label}]"),
        format!(
            "ncut={} tail_mass={} doubling_change={}",
            run.ncut,
            format_float(run.tail_mass),
            format_float(run.max_change)
        ),
    );
}

fn closed_concurrence(initial: InitialState, field: FieldSpec, beta: f64, wt: f64) -> Result<f64> {
    match initial {
        InitialState::Bell(b) => Ok(concurrence_closed(b, field, beta, wt)?),
        InitialState::EsdMixture => match field {
            FieldSpec::Thermal(nbar) => Ok(esd_concurrence_closed(beta, nbar, wt)?),
            FieldSpec::Vacuum => Ok(esd_concurrence_closed(beta, 0.0, wt)?),
            other => Err(CliError::Config(format!(
                "the ESD mixture has a closed form only for thermal or vacuum fields, got {other}"
            ))),
        },
    }
}

pub fn run_concurrence_sweep(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let closed = cfg.omega0 == 0.0;
    let oracle = cfg.compare_oracle || !closed;
    let mut header = vec!["beta", "field"];
    header.extend(time_header(cfg));
    if closed {
        header.push("concurrence");
    }
    if oracle {
        header.push("oracle_concurrence");
    }
    if closed && oracle {
        header.push("abs_error");
    }
    let mut t = base_table(cfg, header);
    if oracle {
        t.meta("truncation_policy", TRUNCATION_NOTE);
    }
    if !closed {
        t.meta("note", "omega0 != 0: oracle only, no closed form exists");
    }
    let grid = cfg.grid();
    let mut worst: f64 = 0.0;
    for &beta in &cfg.betas {
        let p = params(cfg, beta)?;
        for &field in &cfg.fields {
            let run = if oracle {
                let r = oracle_concurrence(cfg, &p, field, cfg.initial, &grid)?;
                oracle_meta(&mut t, &format!("beta={beta},field={field}"), &r);
                Some(r)
            } else {
                None
            };
            let mut trace = DynamicsTrace::default();
            for (i, &wt) in grid.iter().enumerate() {
                trace.points.push(TracePoint {
                    omega_t: wt,
                    concurrence: if closed {
                        closed_concurrence(cfg.initial, field, beta, wt)?
                    } else {
                        f64::NAN
                    },
                    oracle_concurrence: run.as_ref().map(|r| r.values[i]),
                    ..Default::default()
                });
            }
            for pt in &trace.points {
                let mut row = vec![Cell::Float(beta), Cell::Text(field.to_string())];
                row.extend(time_cells(cfg, pt.omega_t));
                if closed {
                    row.push(Cell::Float(pt.concurrence));
                }
                if let Some(o) = pt.oracle_concurrence {
                    row.push(Cell::Float(o));
                }
                if closed {
                    if let Some(e) = pt.abs_error() {
                        row.push(Cell::Float(e));
                    }
                }
                t.push(row);
            }
            if closed {
                if let Some(e) = trace.max_abs_error() {
                    worst = worst.max(e);
                }
            }
        }
    }
    let mut failure = None;
    if closed && oracle {
        t.meta("max_abs_error", format_float(worst));
        if worst.is_nan() || worst > cfg.tolerance {
            failure = Some(format!(
                "oracle and closed form differ by {} > tolerance {}",
                format_float(worst),
                cfg.tolerance
            ));
        }
    }
    Ok(RunOutput { table: t, failure })
}

pub fn run_beta_sweep(cfg: &ScenarioConfig) -> Result<Table> {
    require_degenerate(cfg)?;
    let betas: Vec<f64> = if cfg.betas_given {
        cfg.betas.clone()
    } else {
        (0..=cfg.steps)
            .map(|i| cfg.beta_max * i as f64 / cfg.steps as f64)
            .collect()
    };
    let mut t = base_table(cfg, vec!["field", "beta", "concurrence_half_period"]);
    t.meta("omega_t", format_float(PI));
    for &field in &cfg.fields {
        for &beta in &betas {
            t.push(vec![
                Cell::Text(field.to_string()),
                Cell::Float(beta),
                Cell::Float(concurrence_at_half_period(field, beta)?),
            ]);
        }
    }
    Ok(t)
}

/// First and last grid phases at which `values` is exactly zero.
fn zero_span(grid: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let first = values.iter().position(|&v| v == 0.0)?;
    let last = values.iter().rposition(|&v| v == 0.0)?;
    Some((grid[first], grid[last]))
}

pub fn run_esd(cfg: &ScenarioConfig) -> Result<RunOutput> {
    require_degenerate(cfg)?;
    if cfg.initial != InitialState::EsdMixture {
        return Err(CliError::Config(format!(
            "esd runs the ESD mixture, got bell = {}",
            cfg.initial
        )));
    }
    let mut header = vec!["beta", "nbar"];
    header.extend(time_header(cfg));
    header.extend(["concurrence", "oracle_concurrence", "abs_error"]);
    let mut t = base_table(cfg, header);
    t.meta("truncation_policy", TRUNCATION_NOTE);
    let grid = cfg.grid();
    let mut worst: f64 = 0.0;
    for &beta in &cfg.betas {
        let p = params(cfg, beta)?;
        for &field in &cfg.fields {
            let nbar = match field {
                FieldSpec::Thermal(nbar) => nbar,
                FieldSpec::Vacuum => 0.0,
                other => {
                    return Err(CliError::Config(format!(
                        "esd needs a thermal field, got {other}"
                    )));
                }
            };
            let label = format!("beta={beta},nbar={nbar}");
            match esd_interval(beta, nbar)? {
                Some((a, b)) => t.meta(
                    format!("esd_interval[{label}]"),
                    format!("{} {}", format_float(a), format_float(b)),
                ),
                None => t.meta(format!("esd_interval[{label}]"), "none"),
            }
            let closed: Vec<f64> = grid
                .iter()
                .map(|&wt| esd_concurrence_closed(beta, nbar, wt))
                .collect::<std::result::Result<_, _>>()?;
            let run = oracle_concurrence(cfg, &p, field, cfg.initial, &grid)?;
            oracle_meta(&mut t, &label, &run);
            let span = match zero_span(&grid, &closed) {
                Some((a, b)) => format!("{} {}", format_float(a), format_float(b)),
                None => "none".into(),
            };
            t.meta(format!("zero_span_on_grid[{label}]"), span);
            for (i, &wt) in grid.iter().enumerate() {
                let err = (run.values[i] - closed[i]).abs();
                worst = worst.max(err);
                let mut row = vec![Cell::Float(beta), Cell::Float(nbar)];
                row.extend(time_cells(cfg, wt));
                row.extend([
                    Cell::Float(closed[i]),
                    Cell::Float(run.values[i]),
                    Cell::Float(err),
                ]);
                t.push(row);
            }
        }
    }
    t.meta("max_abs_error", format_float(worst));
    let failure = (worst.is_nan() || worst > cfg.tolerance).then(|| {
        format!(
            "ESD oracle and closed form differ by {} > tolerance {}",
            format_float(worst),
            cfg.tolerance
        )
    });
    Ok(RunOutput { table: t, failure })
}

/// Per-time separability observables: negativity of the two fields and the
/// purities of one qubit, one field and both qubits.
pub fn separability_trace(
    params: &ModelParams,
    bell: BellState,
    field: FieldSpec,
    trunc: &TruncationSpec,
    omega_ts: &[f64],
) -> degjc_core::Result<Vec<[f64; 4]>> {
    let prop = build_hamiltonian(params, trunc)?;
    omega_ts
        .par_iter()
        .map(|&wt| {
            let s = evolve_four_party(&prop, bell, field, trunc, wt)?;
            Ok([
                s.field_pair().negativity()?,
                s.qubit_a_purity(),
                s.field_a_purity(),
                s.qubit_pair_purity(),
            ])
        })
        .collect()
}

pub fn run_separability(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let InitialState::Bell(bell) = cfg.initial else {
        return Err(CliError::Config(
            "separability needs a pure Bell input".into(),
        ));
    };
    let mut header = vec!["beta", "field"];
    header.extend(time_header(cfg));
    header.extend([
        "field_negativity",
        "qubit_purity",
        "field_purity",
        "qubit_pair_purity",
    ]);
    let mut t = base_table(cfg, header);
    t.meta("truncation_policy", TRUNCATION_NOTE);
    let grid = cfg.grid();
    let mut worst: f64 = 0.0;
    for &beta in &cfg.betas {
        let p = params(cfg, beta)?;
        for &field in &cfg.fields {
            if !field.is_pure() {
                return Err(CliError::Config(format!(
                    "separability needs a pure field, got {field}"
                )));
            }
            let start = start_truncation(cfg, field, beta);
            let conv = converge(start, DOUBLING_TOL, 3, |tr| {
                Ok(separability_trace(&p, bell, field, tr, &grid)?
                    .into_iter()
                    .flatten()
                    .collect::<Vec<f64>>())
            })?;
            let tail_mass = field_ensemble(field, &conv.trunc)?.tail_mass;
            oracle_meta(
                &mut t,
                &format!("beta={beta},field={field}"),
                &OracleRun {
                    values: Vec::new(),
                    ncut: conv.trunc.ncut,
                    tail_mass,
                    max_change: conv.max_change,
                },
            );
            for (i, &wt) in grid.iter().enumerate() {
                let v = &conv.value[4 * i..4 * i + 4];
                worst = worst.max(v[0]);
                let mut row = vec![Cell::Float(beta), Cell::Text(field.to_string())];
                row.extend(time_cells(cfg, wt));
                row.extend(v.iter().map(|&x| Cell::Float(x)));
                t.push(row);
            }
        }
    }
    t.meta("max_field_negativity", format_float(worst));
    let failure = (worst.is_nan() || worst > cfg.tolerance).then(|| {
        format!(
            "field-field negativity {} exceeds tolerance {}",
            format_float(worst),
            cfg.tolerance
        )
    });
    Ok(RunOutput { table: t, failure })
}

/// Gnuplot commands plotting the first value column of `table` against
/// its phase or coupling column.
pub fn plot_script(table: &Table, csv_path: &str) -> String {
    let x = table
        .column("omega_t")
        .or_else(|| table.column("beta"))
        .unwrap_or(0);
    let y = table
        .header
        .iter()
        .position(|h| {
            !matches!(
                h.as_str(),
                "beta" | "field" | "omega_t" | "t" | "nbar" | "check"
            )
        })
        .unwrap_or(table.header.len() - 1);
    format!(
        "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n\
         set xlabel '{}'\nset ylabel '{}'\nplot '{}' using {}:{} with lines\n",
        table.header[x],
        table.header[y],
        csv_path.replace('\'', "''"),
        x + 1,
        y + 1
    )
}
