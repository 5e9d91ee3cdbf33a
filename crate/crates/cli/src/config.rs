use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use degjc_core::{make_bell, make_esd_mixture, BellState, FieldSpec, QubitBasis, QubitPairState};
use num_complex::Complex64;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Envelope,
    ConcurrenceSweep,
    BetaSweep,
    Esd,
    Separability,
    Validate,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::Envelope => "envelope",
            Scenario::ConcurrenceSweep => "concurrence-sweep",
            Scenario::BetaSweep => "beta-sweep",
            Scenario::Esd => "esd",
            Scenario::Separability => "separability",
            Scenario::Validate => "validate",
        };
        f.write_str(s)
    }
}

/// Two-qubit input: a Bell state or the mixture used for sudden death.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Bell(BellState),
    EsdMixture,
}

impl InitialState {
    pub fn state(&self) -> QubitPairState {
        match self {
            InitialState::Bell(b) => make_bell(*b, QubitBasis::SigmaX),
            InitialState::EsdMixture => make_esd_mixture(),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Bell(b) => b.fmt(f),
            InitialState::EsdMixture => f.write_str("esd-mixture"),
        }
    }
}

impl FromStr for InitialState {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("esd-mixture") {
            return Ok(InitialState::EsdMixture);
        }
        s.parse()
            .map(InitialState::Bell)
            .map_err(|e: degjc_core::Error| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "degjc",
    version,
    about = "Two-qubit entanglement dynamics with degenerate qubits, closed form and truncated-Fock oracle"
)]
pub struct Args {
    pub scenario: Scenario,
    /// Coupling ratio lambda/omega; a comma-separated list runs several.
    #[arg(long)]
    pub beta: Option<String>,
    /// Upper end of the beta grid for beta-sweep.
    #[arg(long)]
    pub beta_max: Option<String>,
    /// Oscillator frequency; adds an absolute-time column.
    #[arg(long)]
    pub omega: Option<String>,
    /// Qubit splitting; nonzero values switch to the oracle.
    #[arg(long)]
    pub omega0: Option<String>,
    /// vacuum | coherent:alpha=RE,IM | number:n=K | thermal:nbar=F (repeatable)
    #[arg(long)]
    pub field: Vec<String>,
    /// phi+ | phi- | psi+ | psi- | esd-mixture
    #[arg(long)]
    pub bell: Option<String>,
    /// End of the omega*t grid.
    #[arg(long)]
    pub omega_t_max: Option<String>,
    /// Number of grid intervals.
    #[arg(long)]
    pub steps: Option<String>,
    /// Starting Fock cutoff for the doubling test.
    #[arg(long)]
    pub ncut: Option<String>,
    /// Fock tail mass allowed outside the cutoff.
    #[arg(long)]
    pub tail_tol: Option<String>,
    /// Also run the truncated-Fock oracle and report the difference.
    #[arg(long)]
    pub compare_oracle: bool,
    /// Pass/fail tolerance.
    #[arg(long)]
    pub tolerance: Option<String>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write a gnuplot script for the CSV.
    #[arg(long)]
    pub plot_script: Option<PathBuf>,
}

/// Unparsed settings gathered from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub beta: Option<String>,
    pub beta_max: Option<String>,
    pub omega: Option<String>,
    pub omega0: Option<String>,
    pub fields: Vec<String>,
    pub bell: Option<String>,
    pub omega_t_max: Option<String>,
    pub steps: Option<String>,
    pub ncut: Option<String>,
    pub tail_tol: Option<String>,
    pub compare_oracle: Option<String>,
    pub tolerance: Option<String>,
    pub out: Option<String>,
    pub plot_script: Option<String>,
}

impl RawConfig {
    /// Parses `key = value` lines. Blank lines and `#` comments are
    /// skipped; `field` may repeat.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim().replace('-', "_");
            let value = Some(value.trim().to_string());
            match key.as_str() {
                "beta" => raw.beta = value,
                "beta_max" => raw.beta_max = value,
                "omega" => raw.omega = value,
                "omega0" => raw.omega0 = value,
                "field" => raw.fields.extend(value),
                "bell" => raw.bell = value,
                "omega_t_max" => raw.omega_t_max = value,
                "steps" => raw.steps = value,
                "ncut" => raw.ncut = value,
                "tail_tol" => raw.tail_tol = value,
                "compare_oracle" => raw.compare_oracle = value,
                "tolerance" => raw.tolerance = value,
                "out" => raw.out = value,
                "plot_script" => raw.plot_script = value,
                other => {
                    return Err(CliError::Config(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )));
                }
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_file(&text)
    }

    pub fn from_args(args: &Args) -> Self {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        RawConfig {
            beta: args.beta.clone(),
            beta_max: args.beta_max.clone(),
            omega: args.omega.clone(),
            omega0: args.omega0.clone(),
            fields: args.field.clone(),
            bell: args.bell.clone(),
            omega_t_max: args.omega_t_max.clone(),
            steps: args.steps.clone(),
            ncut: args.ncut.clone(),
            tail_tol: args.tail_tol.clone(),
            compare_oracle: args.compare_oracle.then(|| "true".to_string()),
            tolerance: args.tolerance.clone(),
            out: path(&args.out),
            plot_script: path(&args.plot_script),
        }
    }

    /// Entries set in `over` replace those in `self`.
    pub fn overridden_by(self, over: RawConfig) -> RawConfig {
        RawConfig {
            beta: over.beta.or(self.beta),
            beta_max: over.beta_max.or(self.beta_max),
            omega: over.omega.or(self.omega),
            omega0: over.omega0.or(self.omega0),
            fields: if over.fields.is_empty() {
                self.fields
            } else {
                over.fields
            },
            bell: over.bell.or(self.bell),
            omega_t_max: over.omega_t_max.or(self.omega_t_max),
            steps: over.steps.or(self.steps),
            ncut: over.ncut.or(self.ncut),
            tail_tol: over.tail_tol.or(self.tail_tol),
            compare_oracle: over.compare_oracle.or(self.compare_oracle),
            tolerance: over.tolerance.or(self.tolerance),
            out: over.out.or(self.out),
            plot_script: over.plot_script.or(self.plot_script),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub betas: Vec<f64>,
    /// Whether `beta` was set explicitly rather than by scenario default.
    pub betas_given: bool,
    pub beta_max: f64,
    pub omega: f64,
    /// Whether `omega` was given, which adds the absolute-time column.
    pub time_column: bool,
    pub omega0: f64,
    pub fields: Vec<FieldSpec>,
    pub initial: InitialState,
    pub omega_t_max: f64,
    pub steps: usize,
    pub ncut: Option<usize>,
    pub tail_tol: f64,
    pub compare_oracle: bool,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    pub plot_script: Option<PathBuf>,
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::Config(format!(
            "{key}: expected true or false, got '{v}'"
        ))),
    }
}

fn parse_field(v: &str) -> Result<FieldSpec> {
    v.parse()
        .map_err(|e: degjc_core::Error| CliError::Config(e.to_string()))
}

/// The field grid of the acceptance check.
pub fn acceptance_fields() -> Vec<FieldSpec> {
    vec![
        FieldSpec::Vacuum,
        FieldSpec::Coherent(Complex64::new(1.0, 0.5)),
        FieldSpec::Number(1),
        FieldSpec::Number(5),
        FieldSpec::Thermal(1.0),
        FieldSpec::Thermal(2.0),
    ]
}

impl ScenarioConfig {
    /// Applies scenario defaults to `raw` and checks the result.
    pub fn resolve(scenario: Scenario, raw: &RawConfig) -> Result<Self> {
        let betas = match &raw.beta {
            Some(list) => list
                .split(',')
                .map(|b| parse_num::<f64>("beta", b))
                .collect::<Result<Vec<_>>>()?,
            None => match scenario {
                Scenario::Envelope => vec![0.75, 0.1],
                Scenario::Separability => vec![0.3, 0.75],
                Scenario::Validate => vec![0.1, 0.5],
                Scenario::Esd => vec![0.1],
                _ => vec![0.5],
            },
        };
        let fields = if raw.fields.is_empty() {
            match scenario {
                Scenario::BetaSweep => vec![
                    FieldSpec::Coherent(Complex64::new(0.0, 0.0)),
                    FieldSpec::Number(1),
                    FieldSpec::Thermal(1.0),
                ],
                Scenario::Esd => vec![FieldSpec::Thermal(25.0)],
                Scenario::Separability => vec![FieldSpec::Vacuum, FieldSpec::Number(1)],
                Scenario::Validate => acceptance_fields(),
                _ => vec![FieldSpec::Vacuum],
            }
        } else {
            raw.fields
                .iter()
                .map(|f| parse_field(f))
                .collect::<Result<Vec<_>>>()?
        };
        let initial = match &raw.bell {
            Some(b) => b.parse()?,
            None if scenario == Scenario::Esd => InitialState::EsdMixture,
            None => InitialState::Bell(BellState::PhiPlus),
        };
        let default_max = if scenario == Scenario::Envelope {
            4.0 * PI
        } else {
            2.0 * PI
        };
        let cfg = ScenarioConfig {
            scenario,
            betas,
            betas_given: raw.beta.is_some(),
            beta_max: raw
                .beta_max
                .as_deref()
                .map(|v| parse_num("beta_max", v))
                .transpose()?
                .unwrap_or(1.0),
            omega: raw
                .omega
                .as_deref()
                .map(|v| parse_num("omega", v))
                .transpose()?
                .unwrap_or(1.0),
            time_column: raw.omega.is_some(),
            omega0: raw
                .omega0
                .as_deref()
                .map(|v| parse_num("omega0", v))
                .transpose()?
                .unwrap_or(0.0),
            fields,
            initial,
            omega_t_max: raw
                .omega_t_max
                .as_deref()
                .map(|v| parse_num("omega_t_max", v))
                .transpose()?
                .unwrap_or(default_max),
            steps: raw
                .steps
                .as_deref()
                .map(|v| parse_num("steps", v))
                .transpose()?
                .unwrap_or(64),
            ncut: raw
                .ncut
                .as_deref()
                .map(|v| parse_num("ncut", v))
                .transpose()?,
            tail_tol: raw
                .tail_tol
                .as_deref()
                .map(|v| parse_num("tail_tol", v))
                .transpose()?
                .unwrap_or(degjc_core::oracle::DEFAULT_TAIL_TOL),
            compare_oracle: raw
                .compare_oracle
                .as_deref()
                .map(|v| parse_bool("compare_oracle", v))
                .transpose()?
                .unwrap_or(false),
            tolerance: raw
                .tolerance
                .as_deref()
                .map(|v| parse_num("tolerance", v))
                .transpose()?
                .unwrap_or(1e-7),
            out: raw.out.as_ref().map(PathBuf::from),
            plot_script: raw.plot_script.as_ref().map(PathBuf::from),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.steps < 2 {
            return bad(format!("steps must be >= 2, got {}", self.steps));
        }
        if !(self.omega_t_max > 0.0 && self.omega_t_max.is_finite()) {
            return bad(format!("omega_t_max must be > 0, got {}", self.omega_t_max));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad(format!("tolerance must be > 0, got {}", self.tolerance));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return bad(format!(
                "tail_tol must lie in (0, 1), got {}",
                self.tail_tol
            ));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be > 0, got {}", self.omega));
        }
        if !(self.omega0 >= 0.0 && self.omega0.is_finite()) {
            return bad(format!("omega0 must be >= 0, got {}", self.omega0));
        }
        if !(self.beta_max > 0.0 && self.beta_max.is_finite()) {
            return bad(format!("beta_max must be > 0, got {}", self.beta_max));
        }
        if let Some(b) = self.betas.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return bad(format!("beta must be finite and >= 0, got {b}"));
        }
        if self.ncut == Some(0) {
            return bad("ncut must be >= 1".into());
        }
        Ok(())
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("scenario".to_string(), self.scenario.to_string()),
            (
                "beta".into(),
                self.betas
                    .iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("beta_max".into(), self.beta_max.to_string()),
            ("omega".into(), self.omega.to_string()),
            ("omega0".into(), self.omega0.to_string()),
        ];
        for f in &self.fields {
            v.push(("field".into(), f.to_string()));
        }
        v.extend([
            ("bell".into(), self.initial.to_string()),
            ("omega_t_max".into(), self.omega_t_max.to_string()),
            ("steps".into(), self.steps.to_string()),
            (
                "ncut".into(),
                self.ncut.map_or("auto".into(), |n| n.to_string()),
            ),
            ("tail_tol".into(), self.tail_tol.to_string()),
            ("compare_oracle".into(), self.compare_oracle.to_string()),
            ("tolerance".into(), self.tolerance.to_string()),
        ]);
        v
    }

    /// `steps + 1` phases on `[0, omega_t_max]`.
    pub fn grid(&self) -> Vec<f64> {
        degjc_core::DynamicsTrace::grid(self.omega_t_max, self.steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file =
            RawConfig::parse_file("beta = 0.2\nsteps=10\n# note\nfield=number:n=3\n").unwrap();
        let flags = RawConfig {
            beta: Some("0.4".into()),
            ..Default::default()
        };
        let raw = file.overridden_by(flags);
        let cfg = ScenarioConfig::resolve(Scenario::ConcurrenceSweep, &raw).unwrap();
        assert_eq!(cfg.betas, vec![0.4]);
        assert_eq!(cfg.steps, 10);
        assert_eq!(cfg.fields, vec![FieldSpec::Number(3)]);
    }

    #[test]
    fn invariants_are_checked() {
        let raw = RawConfig {
            steps: Some("1".into()),
            ..Default::default()
        };
        assert!(ScenarioConfig::resolve(Scenario::Envelope, &raw).is_err());
        let raw = RawConfig {
            tolerance: Some("0".into()),
            ..Default::default()
        };
        assert!(ScenarioConfig::resolve(Scenario::Envelope, &raw).is_err());
        assert!(RawConfig::parse_file("nonsense").is_err());
        assert!(RawConfig::parse_file("colour = red").is_err());
    }

    #[test]
    fn defaults_follow_scenario() {
        let cfg = ScenarioConfig::resolve(Scenario::Envelope, &RawConfig::default()).unwrap();
        assert_eq!(cfg.betas, vec![0.75, 0.1]);
        assert_eq!(cfg.omega_t_max, 4.0 * PI);
        let cfg = ScenarioConfig::resolve(Scenario::Esd, &RawConfig::default()).unwrap();
        assert_eq!(cfg.initial, InitialState::EsdMixture);
    }

    #[test]
    fn echo_round_trips() {
        let raw = RawConfig {
            beta: Some("0.1,0.5".into()),
            fields: vec!["coherent:alpha=1,0.5".into(), "thermal:nbar=2".into()],
            bell: Some("psi-".into()),
            ..Default::default()
        };
        let cfg = ScenarioConfig::resolve(Scenario::ConcurrenceSweep, &raw).unwrap();
        let text: String = cfg
            .echo()
            .into_iter()
            .filter(|(k, v)| k != "scenario" && !(k == "ncut" && v == "auto"))
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let again = ScenarioConfig::resolve(
            Scenario::ConcurrenceSweep,
            &RawConfig::parse_file(&text).unwrap(),
        )
        .unwrap();
        assert_eq!(again.betas, cfg.betas);
        assert_eq!(again.fields, cfg.fields);
        assert_eq!(again.initial, cfg.initial);
    }
}
