//! Truncated-Fock-space propagation of the full Hamiltonian, used to check
//! every closed form numerically.

mod convergence;
mod fields;
mod fourparty;
mod maps;
mod propagator;

use rayon::prelude::*;

use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::model::{FieldSpec, ModelParams, QubitPairState};
use crate::specialfn::thermal_cutoff;

pub use convergence::{converge, Converged, Distance};
pub use fields::{field_ensemble, pure_field_vector, FieldEnsemble};
pub use fourparty::{evolve_four_party, field_field_reduced, FieldPairState, FourPartyState};
pub use maps::{
    conditional_maps, two_qubit_reduced, ConditionalMapper, MapStrategy, SubsystemConditionalMap,
};
pub use propagator::{
    build_hamiltonian, hamiltonian_matrix, propagate_state, subsystem_index, PreparedInputs,
    SubsystemPropagator, SubsystemState,
};

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Fock cutoff (states `0..=ncut`) and the largest probability mass allowed
/// outside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub ncut: usize,
    pub tail_tol: f64,
}

/// Smallest `n` with `Σ_{k>n} Poisson(mean, k) ≤ tol`.
fn poisson_cutoff(mean: f64, tol: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let mut log_term = -mean;
    let mut cdf = log_term.exp();
    let mut n = 0usize;
    // Past the mode the tail is bounded by a geometric series of the next term.
    loop {
        let next_log = log_term + mean.ln() - ((n + 1) as f64).ln();
        let ratio = mean / (n + 2) as f64;
        if (n as f64) > mean && next_log.exp() / (1.0 - ratio) <= tol {
            return n;
        }
        if (1.0 - cdf) <= tol * 1e-3 && (n as f64) > mean {
            return n;
        }
        n += 1;
        log_term = next_log;
        cdf += log_term.exp();
    }
}

impl TruncationSpec {
    pub fn new(ncut: usize) -> Result<Self> {
        if ncut < 1 {
            return Err(Error::InvalidParameter("ncut must be >= 1".into()));
        }
        Ok(Self {
            ncut,
            tail_tol: DEFAULT_TAIL_TOL,
        })
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_tol must lie in (0, 1), got {tail_tol}"
            )));
        }
        self.tail_tol = tail_tol;
        Ok(self)
    }

    pub fn doubled(&self) -> Self {
        Self {
            ncut: 2 * self.ncut,
            tail_tol: self.tail_tol,
        }
    }

    /// Starting cutoff for the doubling test:
    /// `ceil((|α₀| + 2β + 3√n̄ + √N)²) + 20`, raised where needed so that the
    /// initial field and its displacement by up to `2β` fit under `tail_tol`.
    pub fn heuristic(field: FieldSpec, beta: f64) -> Self {
        Self::heuristic_with_tol(field, beta, DEFAULT_TAIL_TOL)
    }

    pub fn heuristic_with_tol(field: FieldSpec, beta: f64, tail_tol: f64) -> Self {
        let beta = beta.abs();
        let (alpha, nbar, n) = match field {
            FieldSpec::Vacuum => (0.0, 0.0, 0.0),
            FieldSpec::Coherent(a) => (a.norm(), 0.0, 0.0),
            FieldSpec::Number(n) => (0.0, 0.0, n as f64),
            FieldSpec::Thermal(nbar) => (0.0, nbar.max(0.0), 0.0),
        };
        let base = (alpha + 2.0 * beta + 3.0 * nbar.sqrt() + n.sqrt())
            .powi(2)
            .ceil() as usize
            + 20;
        let displaced = poisson_cutoff((alpha + 2.0 * beta).powi(2), tail_tol * 1e-2) + 10;
        // Displacing level n by 2β spreads it over about ±2β√n levels.
        let thermal = match field {
            FieldSpec::Thermal(nbar) => {
                let top = thermal_cutoff(nbar, tail_tol) as f64;
                let d = 2.0 * beta;
                (top + 6.0 * d * top.sqrt() + 4.0 * d * d).ceil() as usize + 10
            }
            _ => 0,
        };
        Self {
            ncut: base.max(displaced).max(thermal).max(1),
            tail_tol,
        }
    }
}

/// Reduced two-qubit states on a time grid, both subsystems starting in
/// `field`.
pub fn qubit_pair_trace(
    prop: &SubsystemPropagator,
    field: FieldSpec,
    initial: &QubitPairState,
    trunc: &TruncationSpec,
    omega_ts: &[f64],
) -> Result<Vec<QubitPairState>> {
    let mapper = ConditionalMapper::new(prop, field, trunc)?;
    omega_ts
        .par_iter()
        .map(|&wt| {
            let m = mapper.at(wt);
            two_qubit_reduced(&m, &m, initial)
        })
        .collect()
}

/// Concurrence on a time grid.
pub fn concurrence_trace(
    prop: &SubsystemPropagator,
    field: FieldSpec,
    initial: &QubitPairState,
    trunc: &TruncationSpec,
    omega_ts: &[f64],
) -> Result<Vec<f64>> {
    Ok(qubit_pair_trace(prop, field, initial, trunc, omega_ts)?
        .iter()
        .map(|q| concurrence(q).value)
        .collect())
}

/// Concurrence trace accepted by the doubling test, starting from the
/// heuristic cutoff unless `start` is given.
pub fn converged_concurrence_trace(
    params: &ModelParams,
    field: FieldSpec,
    initial: &QubitPairState,
    start: Option<TruncationSpec>,
    tol: f64,
    omega_ts: &[f64],
) -> Result<Converged<Vec<f64>>> {
    let start = start.unwrap_or_else(|| TruncationSpec::heuristic(field, params.beta()));
    converge(start, tol, 3, |t| {
        let prop = build_hamiltonian(params, t)?;
        concurrence_trace(&prop, field, initial, t, omega_ts)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn truncation_spec_validation() {
        assert!(TruncationSpec::new(0).is_err());
        let t = TruncationSpec::new(3).unwrap();
        assert_eq!(t.tail_tol, 1e-10);
        assert_eq!(t.doubled().ncut, 6);
        assert!(t.with_tail_tol(0.0).is_err());
    }

    #[test]
    fn heuristic_covers_the_stated_formula() {
        let t = TruncationSpec::heuristic(FieldSpec::Coherent(Complex64::new(1.0, 0.5)), 0.5);
        let a = Complex64::new(1.0, 0.5).norm();
        assert!(t.ncut >= ((a + 1.0) * (a + 1.0)).ceil() as usize + 20);
        let t = TruncationSpec::heuristic(FieldSpec::Thermal(2.0), 0.1);
        assert!(field_ensemble(FieldSpec::Thermal(2.0), &t).is_ok());
    }

    #[test]
    fn poisson_cutoff_bounds_tail() {
        for mean in [0.5, 4.0, 30.0] {
            let n = poisson_cutoff(mean, 1e-12);
            let (_, tail) =
                crate::specialfn::coherent_fock_amplitudes(Complex64::new(mean.sqrt(), 0.0), n);
            assert!(tail <= 1e-12, "mean {mean}: tail {tail}");
        }
    }
}
