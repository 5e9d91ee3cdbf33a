//! Analytic dynamics of the degenerate (`omega0 = 0`) model.
//!
//! Every quantity depends on time only through the phase `ωt`, via
//! `γ = e^{iωt} − 1`. The field enters through the normally ordered
//! characteristic function of its P representation evaluated at
//! `η = −2βγ`:
//!
//! | field        | `χ(η)`                        |
//! |--------------|-------------------------------|
//! | coherent α₀  | `exp(4iβ Im[α₀ γ*])`          |
//! | number N     | `L_N(4β²|γ|²)`                |
//! | thermal n̄    | `exp(−4 n̄ β² |γ|²)`           |
//!
//! The single-qubit coherence carries the envelope `exp(−2β²|γ|²)`, the
//! two-qubit corner element `exp(−4β²|γ|²)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BellState, FieldSpec, ModelParams, Spin};
use crate::specialfn::laguerre_unchecked;

/// `γ(ωt) = e^{iωt} − 1` and `|γ|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub omega_t: f64,
    pub gamma: Complex64,
    pub abs2: f64,
}

/// Evaluates `γ` with `cos ωt − 1 = −2 sin²(ωt/2)` so that `|γ|²` is
/// accurate near the revivals.
pub fn gamma(omega_t: f64) -> GammaValue {
    let half = (0.5 * omega_t).sin();
    let abs2 = 4.0 * half * half;
    GammaValue {
        omega_t,
        gamma: Complex64::new(-0.5 * abs2, omega_t.sin()),
        abs2,
    }
}

/// Single-qubit envelope `exp(−2β²|γ|²)`.
pub fn modulation_factor(beta: f64, omega_t: f64) -> f64 {
    (-2.0 * beta * beta * gamma(omega_t).abs2).exp()
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta must be finite and >= 0, got {beta}"
        )))
    }
}

/// `∫d²α P(α) exp(4iβ Im[α γ*])` for the given field.
pub fn characteristic_integral(field: FieldSpec, beta: f64, g: GammaValue) -> Result<Complex64> {
    check_beta(beta)?;
    field.validate()?;
    let x = 4.0 * beta * beta * g.abs2;
    Ok(match field {
        FieldSpec::Vacuum => Complex64::new(1.0, 0.0),
        FieldSpec::Coherent(alpha0) => {
            let phase = 4.0 * beta * (alpha0 * g.gamma.conj()).im;
            Complex64::from_polar(1.0, phase)
        }
        FieldSpec::Number(n) => Complex64::new(laguerre_unchecked(n, x), 0.0),
        FieldSpec::Thermal(nbar) => Complex64::new((-nbar * x).exp(), 0.0),
    })
}

/// Coherence `⟨↑|Q(t)|↓⟩` of one qubit whose initial coherence is `q0`.
pub fn single_qubit_coherence(
    q0: Complex64,
    field: FieldSpec,
    beta: f64,
    omega_t: f64,
) -> Result<Complex64> {
    if q0.norm() > 0.5 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "single-qubit coherence must satisfy |q0| <= 1/2, got {}",
            q0.norm()
        )));
    }
    let g = gamma(omega_t);
    let chi = characteristic_integral(field, beta, g)?;
    Ok(q0 * modulation_factor(beta, omega_t) * chi)
}

/// The nonzero upper off-diagonal element of the two-qubit state in the σx
/// basis, for identical fields on both sides.
///
/// For `Φ+` this is `Q_{↑↑,↓↓}`, for `Φ−` it is `Q_{↑↓,↓↑}`. `Ψ±` are
/// obtained from `Φ±` by the local unitary `σx ⊗ 1`, which flips the sign
/// of the element and leaves its modulus unchanged.
pub fn two_qubit_offdiagonal(
    bell: BellState,
    field: FieldSpec,
    beta: f64,
    omega_t: f64,
) -> Result<Complex64> {
    let g = gamma(omega_t);
    let chi = characteristic_integral(field, beta, g)?;
    let envelope = 0.5 * (-4.0 * beta * beta * g.abs2).exp();
    Ok(match bell {
        BellState::PhiPlus => envelope * chi * chi,
        BellState::PhiMinus => Complex64::new(envelope * chi.norm_sqr(), 0.0),
        BellState::PsiPlus => -(envelope * chi * chi),
        BellState::PsiMinus => Complex64::new(-envelope * chi.norm_sqr(), 0.0),
    })
}

/// Wootters concurrence of the two qubits, for any Bell input.
pub fn concurrence_closed(
    bell: BellState,
    field: FieldSpec,
    beta: f64,
    omega_t: f64,
) -> Result<f64> {
    let _ = bell;
    check_beta(beta)?;
    field.validate()?;
    let x = 4.0 * beta * beta * gamma(omega_t).abs2;
    Ok(concurrence_from_control(field, x))
}

/// Natural log of [`concurrence_closed`]. Stays finite where the
/// concurrence itself underflows to zero in double precision.
pub fn log_concurrence_closed(
    bell: BellState,
    field: FieldSpec,
    beta: f64,
    omega_t: f64,
) -> Result<f64> {
    let _ = bell;
    check_beta(beta)?;
    field.validate()?;
    let x = 4.0 * beta * beta * gamma(omega_t).abs2;
    Ok(match field {
        FieldSpec::Vacuum | FieldSpec::Coherent(_) => -x,
        FieldSpec::Number(n) => -x + 2.0 * laguerre_unchecked(n, x).abs().ln(),
        FieldSpec::Thermal(nbar) => -(1.0 + 2.0 * nbar) * x,
    })
}

/// Concurrence as a function of the control quantity `x = 4β²|γ|²`.
fn concurrence_from_control(field: FieldSpec, x: f64) -> f64 {
    match field {
        FieldSpec::Vacuum | FieldSpec::Coherent(_) => (-x).exp(),
        FieldSpec::Number(n) => {
            let l = laguerre_unchecked(n, x);
            (-x).exp() * l * l
        }
        FieldSpec::Thermal(nbar) => (-(1.0 + 2.0 * nbar) * x).exp(),
    }
}

/// Concurrence at `ωt = π`, where the control quantity peaks at `16β²`.
pub fn concurrence_at_half_period(field: FieldSpec, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    field.validate()?;
    Ok(concurrence_from_control(field, 16.0 * beta * beta))
}

fn check_nbar(nbar: f64) -> Result<()> {
    FieldSpec::Thermal(nbar).validate()
}

/// Concurrence for the mixed initial state of
/// [`crate::model::make_esd_mixture`] with identical thermal fields.
///
/// The populations stay at `(3/8, 1/8, 1/8, 3/8)` and the corner coherence
/// `3/8` decays with the `Φ+` thermal factor, so the X-state formula gives
/// `max(0, (3/4) e^{−4(1+2n̄)β²|γ|²} − 1/4)`.
pub fn esd_concurrence_closed(beta: f64, nbar: f64, omega_t: f64) -> Result<f64> {
    check_beta(beta)?;
    check_nbar(nbar)?;
    let x = 4.0 * beta * beta * gamma(omega_t).abs2;
    Ok((0.75 * (-(1.0 + 2.0 * nbar) * x).exp() - 0.25).max(0.0))
}

/// Interval of `ωt ∈ [0, 2π]` on which [`esd_concurrence_closed`] vanishes,
/// or `None` when the entanglement never dies.
///
/// Death requires `4(1+2n̄)β²|γ|² ≥ ln 3`, reachable iff
/// `16(1+2n̄)β² ≥ ln 3`.
pub fn esd_interval(beta: f64, nbar: f64) -> Result<Option<(f64, f64)>> {
    check_beta(beta)?;
    check_nbar(nbar)?;
    let k = 4.0 * (1.0 + 2.0 * nbar) * beta * beta;
    if k == 0.0 {
        return Ok(None);
    }
    let needed_abs2 = 3f64.ln() / k;
    if needed_abs2 > 4.0 {
        return Ok(None);
    }
    // |γ|² = 2 − 2cos θ ≥ s  ⇔  cos θ ≤ 1 − s/2
    let start = (1.0 - 0.5 * needed_abs2).clamp(-1.0, 1.0).acos();
    Ok(Some((start, 2.0 * PI - start)))
}

/// Coherent amplitude `β(t) = β γ*(t)` of the fields evolved from vacuum.
///
/// The joint state is `(|↑↑, β(t), β(t)⟩ + |↓↓, −β(t), −β(t)⟩)/√2` up to a
/// global phase.
pub fn evolved_vacuum_state_amplitude(beta: f64, omega_t: f64) -> Complex64 {
    beta * gamma(omega_t).gamma.conj()
}

/// Purity of one field's reduced state for the vacuum-evolved `Φ+` state:
/// `1/2 + (1/2)|⟨β(t)|−β(t)⟩|² = 1/2 + (1/2)e^{−4|β(t)|²}`.
pub fn vacuum_single_field_purity(beta: f64, omega_t: f64) -> f64 {
    let b = evolved_vacuum_state_amplitude(beta, omega_t);
    0.5 + 0.5 * (-4.0 * b.norm_sqr()).exp()
}

/// A coherent state times a phase, the result of propagating `|s, α⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedCoherent {
    pub amplitude: Complex64,
    pub phase: Complex64,
}

/// Exact evolution of `|s, α⟩` for real `β`:
///
/// * `↑`: `|(α+β)e^{−iωt} − β⟩ · e^{−iβ² sin ωt} e^{iβ Im[α γ*]}`
/// * `↓`: `|(α−β)e^{−iωt} + β⟩ · e^{−iβ² sin ωt} e^{iβ Im[α* γ]}`
///
/// The phases belong to the Hamiltonian shifted by `+λ²/ω`; the unshifted
/// evolution differs by the global factor `e^{iβ²ωt}`.
pub fn appendix_a_propagate(
    alpha: Complex64,
    spin: Spin,
    beta: f64,
    omega_t: f64,
) -> DisplacedCoherent {
    let g = gamma(omega_t);
    let rot = Complex64::from_polar(1.0, -omega_t);
    let b = spin.sign() * beta;
    let amplitude = (alpha + b) * rot - b;
    let common = -beta * beta * omega_t.sin();
    let local = match spin {
        Spin::Up => beta * (alpha * g.gamma.conj()).im,
        Spin::Down => beta * (alpha.conj() * g.gamma).im,
    };
    DisplacedCoherent {
        amplitude,
        phase: Complex64::from_polar(1.0, common + local),
    }
}

/// Closed forms bound to a model, rejecting non-degenerate parameters.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForm {
    beta: f64,
}

impl ClosedForm {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.require_degenerate()?;
        Ok(Self {
            beta: params.beta(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn single_qubit_coherence(
        &self,
        q0: Complex64,
        field: FieldSpec,
        omega_t: f64,
    ) -> Result<Complex64> {
        single_qubit_coherence(q0, field, self.beta, omega_t)
    }

    pub fn two_qubit_offdiagonal(
        &self,
        bell: BellState,
        field: FieldSpec,
        omega_t: f64,
    ) -> Result<Complex64> {
        two_qubit_offdiagonal(bell, field, self.beta, omega_t)
    }

    pub fn concurrence(&self, bell: BellState, field: FieldSpec, omega_t: f64) -> Result<f64> {
        concurrence_closed(bell, field, self.beta, omega_t)
    }

    pub fn esd_concurrence(&self, nbar: f64, omega_t: f64) -> Result<f64> {
        esd_concurrence_closed(self.beta, nbar, omega_t)
    }
}

/// Number of instants in one period at which the concurrence for number
/// fields `N` vanishes.
///
/// The control quantity `4β²|γ|²` rises monotonically on `(0, π]` and falls
/// symmetrically on `[π, 2π)`, so every sign change of `L_N` along the
/// rising half is met twice. A root sitting exactly at the turning point
/// `16β²` is met once.
pub fn number_field_zero_count(n: u32, beta: f64, samples: usize) -> Result<usize> {
    check_beta(beta)?;
    let samples = samples.max(2);
    let mut crossings = 0;
    let mut touch = 0;
    let mut last_sign = 1.0; // L_N(0) = 1
    for i in 1..=samples {
        let theta = PI * i as f64 / samples as f64;
        let v = laguerre_unchecked(n, 4.0 * beta * beta * gamma(theta).abs2);
        if v == 0.0 {
            if i == samples {
                touch = 1;
            }
        } else if v.signum() != last_sign {
            crossings += 1;
            last_sign = v.signum();
        }
    }
    Ok(2 * crossings + touch)
}
