//! Model parameters, field specifications and two-qubit states.
//!
//! Single-qubit states are written either in the eigenbasis of σx
//! (`↑`, `↓`) or of σz (`e`, `g`). Two-qubit matrices are indexed
//! (qubit A, qubit B) with the first qubit most significant, so the σx
//! ordering is `↑↑, ↑↓, ↓↑, ↓↓` and the σz ordering is `ee, eg, ge, gg`.
//!
//! The two bases are related by the Hadamard matrix:
//! `|↑⟩ = (|e⟩ + |g⟩)/√2`, `|↓⟩ = (|e⟩ − |g⟩)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise bound on `ρ − ρ†`.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Bound on `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a positive semidefinite matrix.
pub const POSITIVITY_TOL: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Oscillator frequency `omega`, qubit splitting `omega0` and coupling
/// `lambda`, all in rad per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    omega0: f64,
    lambda: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be finite and > 0, got {omega}"
            )));
        }
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be finite and >= 0, got {omega0}"
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self {
            omega,
            omega0,
            lambda,
        })
    }

    /// Degenerate model with `omega = 1` and `lambda = beta`.
    pub fn degenerate(beta: f64) -> Result<Self> {
        Self::new(1.0, 0.0, beta)
    }

    /// Model specified by the dimensionless coupling; `lambda = beta * omega`.
    pub fn from_beta(omega: f64, omega0: f64, beta: f64) -> Result<Self> {
        Self::new(omega, omega0, beta * omega)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `lambda / omega`, recomputed on every call.
    pub fn beta(&self) -> f64 {
        self.lambda / self.omega
    }

    pub fn is_degenerate(&self) -> bool {
        self.omega0 == 0.0
    }

    /// Fails unless `omega0 == 0`.
    pub fn require_degenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Ok(())
        } else {
            Err(Error::NonDegenerate(self.omega0))
        }
    }
}

/// Initial state of one oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Vacuum,
    Coherent(Complex64),
    Number(u32),
    Thermal(f64),
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSpec::Coherent(alpha) if !(alpha.re.is_finite() && alpha.im.is_finite()) => Err(
                Error::InvalidParameter(format!("coherent amplitude must be finite, got {alpha}")),
            ),
            FieldSpec::Thermal(nbar) if !(nbar.is_finite() && nbar >= 0.0) => {
                Err(Error::InvalidParameter(format!(
                    "thermal nbar must be finite and >= 0, got {nbar}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Vacuum, coherent and number states are pure; thermal states with
    /// `nbar > 0` are not.
    pub fn is_pure(&self) -> bool {
        match *self {
            FieldSpec::Thermal(nbar) => nbar == 0.0,
            _ => true,
        }
    }

    pub fn mean_excitation(&self) -> f64 {
        match *self {
            FieldSpec::Vacuum => 0.0,
            FieldSpec::Coherent(alpha) => alpha.norm_sqr(),
            FieldSpec::Number(n) => n as f64,
            FieldSpec::Thermal(nbar) => nbar,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Vacuum => write!(f, "vacuum"),
            FieldSpec::Coherent(a) => write!(f, "coherent:alpha={},{}", a.re, a.im),
            FieldSpec::Number(n) => write!(f, "number:n={n}"),
            FieldSpec::Thermal(nbar) => write!(f, "thermal:nbar={nbar}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Parses `vacuum`, `coherent:alpha=RE,IM`, `number:n=K` or
    /// `thermal:nbar=F`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParameter(format!("field '{s}': {why}"));
        let s_trim = s.trim();
        let (kind, arg) = match s_trim.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s_trim, None),
        };
        let value_of = |key: &str| -> Result<&str> {
            let arg = arg.ok_or_else(|| bad(&format!("missing '{key}=' argument")))?;
            arg.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .map(str::trim)
                .ok_or_else(|| bad(&format!("expected '{key}=...'")))
        };
        let field = match kind.to_ascii_lowercase().as_str() {
            "vacuum" => {
                if arg.is_some() {
                    return Err(bad("vacuum takes no argument"));
                }
                FieldSpec::Vacuum
            }
            "coherent" => {
                let v = value_of("alpha")?;
                let (re, im) = match v.split_once(',') {
                    Some((re, im)) => (re.trim(), im.trim()),
                    None => (v, "0"),
                };
                let re: f64 = re.parse().map_err(|_| bad("alpha real part"))?;
                let im: f64 = im.parse().map_err(|_| bad("alpha imaginary part"))?;
                FieldSpec::Coherent(Complex64::new(re, im))
            }
            "number" => {
                let v = value_of("n")?;
                let n: u32 = v
                    .parse()
                    .map_err(|_| bad("n must be a nonnegative integer"))?;
                FieldSpec::Number(n)
            }
            "thermal" => {
                let v = value_of("nbar")?;
                FieldSpec::Thermal(v.parse().map_err(|_| bad("nbar must be a number"))?)
            }
            _ => return Err(bad("unknown field class")),
        };
        field.validate()?;
        Ok(field)
    }
}

/// Single-qubit basis used to write a two-qubit matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitBasis {
    /// Eigenbasis of σx, ordered `↑, ↓`.
    SigmaX,
    /// Eigenbasis of σz, ordered `e, g`.
    SigmaZ,
}

/// σx eigenstate of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    /// Row index in the σx basis.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// σx eigenvalue, ±1.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// The four Bell states, defined in the σz basis:
/// `Φ± = (|ee⟩ ± |gg⟩)/√2`, `Ψ± = (|eg⟩ ± |ge⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// State vector in the σz product basis.
    pub fn sigma_z_amplitudes(self) -> Vector4<Complex64> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            BellState::PhiPlus => Vector4::new(h, ZERO, ZERO, h),
            BellState::PhiMinus => Vector4::new(h, ZERO, ZERO, -h),
            BellState::PsiPlus => Vector4::new(ZERO, h, h, ZERO),
            BellState::PsiMinus => Vector4::new(ZERO, h, -h, ZERO),
        }
    }

    /// State vector in the σx product basis.
    pub fn amplitudes(self, basis: QubitBasis) -> Vector4<Complex64> {
        let z = self.sigma_z_amplitudes();
        match basis {
            QubitBasis::SigmaZ => z,
            QubitBasis::SigmaX => hadamard_pair() * z,
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        };
        f.write_str(s)
    }
}

impl FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phi+" => Ok(BellState::PhiPlus),
            "phi-" => Ok(BellState::PhiMinus),
            "psi+" => Ok(BellState::PsiPlus),
            "psi-" => Ok(BellState::PsiMinus),
            other => Err(Error::InvalidParameter(format!(
                "unknown Bell state '{other}'"
            ))),
        }
    }
}

/// Single-qubit basis change `σz ↔ σx`. The matrix is its own inverse.
pub fn hadamard() -> Matrix2<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Matrix2::new(h, h, h, -h)
}

/// `H ⊗ H` on the two-qubit space.
pub fn hadamard_pair() -> Matrix4<Complex64> {
    kron2(&hadamard(), &hadamard())
}

/// Kronecker product of two 2×2 matrices, first factor most significant.
pub fn kron2(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Two-qubit density matrix tagged with the basis it is written in.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitPairState {
    rho: Matrix4<Complex64>,
    basis: QubitBasis,
}

impl QubitPairState {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(rho: Matrix4<Complex64>, basis: QubitBasis) -> Result<Self> {
        let herm = (rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm.is_nan() || herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |rho - rho^dagger| = {herm:e}"
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).norm().is_nan() || (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = hermitian_eigenvalues(&rho).min();
        if min_eig.is_nan() || min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: smallest eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { rho, basis })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn from_pure(psi: &Vector4<Complex64>, basis: QubitBasis) -> Result<Self> {
        Self::new(psi * psi.adjoint(), basis)
    }

    pub fn maximally_mixed(basis: QubitBasis) -> Self {
        Self {
            rho: Matrix4::identity() * Complex64::new(0.25, 0.0),
            basis,
        }
    }

    pub fn rho(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    pub fn basis(&self) -> QubitBasis {
        self.basis
    }

    /// Same state, rewritten in `target`.
    pub fn in_basis(&self, target: QubitBasis) -> Self {
        change_basis(self, target)
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut e: Vec<f64> = hermitian_eigenvalues(&self.rho).iter().copied().collect();
        e.sort_by(f64::total_cmp);
        [e[0], e[1], e[2], e[3]]
    }
}

fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> nalgebra::Vector4<f64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    sym.symmetric_eigenvalues()
}

/// Pure Bell state written in `basis`.
///
/// The state is always the physical σz-defined Bell state; only its matrix
/// representation depends on `basis`. In the σx basis `Φ+` reads
/// `(|↑↑⟩ + |↓↓⟩)/√2` while `Φ−` reads `(|↑↓⟩ + |↓↑⟩)/√2`.
pub fn make_bell(variant: BellState, basis: QubitBasis) -> QubitPairState {
    let psi = variant.amplitudes(basis);
    QubitPairState {
        rho: psi * psi.adjoint(),
        basis,
    }
}

/// `(3/4)|Φ+⟩⟨Φ+| + (1/8)|↑↓⟩⟨↑↓| + (1/8)|↓↑⟩⟨↓↑|`, in the σx basis.
pub fn make_esd_mixture() -> QubitPairState {
    let mut rho = Matrix4::zeros();
    let c = |x: f64| Complex64::new(x, 0.0);
    rho[(0, 0)] = c(3.0 / 8.0);
    rho[(3, 3)] = c(3.0 / 8.0);
    rho[(0, 3)] = c(3.0 / 8.0);
    rho[(3, 0)] = c(3.0 / 8.0);
    rho[(1, 1)] = c(1.0 / 8.0);
    rho[(2, 2)] = c(1.0 / 8.0);
    QubitPairState {
        rho,
        basis: QubitBasis::SigmaX,
    }
}

/// Rewrites a state in another basis by the per-qubit Hadamard similarity.
pub fn change_basis(state: &QubitPairState, target: QubitBasis) -> QubitPairState {
    if state.basis == target {
        return state.clone();
    }
    let h = hadamard_pair();
    let rho = h * state.rho * h;
    // Re-symmetrize so that repeated conversions do not accumulate drift.
    let rho = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    QubitPairState { rho, basis: target }
}
