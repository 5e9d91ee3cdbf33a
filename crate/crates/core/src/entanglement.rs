//! Two-qubit concurrence and the partial-transpose negativity.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{QubitBasis, QubitPairState};

/// Entries outside the diagonal and anti-diagonal above this modulus make a
/// state non-X.
pub const XSTATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcurrenceMethod {
    General,
    XStateShortcut,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    pub method: ConcurrenceMethod,
    /// Square roots of the eigenvalues of `ρ ρ̃`, descending. Only set by
    /// [`wootters_concurrence`].
    pub spectrum: Option<[f64; 4]>,
}

/// `σy ⊗ σy` in the σz product basis: the anti-diagonal `(−1, 1, 1, −1)`.
fn spin_flip() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

/// Wootters concurrence `max(0, s1 − s2 − s3 − s4)`.
///
/// The `sᵢ` are the square roots of the eigenvalues of `ρ ρ̃`,
/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)` with the conjugate taken in the σz basis.
/// They are computed as the singular values of `τ = Wᵀ (σy⊗σy) W` with
/// `ρ = W W†`, which keeps them accurate for nearly pure states.
pub fn wootters_concurrence(state: &QubitPairState) -> ConcurrenceResult {
    let z = state.in_basis(QubitBasis::SigmaZ);
    let eig = z.rho().symmetric_eigen();
    let mut w = eig.eigenvectors;
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let scale = Complex64::new(l.max(0.0).sqrt(), 0.0);
        for r in 0..4 {
            w[(r, k)] *= scale;
        }
    }
    let tau = w.transpose() * spin_flip() * w;
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let spectrum = [s[0], s[1], s[2], s[3]];
    let value = (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0);
    ConcurrenceResult {
        value,
        method: ConcurrenceMethod::General,
        spectrum: Some(spectrum),
    }
}

/// Largest modulus among entries off the diagonal and the anti-diagonal.
pub fn off_x_magnitude(rho: &Matrix4<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            if r != c && r + c != 3 {
                worst = worst.max(rho[(r, c)].norm());
            }
        }
    }
    worst
}

/// Closed-form concurrence of an X-shaped state:
/// `2 max(0, |ρ14| − √(ρ22 ρ33), |ρ23| − √(ρ11 ρ44))`.
pub fn xstate_concurrence(state: &QubitPairState) -> Result<ConcurrenceResult> {
    let rho = state.rho();
    let off = off_x_magnitude(rho);
    if off > XSTATE_TOL {
        return Err(Error::NotXState(off));
    }
    let p = |i: usize| rho[(i, i)].re.max(0.0);
    let a = rho[(0, 3)].norm() - (p(1) * p(2)).sqrt();
    let b = rho[(1, 2)].norm() - (p(0) * p(3)).sqrt();
    Ok(ConcurrenceResult {
        value: (2.0 * a.max(b).max(0.0)).min(1.0),
        method: ConcurrenceMethod::XStateShortcut,
        spectrum: None,
    })
}

/// Concurrence using the X-state shortcut when `state` is X-shaped in its
/// own basis and the general eigen-solve otherwise.
pub fn concurrence(state: &QubitPairState) -> ConcurrenceResult {
    xstate_concurrence(state).unwrap_or_else(|_| wootters_concurrence(state))
}

/// Partial transpose over the second factor of a `dA·dB` square matrix.
pub fn partial_transpose(
    rho: &DMatrix<Complex64>,
    dims: (usize, usize),
) -> Result<DMatrix<Complex64>> {
    let (da, db) = dims;
    let d = da * db;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.nrows().max(rho.ncols()),
        });
    }
    Ok(DMatrix::from_fn(d, d, |r, c| {
        let (ia, ib) = (r / db, r % db);
        let (ja, jb) = (c / db, c % db);
        rho[(ia * db + jb, ja * db + ib)]
    }))
}

/// Sum of the moduli of the negative eigenvalues of `ρ^{T_B}`.
pub fn negativity(rho: &DMatrix<Complex64>, dims: (usize, usize)) -> Result<f64> {
    let d = dims.0 * dims.1;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.nrows().max(rho.ncols()),
        });
    }
    let herm = (rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if herm > 1e-10 {
        return Err(Error::InvalidState(format!(
            "negativity needs a Hermitian matrix, max |rho - rho^dagger| = {herm:e}"
        )));
    }
    let tr = rho.trace();
    if (tr - 1.0).norm() > 1e-10 {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let pt = partial_transpose(rho, dims)?;
    let pt = (&pt + pt.adjoint()) * Complex64::new(0.5, 0.0);
    let eigs = pt.symmetric_eigenvalues();
    Ok(eigs.iter().filter(|&&e| e < 0.0).map(|e| -e).sum())
}
