use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::fields::pure_field_vector;
use super::propagator::SubsystemPropagator;
use super::TruncationSpec;
use crate::entanglement::negativity;
use crate::error::{Error, Result};
use crate::model::{BellState, FieldSpec, QubitBasis, QubitPairState, Spin};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Gram–Schmidt over `vectors`, dropping directions below `1e-14` in norm.
fn orthonormal_basis(vectors: &[DVector<Complex64>]) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    let scale = vectors
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    for v in vectors {
        let mut w = v.clone();
        // Two passes for numerical orthogonality.
        for _ in 0..2 {
            for e in &basis {
                let c = e.dotc(&w);
                w -= e * c;
            }
        }
        let n = w.norm();
        if n > 1e-14 * scale {
            basis.push(w / Complex64::new(n, 0.0));
        }
    }
    basis
}

/// Evolved pure state of qubit A, qubit B, field a, field b.
///
/// Each field is stored in coordinates of an orthonormal basis spanning the
/// at most four field vectors it can reach, which is exact because every
/// local quantity is invariant under local isometries.
#[derive(Debug, Clone)]
pub struct FourPartyState {
    // psi[((qa * 2 + qb) * ra + xa) * rb + xb]
    psi: DVector<Complex64>,
    basis_a: Vec<DVector<Complex64>>,
    basis_b: Vec<DVector<Complex64>>,
    pub tail_mass: f64,
}

/// Reduced density matrix over field a ⊗ field b.
#[derive(Debug, Clone)]
pub struct FieldPairState {
    compressed: DMatrix<Complex64>,
    basis_a: Vec<DVector<Complex64>>,
    basis_b: Vec<DVector<Complex64>>,
}

impl FieldPairState {
    /// Local dimensions of the compressed representation.
    pub fn compressed_dims(&self) -> (usize, usize) {
        (self.basis_a.len(), self.basis_b.len())
    }

    pub fn compressed(&self) -> &DMatrix<Complex64> {
        &self.compressed
    }

    /// The state on the full `(ncut+1)²`-dimensional Fock space, field a major.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n1 = self.basis_a[0].len();
        let (ra, rb) = self.compressed_dims();
        let mut iso = DMatrix::zeros(n1 * n1, ra * rb);
        for xa in 0..ra {
            for xb in 0..rb {
                for na in 0..n1 {
                    for nb in 0..n1 {
                        iso[(na * n1 + nb, xa * rb + xb)] =
                            self.basis_a[xa][na] * self.basis_b[xb][nb];
                    }
                }
            }
        }
        &iso * &self.compressed * iso.adjoint()
    }

    pub fn negativity(&self) -> Result<f64> {
        negativity(&self.compressed, self.compressed_dims())
    }

    pub fn purity(&self) -> f64 {
        (&self.compressed * &self.compressed).trace().re
    }
}

impl FourPartyState {
    fn dims(&self) -> [usize; 4] {
        [2, 2, self.basis_a.len(), self.basis_b.len()]
    }

    /// Reduced density matrix over the parties in `keep` (ordered A, B, a, b).
    fn reduced(&self, keep: [bool; 4]) -> DMatrix<Complex64> {
        let dims = self.dims();
        let kept: usize = (0..4).filter(|&p| keep[p]).map(|p| dims[p]).product();
        let traced: usize = (0..4).filter(|&p| !keep[p]).map(|p| dims[p]).product();
        // Reshape psi into kept × traced.
        let mut m = DMatrix::from_element(kept, traced, ZERO);
        let total = dims.iter().product::<usize>();
        for idx in 0..total {
            let mut rem = idx;
            let mut digits = [0usize; 4];
            for p in (0..4).rev() {
                digits[p] = rem % dims[p];
                rem /= dims[p];
            }
            let (mut k, mut t) = (0, 0);
            for p in 0..4 {
                if keep[p] {
                    k = k * dims[p] + digits[p];
                } else {
                    t = t * dims[p] + digits[p];
                }
            }
            m[(k, t)] = self.psi[idx];
        }
        &m * m.adjoint()
    }

    /// Reduced state of the two qubits, in the σx basis.
    pub fn qubit_pair(&self) -> Result<QubitPairState> {
        let r = self.reduced([true, true, false, false]);
        let r = (&r + r.adjoint()) * Complex64::new(0.5, 0.0);
        QubitPairState::new(
            nalgebra::Matrix4::from_fn(|i, j| r[(i, j)]),
            QubitBasis::SigmaX,
        )
    }

    pub fn field_pair(&self) -> FieldPairState {
        let r = self.reduced([false, false, true, true]);
        FieldPairState {
            compressed: (&r + r.adjoint()) * Complex64::new(0.5, 0.0),
            basis_a: self.basis_a.clone(),
            basis_b: self.basis_b.clone(),
        }
    }

    pub fn qubit_a_purity(&self) -> f64 {
        let r = self.reduced([true, false, false, false]);
        (&r * &r).trace().re
    }

    pub fn field_a_purity(&self) -> f64 {
        let r = self.reduced([false, false, true, false]);
        (&r * &r).trace().re
    }

    pub fn qubit_pair_purity(&self) -> f64 {
        let r = self.reduced([true, true, false, false]);
        (&r * &r).trace().re
    }
}

/// Evolves `bell ⊗ |f⟩ ⊗ |f⟩` with both subsystems driven by `prop`.
pub fn evolve_four_party(
    prop: &SubsystemPropagator,
    bell: BellState,
    field: FieldSpec,
    trunc: &TruncationSpec,
    omega_t: f64,
) -> Result<FourPartyState> {
    let trunc = TruncationSpec {
        ncut: prop.ncut(),
        tail_tol: trunc.tail_tol,
    };
    let (f, tail_mass) = pure_field_vector(field, &trunc)?;
    let n1 = prop.ncut() + 1;
    let mut inputs = DMatrix::from_element(prop.dim(), 2, ZERO);
    for s in Spin::BOTH {
        for n in 0..n1 {
            inputs[(s.index() * n1 + n, s.index())] = f[n];
        }
    }
    let prepared = prop.prepare(&inputs)?;
    let y = prop.evolve_prepared(&prepared, omega_t);
    // Field vector attached to qubit component q after starting in spin i.
    let branch = |i: usize, q: usize| -> DVector<Complex64> {
        DVector::from_fn(n1, |n, _| y[(q * n1 + n, i)])
    };
    let mut raw = Vec::with_capacity(4);
    for i in 0..2 {
        for q in 0..2 {
            raw.push(branch(i, q));
        }
    }
    let basis = orthonormal_basis(&raw);
    if basis.is_empty() {
        return Err(Error::InvalidState("evolved field vectors vanish".into()));
    }
    let r = basis.len();
    // coords[i][q] = E† branch(i, q)
    let coords: Vec<Vec<DVector<Complex64>>> = (0..2)
        .map(|i| {
            (0..2)
                .map(|q| DVector::from_fn(r, |x, _| basis[x].dotc(&raw[2 * i + q])))
                .collect()
        })
        .collect();

    let c = bell.amplitudes(QubitBasis::SigmaX);
    let mut psi = DVector::from_element(4 * r * r, ZERO);
    for i in 0..2 {
        for j in 0..2 {
            let cij = c[2 * i + j];
            if cij == ZERO {
                continue;
            }
            for qa in 0..2 {
                for qb in 0..2 {
                    let (u, v) = (&coords[i][qa], &coords[j][qb]);
                    for xa in 0..r {
                        for xb in 0..r {
                            psi[((qa * 2 + qb) * r + xa) * r + xb] += cij * u[xa] * v[xb];
                        }
                    }
                }
            }
        }
    }
    let norm = psi.norm();
    psi /= Complex64::new(norm, 0.0);
    Ok(FourPartyState {
        psi,
        basis_a: basis.clone(),
        basis_b: basis,
        tail_mass,
    })
}

/// Reduced state of the two fields after tracing out both qubits.
pub fn field_field_reduced(
    prop: &SubsystemPropagator,
    bell: BellState,
    field: FieldSpec,
    trunc: &TruncationSpec,
    omega_t: f64,
) -> Result<FieldPairState> {
    if !field.is_pure() {
        return Err(Error::Unsupported(format!(
            "field-field reduction needs a pure field, got {field}"
        )));
    }
    Ok(evolve_four_party(prop, bell, field, trunc, omega_t)?.field_pair())
}
