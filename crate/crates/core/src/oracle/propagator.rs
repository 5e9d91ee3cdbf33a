use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::TruncationSpec;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Spin};

/// Qubit-major index of `|q⟩ ⊗ |n⟩` in a subsystem with `ncut + 1` Fock levels.
pub fn subsystem_index(ncut: usize, spin: Spin, n: usize) -> usize {
    spin.index() * (ncut + 1) + n
}

/// `H = ω a†a + λ (a† + a) σx + (ω₀/2) σz` on `C² ⊗ C^{ncut+1}`, written in
/// the σx basis where `σx = diag(1, −1)` and `σz` swaps `↑` and `↓`.
///
/// The matrix is real symmetric. No constant energy shift is included.
pub fn hamiltonian_matrix(params: &ModelParams, ncut: usize) -> DMatrix<f64> {
    let n1 = ncut + 1;
    let d = 2 * n1;
    let mut h = DMatrix::zeros(d, d);
    for spin in Spin::BOTH {
        let s = spin.sign();
        for n in 0..n1 {
            let i = subsystem_index(ncut, spin, n);
            h[(i, i)] = params.omega() * n as f64;
            if n + 1 < n1 {
                let j = subsystem_index(ncut, spin, n + 1);
                let c = s * params.lambda() * ((n + 1) as f64).sqrt();
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
        }
    }
    if params.omega0() != 0.0 {
        let half = 0.5 * params.omega0();
        for n in 0..n1 {
            let up = subsystem_index(ncut, Spin::Up, n);
            let dn = subsystem_index(ncut, Spin::Down, n);
            h[(up, dn)] = half;
            h[(dn, up)] = half;
        }
    }
    h
}

/// An invariant block of the Hamiltonian and its eigendecomposition.
#[derive(Debug, Clone)]
pub(crate) struct Sector {
    pub(crate) indices: Vec<usize>,
    pub(crate) energies: DVector<f64>,
    pub(crate) vectors: DMatrix<f64>,
}

/// Groups basis indices into the connected components of the nonzero
/// pattern of `h`. Each group is invariant under the dynamics.
fn invariant_blocks(h: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let d = h.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in 0..d {
        for r in (c + 1)..d {
            if h[(r, c)] != 0.0 {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for i in 0..d {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

/// Eigendecomposition of the truncated subsystem Hamiltonian, reused for
/// every propagation time.
///
/// At `omega0 = 0` the Hamiltonian splits into the `↑` and `↓` blocks and
/// each block is diagonalized on its own.
#[derive(Debug, Clone)]
pub struct SubsystemPropagator {
    params: ModelParams,
    ncut: usize,
    sectors: Vec<Sector>,
}

/// Builds and diagonalizes the Hamiltonian.
pub fn build_hamiltonian(
    params: &ModelParams,
    trunc: &TruncationSpec,
) -> Result<SubsystemPropagator> {
    let ncut = trunc.ncut;
    if ncut < 1 {
        return Err(Error::InvalidParameter("ncut must be >= 1".into()));
    }
    let h = hamiltonian_matrix(params, ncut);
    let mut sectors = Vec::new();
    for indices in invariant_blocks(&h) {
        let m = indices.len();
        let block = DMatrix::from_fn(m, m, |r, c| h[(indices[r], indices[c])]);
        let max_abs = block.amax();
        let eig = SymmetricEigen::try_new(block, f64::EPSILON, 1000 * m.max(10))
            .ok_or(Error::Eigensolver { dim: m, max_abs })?;
        sectors.push(Sector {
            indices,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        });
    }
    Ok(SubsystemPropagator {
        params: *params,
        ncut,
        sectors,
    })
}

/// Inputs projected onto the eigenbasis, ready to be evolved to any time.
#[derive(Debug, Clone)]
pub struct PreparedInputs {
    columns: usize,
    // Per sector: input columns touching the sector and V^T X restricted to them.
    pub(crate) parts: Vec<(Vec<usize>, DMatrix<f64>, DMatrix<f64>)>,
}

impl PreparedInputs {
    pub fn columns(&self) -> usize {
        self.columns
    }
}

impl SubsystemPropagator {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn ncut(&self) -> usize {
        self.ncut
    }

    /// Hilbert-space dimension `2 (ncut + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.ncut + 1)
    }

    /// Number of invariant blocks found in the Hamiltonian.
    pub fn sector_count(&self) -> usize {
        self.sectors.len()
    }

    /// All eigenvalues, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .sectors
            .iter()
            .flat_map(|s| s.energies.iter().copied())
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Full eigenvector matrix (columns), in sector order.
    pub fn eigenvector_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut v = DMatrix::zeros(d, d);
        let mut col = 0;
        for s in &self.sectors {
            for k in 0..s.indices.len() {
                for (r, &i) in s.indices.iter().enumerate() {
                    v[(i, col)] = s.vectors[(r, k)];
                }
                col += 1;
            }
        }
        v
    }

    /// Lowest `count` eigenvalues relative to the ground state.
    pub fn low_spectrum(&self, count: usize) -> Vec<f64> {
        let e = self.energies();
        let e0 = e[0];
        e.iter().take(count).map(|x| x - e0).collect()
    }

    pub(crate) fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub(crate) fn time(&self, omega_t: f64) -> f64 {
        omega_t / self.params.omega()
    }

    /// Dense `U = exp(−iHt)` with `t = omega_t / omega`.
    pub fn unitary(&self, omega_t: f64) -> DMatrix<Complex64> {
        let d = self.dim();
        let t = self.time(omega_t);
        let mut u = DMatrix::zeros(d, d);
        for s in &self.sectors {
            let m = s.indices.len();
            let scaled = |f: fn(f64) -> f64| {
                DMatrix::from_fn(m, m, |r, k| s.vectors[(r, k)] * f(s.energies[k] * t))
            };
            let vt = s.vectors.transpose();
            let u_re = scaled(f64::cos) * &vt;
            let u_im = -(scaled(f64::sin) * &vt);
            for r in 0..m {
                for c in 0..m {
                    u[(s.indices[r], s.indices[c])] = Complex64::new(u_re[(r, c)], u_im[(r, c)]);
                }
            }
        }
        u
    }

    /// Projects the columns of `inputs` (each a subsystem vector) onto the
    /// eigenbasis once, so that later evolutions cost one matrix product.
    pub fn prepare(&self, inputs: &DMatrix<Complex64>) -> Result<PreparedInputs> {
        if inputs.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: inputs.nrows(),
            });
        }
        let k = inputs.ncols();
        let mut parts = Vec::with_capacity(self.sectors.len());
        for s in &self.sectors {
            let cols: Vec<usize> = (0..k)
                .filter(|&c| {
                    s.indices
                        .iter()
                        .any(|&i| inputs[(i, c)] != Complex64::new(0.0, 0.0))
                })
                .collect();
            let m = s.indices.len();
            let x_re = DMatrix::from_fn(m, cols.len(), |r, c| inputs[(s.indices[r], cols[c])].re);
            let x_im = DMatrix::from_fn(m, cols.len(), |r, c| inputs[(s.indices[r], cols[c])].im);
            let vt = s.vectors.transpose();
            parts.push((cols, &vt * x_re, &vt * x_im));
        }
        Ok(PreparedInputs { columns: k, parts })
    }

    /// `U(t) X` for prepared inputs `X`.
    pub fn evolve_prepared(&self, prepared: &PreparedInputs, omega_t: f64) -> DMatrix<Complex64> {
        let t = self.time(omega_t);
        let mut out = DMatrix::from_element(self.dim(), prepared.columns, Complex64::new(0.0, 0.0));
        for (s, (cols, w_re, w_im)) in self.sectors.iter().zip(&prepared.parts) {
            if cols.is_empty() {
                continue;
            }
            let mut z_re = w_re.clone();
            let mut z_im = w_im.clone();
            for (k, e) in s.energies.iter().enumerate() {
                let (sin, cos) = (e * t).sin_cos();
                // e^{-iθ}(a + ib) = (a cos θ + b sin θ) + i(b cos θ − a sin θ)
                for c in 0..cols.len() {
                    let (a, b) = (w_re[(k, c)], w_im[(k, c)]);
                    z_re[(k, c)] = a * cos + b * sin;
                    z_im[(k, c)] = b * cos - a * sin;
                }
            }
            let y_re = &s.vectors * z_re;
            let y_im = &s.vectors * z_im;
            for (c, &col) in cols.iter().enumerate() {
                for (r, &i) in s.indices.iter().enumerate() {
                    out[(i, col)] = Complex64::new(y_re[(r, c)], y_im[(r, c)]);
                }
            }
        }
        out
    }

    /// `U(t) v` for a single vector.
    pub fn propagate_vector(
        &self,
        v: &DVector<Complex64>,
        omega_t: f64,
    ) -> Result<DVector<Complex64>> {
        let x = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
        let prepared = self.prepare(&x)?;
        Ok(self
            .evolve_prepared(&prepared, omega_t)
            .column(0)
            .into_owned())
    }
}

/// One qubit and one truncated oscillator, qubit-major in the σx basis.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsystemState {
    Vector(DVector<Complex64>),
    Density(DMatrix<Complex64>),
}

impl SubsystemState {
    /// `|spin⟩ ⊗ |field⟩` from Fock amplitudes `field[0..=ncut]`.
    pub fn product(spin: Spin, field: &[Complex64]) -> Self {
        let n1 = field.len();
        let mut v = DVector::zeros(2 * n1);
        for (n, &c) in field.iter().enumerate() {
            v[spin.index() * n1 + n] = c;
        }
        SubsystemState::Vector(v)
    }

    pub fn dim(&self) -> usize {
        match self {
            SubsystemState::Vector(v) => v.len(),
            SubsystemState::Density(m) => m.nrows(),
        }
    }

    /// Norm of a vector, trace of a density matrix.
    pub fn norm(&self) -> f64 {
        match self {
            SubsystemState::Vector(v) => v.norm(),
            SubsystemState::Density(m) => m.trace().re,
        }
    }
}

/// `U(t)|ψ⟩` or `U(t) ρ U(t)†`.
pub fn propagate_state(
    prop: &SubsystemPropagator,
    state: &SubsystemState,
    omega_t: f64,
) -> Result<SubsystemState> {
    if state.dim() != prop.dim() {
        return Err(Error::DimensionMismatch {
            expected: prop.dim(),
            got: state.dim(),
        });
    }
    match state {
        SubsystemState::Vector(v) => Ok(SubsystemState::Vector(prop.propagate_vector(v, omega_t)?)),
        SubsystemState::Density(rho) => {
            let u = prop.unitary(omega_t);
            Ok(SubsystemState::Density(&u * rho * u.adjoint()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trunc(ncut: usize) -> TruncationSpec {
        TruncationSpec::new(ncut).unwrap()
    }

    #[test]
    fn free_spectrum_is_doubly_degenerate() {
        let p = ModelParams::new(1.3, 0.0, 0.0).unwrap();
        let prop = build_hamiltonian(&p, &trunc(6)).unwrap();
        let e = prop.energies();
        for (k, x) in e.iter().enumerate() {
            assert!((x - 1.3 * (k / 2) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_is_symmetric_and_blocks_split() {
        let p = ModelParams::new(1.0, 0.0, 0.4).unwrap();
        let h = hamiltonian_matrix(&p, 10);
        assert_eq!((&h - h.transpose()).amax(), 0.0);
        let prop = build_hamiltonian(&p, &trunc(10)).unwrap();
        assert_eq!(prop.sector_count(), 2);
        let q = ModelParams::new(1.0, 0.3, 0.4).unwrap();
        assert_eq!(build_hamiltonian(&q, &trunc(10)).unwrap().sector_count(), 1);
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        for omega0 in [0.0, 0.7] {
            let p = ModelParams::new(1.0, omega0, 0.5).unwrap();
            let prop = build_hamiltonian(&p, &trunc(30)).unwrap();
            let v = prop.eigenvector_matrix();
            let err = (v.transpose() * &v - DMatrix::identity(v.nrows(), v.nrows())).amax();
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn group_property_of_unitaries() {
        let p = ModelParams::new(1.0, 0.4, 0.6).unwrap();
        let prop = build_hamiltonian(&p, &trunc(15)).unwrap();
        let (a, b) = (0.7, 1.9);
        let lhs = prop.unitary(a) * prop.unitary(b);
        let rhs = prop.unitary(a + b);
        let err = (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
        let id = prop.unitary(0.0);
        let err = (id - DMatrix::identity(prop.dim(), prop.dim()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn prepared_evolution_matches_dense_unitary() {
        let p = ModelParams::new(2.0, 0.3, 0.8).unwrap();
        let prop = build_hamiltonian(&p, &trunc(12)).unwrap();
        let d = prop.dim();
        let x = DMatrix::from_fn(d, 3, |r, c| {
            Complex64::new((r * 7 + c) as f64 % 5.0, (r + 3 * c) as f64 % 3.0)
        });
        let prepared = prop.prepare(&x).unwrap();
        let y = prop.evolve_prepared(&prepared, 1.7);
        let y_dense = prop.unitary(1.7) * &x;
        let err = (y - y_dense).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-11, "{err}");
    }

    #[test]
    fn density_and_vector_propagation_agree() {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        let prop = build_hamiltonian(&p, &trunc(20)).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 21];
        amps[1] = Complex64::new(1.0, 0.0);
        let psi = SubsystemState::product(Spin::Down, &amps);
        let SubsystemState::Vector(v) = &psi else {
            unreachable!()
        };
        let rho = SubsystemState::Density(v * v.adjoint());
        let SubsystemState::Vector(pv) = propagate_state(&prop, &psi, 2.1).unwrap() else {
            unreachable!()
        };
        let SubsystemState::Density(pr) = propagate_state(&prop, &rho, 2.1).unwrap() else {
            unreachable!()
        };
        let err = (&pv * pv.adjoint() - pr)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!((pv.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = ModelParams::degenerate(0.3).unwrap();
        let prop = build_hamiltonian(&p, &trunc(5)).unwrap();
        let bad = SubsystemState::Vector(DVector::zeros(7));
        assert!(matches!(
            propagate_state(&prop, &bad, 1.0),
            Err(Error::DimensionMismatch {
                expected: 12,
                got: 7
            })
        ));
    }

    #[test]
    fn rejects_zero_cutoff() {
        let p = ModelParams::degenerate(0.3).unwrap();
        let t = TruncationSpec {
            ncut: 0,
            tail_tol: 1e-10,
        };
        assert!(build_hamiltonian(&p, &t).is_err());
    }
}
