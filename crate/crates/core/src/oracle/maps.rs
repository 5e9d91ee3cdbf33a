use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;

use super::fields::{field_ensemble, FieldEnsemble};
use super::propagator::{PreparedInputs, SubsystemPropagator};
use super::TruncationSpec;
use crate::error::Result;
use crate::model::{kron2, FieldSpec, QubitBasis, QubitPairState, Spin};

/// `M_ik(t) = Tr_field[U (|i⟩⟨k| ⊗ F) U†]` for `i, k ∈ {↑, ↓}`, each a 2×2
/// operator on the qubit in the σx basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemConditionalMap {
    maps: [[Matrix2<Complex64>; 2]; 2],
    pub tail_mass: f64,
}

impl SubsystemConditionalMap {
    pub fn get(&self, i: Spin, k: Spin) -> &Matrix2<Complex64> {
        &self.maps[i.index()][k.index()]
    }
}

/// How [`ConditionalMapper`] evaluates the maps at each time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapStrategy {
    /// Propagate every Fock component of the field, `O(d²·K)` per time.
    Propagate,
    /// Contract precomputed eigenbasis weights with phases, `O(d²)` per time.
    Spectral,
}

/// Largest number of stored eigenbasis weights for the spectral strategy.
const SPECTRAL_ENTRY_LIMIT: usize = 64 << 20;

/// `M_ik[a,b](t) += Σ_lm g_lm e^{−i(E_l − E_m)t}` with `l` in one sector and
/// `m` in another.
#[derive(Debug)]
struct SpectralTerm {
    i: usize,
    k: usize,
    a: usize,
    b: usize,
    e_l: DVector<f64>,
    e_m: DVector<f64>,
    g: DMatrix<Complex64>,
}

#[derive(Debug)]
enum Plan {
    Propagate {
        weights: Vec<f64>,
        prepared: PreparedInputs,
    },
    Spectral(Vec<SpectralTerm>),
}

/// Evolves one field state, expanded in Fock components, under a fixed
/// propagator at arbitrary times.
#[derive(Debug)]
pub struct ConditionalMapper<'a> {
    prop: &'a SubsystemPropagator,
    plan: Plan,
    tail_mass: f64,
}

/// Rows of each sector's eigenvectors belonging to qubit state `a`, as an
/// `(ncut+1) × |sector|` matrix, or `None` if the sector has no such rows.
fn qubit_rows(prop: &SubsystemPropagator, a: usize) -> Vec<Option<DMatrix<f64>>> {
    let n1 = prop.ncut() + 1;
    prop.sectors()
        .iter()
        .map(|s| {
            let mut r = DMatrix::zeros(n1, s.indices.len());
            let mut any = false;
            for (row, &g) in s.indices.iter().enumerate() {
                if g / n1 == a {
                    any = true;
                    r.row_mut(g % n1).copy_from(&s.vectors.row(row));
                }
            }
            any.then_some(r)
        })
        .collect()
}

fn spectral_terms(
    prop: &SubsystemPropagator,
    weights: &[f64],
    prepared: &PreparedInputs,
) -> Vec<SpectralTerm> {
    let sectors = prop.sectors();
    let k_count = weights.len();
    // W^i_s: eigen-coordinates of |i⟩ ⊗ |f_c⟩ in sector s, scaled by √p_c.
    let coords = |s: usize, i: usize| -> Option<(DMatrix<f64>, DMatrix<f64>)> {
        let (cols, w_re, w_im) = &prepared.parts[s];
        let m = sectors[s].indices.len();
        let mut re = DMatrix::zeros(m, k_count);
        let mut im = DMatrix::zeros(m, k_count);
        let mut any = false;
        for (j, &col) in cols.iter().enumerate() {
            if col % 2 == i {
                any = true;
                let c = col / 2;
                let w = weights[c].sqrt();
                re.column_mut(c).copy_from(&(w_re.column(j) * w));
                im.column_mut(c).copy_from(&(w_im.column(j) * w));
            }
        }
        any.then_some((re, im))
    };
    let rows = [qubit_rows(prop, 0), qubit_rows(prop, 1)];
    let mut terms = Vec::new();
    for i in 0..2 {
        for k in 0..2 {
            for s1 in 0..sectors.len() {
                let Some((r1, i1)) = coords(s1, i) else {
                    continue;
                };
                for s2 in 0..sectors.len() {
                    let Some((r2, i2)) = coords(s2, k) else {
                        continue;
                    };
                    // A = W1 W2†
                    let mut a_re = &r1 * r2.transpose();
                    let mut a_im = -(&r1 * i2.transpose());
                    if i1.amax() > 0.0 || i2.amax() > 0.0 {
                        a_re += &i1 * i2.transpose();
                        a_im += &i1 * r2.transpose();
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            let (Some(ra), Some(rb)) = (&rows[a][s1], &rows[b][s2]) else {
                                continue;
                            };
                            // B[m, l] = Σ_n V2[(b,n), m] V1[(a,n), l]; stored transposed.
                            let bt = ra.transpose() * rb;
                            let g = DMatrix::from_fn(bt.nrows(), bt.ncols(), |l, m| {
                                Complex64::new(a_re[(l, m)], a_im[(l, m)]) * bt[(l, m)]
                            });
                            terms.push(SpectralTerm {
                                i,
                                k,
                                a,
                                b,
                                e_l: sectors[s1].energies.clone(),
                                e_m: sectors[s2].energies.clone(),
                                g,
                            });
                        }
                    }
                }
            }
        }
    }
    terms
}

impl<'a> ConditionalMapper<'a> {
    /// Picks the spectral strategy for mixed fields when its storage fits.
    pub fn new(
        prop: &'a SubsystemPropagator,
        field: FieldSpec,
        trunc: &TruncationSpec,
    ) -> Result<Self> {
        let strategy = if field.is_pure() || Self::spectral_entries(prop) > SPECTRAL_ENTRY_LIMIT {
            MapStrategy::Propagate
        } else {
            MapStrategy::Spectral
        };
        Self::with_strategy(prop, field, trunc, strategy)
    }

    fn spectral_entries(prop: &SubsystemPropagator) -> usize {
        let total: usize = prop.sectors().iter().map(|s| s.indices.len()).sum();
        16 * total * total / prop.sector_count().max(1)
    }

    pub fn with_strategy(
        prop: &'a SubsystemPropagator,
        field: FieldSpec,
        trunc: &TruncationSpec,
        strategy: MapStrategy,
    ) -> Result<Self> {
        let trunc = TruncationSpec {
            ncut: prop.ncut(),
            tail_tol: trunc.tail_tol,
        };
        let FieldEnsemble {
            components,
            tail_mass,
        } = field_ensemble(field, &trunc)?;
        let n1 = prop.ncut() + 1;
        // Column 2c + s holds |s⟩ ⊗ |f_c⟩.
        let mut inputs = DMatrix::zeros(prop.dim(), 2 * components.len());
        for (c, (_, f)) in components.iter().enumerate() {
            for s in Spin::BOTH {
                for n in 0..n1 {
                    inputs[(s.index() * n1 + n, 2 * c + s.index())] = f[n];
                }
            }
        }
        let prepared = prop.prepare(&inputs)?;
        let weights: Vec<f64> = components.iter().map(|(p, _)| *p).collect();
        let plan = match strategy {
            MapStrategy::Propagate => Plan::Propagate { weights, prepared },
            MapStrategy::Spectral => Plan::Spectral(spectral_terms(prop, &weights, &prepared)),
        };
        Ok(Self {
            prop,
            plan,
            tail_mass,
        })
    }

    pub fn strategy(&self) -> MapStrategy {
        match self.plan {
            Plan::Propagate { .. } => MapStrategy::Propagate,
            Plan::Spectral(_) => MapStrategy::Spectral,
        }
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn at(&self, omega_t: f64) -> SubsystemConditionalMap {
        let zero = Complex64::new(0.0, 0.0);
        let mut maps = [[Matrix2::from_element(zero); 2]; 2];
        match &self.plan {
            Plan::Propagate { weights, prepared } => {
                let y = self.prop.evolve_prepared(prepared, omega_t);
                let n1 = self.prop.ncut() + 1;
                for (c, &p) in weights.iter().enumerate() {
                    for i in 0..2 {
                        for k in 0..2 {
                            let m = &mut maps[i][k];
                            for a in 0..2 {
                                for b in 0..2 {
                                    let mut acc = zero;
                                    for n in 0..n1 {
                                        acc += y[(a * n1 + n, 2 * c + i)]
                                            * y[(b * n1 + n, 2 * c + k)].conj();
                                    }
                                    m[(a, b)] += acc * p;
                                }
                            }
                        }
                    }
                }
            }
            Plan::Spectral(terms) => {
                let t = self.prop.time(omega_t);
                let phases = |e: &DVector<f64>, sign: f64| {
                    e.map(|x| Complex64::from_polar(1.0, sign * x * t))
                };
                for term in terms {
                    let u = phases(&term.e_l, -1.0);
                    let v = phases(&term.e_m, 1.0);
                    let gv = &term.g * v;
                    maps[term.i][term.k][(term.a, term.b)] += u.dot(&gv);
                }
            }
        }
        SubsystemConditionalMap {
            maps,
            tail_mass: self.tail_mass,
        }
    }
}

/// Conditional maps of one subsystem at a single time.
pub fn conditional_maps(
    prop: &SubsystemPropagator,
    field: FieldSpec,
    trunc: &TruncationSpec,
    omega_t: f64,
) -> Result<SubsystemConditionalMap> {
    Ok(ConditionalMapper::new(prop, field, trunc)?.at(omega_t))
}

/// Reduced two-qubit state at time t for the initial product
/// `ρ_AB ⊗ F_a ⊗ F_b`.
///
/// Because the two subsystem propagators commute,
/// `Q(t) = Σ ρ_{ij,kl} M^A_ik ⊗ M^B_jl`. The result is renormalized to unit
/// trace; the discarded truncation mass is carried by the maps.
pub fn two_qubit_reduced(
    map_a: &SubsystemConditionalMap,
    map_b: &SubsystemConditionalMap,
    initial: &QubitPairState,
) -> Result<QubitPairState> {
    let rho0 = initial.in_basis(QubitBasis::SigmaX);
    let rho0 = rho0.rho();
    let mut q = Matrix4::zeros();
    for i in Spin::BOTH {
        for j in Spin::BOTH {
            for k in Spin::BOTH {
                for l in Spin::BOTH {
                    let c = rho0[(2 * i.index() + j.index(), 2 * k.index() + l.index())];
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    q += kron2(map_a.get(i, k), map_b.get(j, l)) * c;
                }
            }
        }
    }
    let q = (q + q.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = q.trace().re;
    QubitPairState::new(q / Complex64::new(tr, 0.0), QubitBasis::SigmaX)
}
