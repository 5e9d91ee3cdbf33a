use nalgebra::DVector;
use num_complex::Complex64;

use super::TruncationSpec;
use crate::error::{Error, Result};
use crate::model::FieldSpec;
use crate::specialfn::{coherent_fock_amplitudes, thermal_cutoff, thermal_weights};

/// A field state as a weighted set of truncated Fock vectors,
/// `F = Σ_k p_k |f_k⟩⟨f_k|`, plus the probability lost to truncation.
#[derive(Debug, Clone)]
pub struct FieldEnsemble {
    pub components: Vec<(f64, DVector<Complex64>)>,
    pub tail_mass: f64,
}

fn basis_vector(ncut: usize, n: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(ncut + 1);
    v[n] = Complex64::new(1.0, 0.0);
    v
}

/// Expands `field` in the truncated Fock basis.
///
/// Fails when the discarded probability exceeds `trunc.tail_tol`. Weights
/// are not renormalized.
pub fn field_ensemble(field: FieldSpec, trunc: &TruncationSpec) -> Result<FieldEnsemble> {
    field.validate()?;
    let ncut = trunc.ncut;
    let too_much = |tail: f64| Error::Truncation {
        ncut,
        reason: format!(
            "{field} leaves tail mass {tail:e} above the cutoff (tolerance {:e})",
            trunc.tail_tol
        ),
    };
    match field {
        FieldSpec::Vacuum => Ok(FieldEnsemble {
            components: vec![(1.0, basis_vector(ncut, 0))],
            tail_mass: 0.0,
        }),
        FieldSpec::Number(n) => {
            let n = n as usize;
            if n > ncut {
                return Err(too_much(1.0));
            }
            Ok(FieldEnsemble {
                components: vec![(1.0, basis_vector(ncut, n))],
                tail_mass: 0.0,
            })
        }
        FieldSpec::Coherent(alpha) => {
            let (amps, tail) = coherent_fock_amplitudes(alpha, ncut);
            if tail > trunc.tail_tol {
                return Err(too_much(tail));
            }
            Ok(FieldEnsemble {
                components: vec![(1.0, DVector::from_vec(amps))],
                tail_mass: tail,
            })
        }
        FieldSpec::Thermal(nbar) => {
            let keep = thermal_cutoff(nbar, trunc.tail_tol);
            if keep > ncut {
                let w = thermal_weights(nbar, ncut)?;
                return Err(too_much(w.tail_mass));
            }
            let w = thermal_weights(nbar, keep)?;
            let components = w
                .weights
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(n, &p)| (p, basis_vector(ncut, n)))
                .collect();
            Ok(FieldEnsemble {
                components,
                tail_mass: w.tail_mass,
            })
        }
    }
}

/// Fock vector of a pure field.
pub fn pure_field_vector(
    field: FieldSpec,
    trunc: &TruncationSpec,
) -> Result<(DVector<Complex64>, f64)> {
    if !field.is_pure() {
        return Err(Error::Unsupported(format!("{field} is not a pure state")));
    }
    let mut e = field_ensemble(field, trunc)?;
    let (_, v) = e.components.swap_remove(0);
    Ok((v, e.tail_mass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_truncation_is_surfaced() {
        let t = TruncationSpec::new(2).unwrap();
        let err = field_ensemble(FieldSpec::Coherent(Complex64::new(3.0, 0.0)), &t).unwrap_err();
        assert!(matches!(err, Error::Truncation { ncut: 2, .. }));
        let t = TruncationSpec::new(60).unwrap();
        let e = field_ensemble(FieldSpec::Coherent(Complex64::new(3.0, 0.0)), &t).unwrap();
        assert!(e.tail_mass < 1e-10);
    }

    #[test]
    fn number_state_must_fit() {
        let t = TruncationSpec::new(4).unwrap();
        assert!(field_ensemble(FieldSpec::Number(5), &t).is_err());
        let e = field_ensemble(FieldSpec::Number(4), &t).unwrap();
        assert_eq!(e.components[0].1[4], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn thermal_ensemble_respects_tail_tolerance() {
        let t = TruncationSpec::new(80).unwrap();
        let e = field_ensemble(FieldSpec::Thermal(2.0), &t).unwrap();
        assert!(e.tail_mass <= 1e-10);
        let total: f64 = e.components.iter().map(|(p, _)| p).sum();
        assert!((total + e.tail_mass - 1.0).abs() < 1e-13);
        let small = TruncationSpec::new(20).unwrap();
        assert!(field_ensemble(FieldSpec::Thermal(2.0), &small).is_err());
    }

    #[test]
    fn mixed_fields_have_no_pure_vector() {
        let t = TruncationSpec::new(80).unwrap();
        assert!(pure_field_vector(FieldSpec::Thermal(1.0), &t).is_err());
        assert!(pure_field_vector(FieldSpec::Thermal(0.0), &t).is_ok());
    }
}
