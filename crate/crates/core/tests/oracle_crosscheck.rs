use std::f64::consts::PI;

use degjc_core::closedform::{
    appendix_a_propagate, esd_concurrence_closed, single_qubit_coherence, two_qubit_offdiagonal,
    vacuum_single_field_purity,
};
use degjc_core::entanglement::concurrence;
use degjc_core::oracle::{
    build_hamiltonian, concurrence_trace, conditional_maps, evolve_four_party, field_field_reduced,
    propagate_state, qubit_pair_trace, two_qubit_reduced, SubsystemState,
};
use degjc_core::specialfn::coherent_fock_amplitudes;
use degjc_core::{
    make_bell, make_esd_mixture, BellState, FieldSpec, ModelParams, QubitBasis, Spin,
    TruncationSpec,
};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn propagator(beta: f64, ncut: usize) -> (degjc_core::SubsystemPropagator, TruncationSpec) {
    let t = TruncationSpec::new(ncut).unwrap();
    (
        build_hamiltonian(&ModelParams::degenerate(beta).unwrap(), &t).unwrap(),
        t,
    )
}

fn ground_shifted(beta: f64, ncut: usize) -> Vec<f64> {
    let (p, _) = propagator(beta, ncut);
    let low = p.low_spectrum(10);
    low.iter().map(|e| e - low[0]).collect()
}

#[test]
fn low_spectrum_is_doubly_degenerate_ladder() {
    for beta in [0.25, 0.5, 1.0] {
        for ncut in [40, 60] {
            let e = ground_shifted(beta, ncut);
            for (k, v) in e.iter().enumerate() {
                assert!(
                    (v - (k / 2) as f64).abs() < 1e-8,
                    "beta {beta}, ncut {ncut}: E{k} = {v}"
                );
            }
        }
    }
}

#[test]
fn low_spectrum_converges_under_doubling() {
    let (a, _) = propagator(0.5, 40);
    let (b, _) = propagator(0.5, 80);
    for (x, y) in a.low_spectrum(10).iter().zip(b.low_spectrum(10)) {
        assert!((x - y).abs() <= 1e-10);
    }
}

#[test]
fn free_oscillator_spectrum() {
    let (p, _) = propagator(0.0, 12);
    let e = p.energies();
    for (k, v) in e.iter().enumerate() {
        assert!((v - (k / 2) as f64).abs() < 1e-12);
    }
}

fn coherent_vector(alpha: Complex64, ncut: usize) -> Vec<Complex64> {
    coherent_fock_amplitudes(alpha, ncut).0
}

fn appendix_a_overlap(
    alpha: Complex64,
    spin: Spin,
    beta: f64,
    omega_t: f64,
    ncut: usize,
) -> Complex64 {
    let (p, _) = propagator(beta, ncut);
    let start = SubsystemState::product(spin, &coherent_vector(alpha, ncut));
    let SubsystemState::Vector(out) = propagate_state(&p, &start, omega_t).unwrap() else {
        panic!("vector in, vector out");
    };
    let analytic = appendix_a_propagate(alpha, spin, beta, omega_t);
    // The oracle Hamiltonian carries no constant shift.
    let phase = analytic.phase * Complex64::from_polar(1.0, beta * beta * omega_t);
    let target = SubsystemState::product(spin, &coherent_vector(analytic.amplitude, ncut));
    let SubsystemState::Vector(target) = target else {
        unreachable!()
    };
    let target: DVector<Complex64> = target * phase;
    target.dotc(&out)
}

#[test]
fn appendix_a_example_points() {
    for spin in Spin::BOTH {
        let ov = appendix_a_overlap(c(0.4, 0.0), spin, 0.3, 1.7, 50);
        assert!(
            1.0 - ov.norm_sqr() <= 1e-8,
            "{spin:?}: fidelity {}",
            ov.norm_sqr()
        );
        assert!((ov - 1.0).norm() <= 1e-8, "{spin:?}: overlap {ov}");
    }
}

#[test]
fn appendix_a_random_triples_match_with_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..16 {
        let alpha = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let beta = rng.random_range(0.0..0.8);
        let wt = rng.random_range(0.0..2.0 * PI);
        for spin in Spin::BOTH {
            let ov = appendix_a_overlap(alpha, spin, beta, wt, 70);
            assert!(1.0 - ov.norm_sqr() <= 1e-8);
            assert!(
                (ov - 1.0).norm() <= 1e-8,
                "alpha {alpha}, beta {beta}, wt {wt}, {spin:?}: {ov}"
            );
        }
    }
}

#[test]
fn norm_survives_ten_thousand_steps() {
    let (p, _) = propagator(0.4, 40);
    let mut v = match SubsystemState::product(Spin::Up, &coherent_vector(c(0.5, 0.2), 40)) {
        SubsystemState::Vector(v) => v.normalize(),
        _ => unreachable!(),
    };
    let norm0 = v.norm();
    for _ in 0..10_000 {
        v = p.propagate_vector(&v, 0.01).unwrap();
    }
    assert!((v.norm() - norm0).abs() <= 1e-10);
}

#[test]
fn sigma_x_expectation_is_conserved() {
    let ncut = 40;
    let (p, _) = propagator(0.6, ncut);
    let n1 = ncut + 1;
    let f = coherent_vector(c(0.3, -0.4), ncut);
    let mut v = DVector::zeros(2 * n1);
    for n in 0..n1 {
        v[n] = f[n] * 0.6;
        v[n1 + n] = f[n] * c(0.0, 0.8);
    }
    let sx = |v: &DVector<Complex64>| -> f64 {
        (0..n1)
            .map(|n| v[n].norm_sqr() - v[n1 + n].norm_sqr())
            .sum()
    };
    let s0 = sx(&v);
    for wt in [0.3, 1.9, 4.4, 9.0] {
        let w = p.propagate_vector(&v, wt).unwrap();
        assert!((sx(&w) - s0).abs() <= 1e-10);
    }
}

#[test]
fn density_and_vector_propagation_agree() {
    let (p, _) = propagator(0.3, 30);
    let state = SubsystemState::product(Spin::Down, &coherent_vector(c(0.2, 0.1), 30));
    let SubsystemState::Vector(v) = &state else {
        unreachable!()
    };
    let rho = SubsystemState::Density(v * v.adjoint());
    let SubsystemState::Vector(w) = propagate_state(&p, &state, 2.3).unwrap() else {
        unreachable!()
    };
    let SubsystemState::Density(r) = propagate_state(&p, &rho, 2.3).unwrap() else {
        unreachable!()
    };
    assert!((r - &w * w.adjoint()).norm() < 1e-11);
}

#[test]
fn quasi_degenerate_parameters_are_accepted() {
    let t = TruncationSpec::new(30).unwrap();
    let params = ModelParams::new(1.0, 0.4, 0.3).unwrap();
    let p = build_hamiltonian(&params, &t).unwrap();
    assert_eq!(p.sector_count(), 1);
    let u = p.unitary(1.3);
    let id = &u * u.adjoint();
    for i in 0..id.nrows() {
        for j in 0..id.ncols() {
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((id[(i, j)] - e).norm() < 1e-10);
        }
    }
}

#[test]
fn maps_at_time_zero_are_projectors() {
    let (p, t) = propagator(0.4, 40);
    for field in [
        FieldSpec::Vacuum,
        FieldSpec::Number(3),
        FieldSpec::Thermal(0.5),
        FieldSpec::Coherent(c(1.0, 0.0)),
    ] {
        let m = conditional_maps(&p, field, &t, 0.0).unwrap();
        for i in Spin::BOTH {
            for k in Spin::BOTH {
                let mik = m.get(i, k);
                for a in 0..2 {
                    for b in 0..2 {
                        let e = if a == i.index() && b == k.index() {
                            1.0 - m.tail_mass
                        } else {
                            0.0
                        };
                        assert!((mik[(a, b)] - e).norm() < 1e-10, "{field}");
                    }
                }
            }
        }
    }
}

#[test]
fn map_structure() {
    let (p, t) = propagator(0.5, 50);
    for wt in [0.0, 0.9, 2.5, PI, 5.0] {
        let m = conditional_maps(&p, FieldSpec::Thermal(0.7), &t, wt).unwrap();
        let uu = m.get(Spin::Up, Spin::Up);
        let dd = m.get(Spin::Down, Spin::Down);
        assert!((uu - uu.adjoint()).norm() < 1e-12);
        assert!(
            (m.get(Spin::Up, Spin::Down) - m.get(Spin::Down, Spin::Up).adjoint()).norm() < 1e-12
        );
        // Qubit-diagonal entries stay where they started.
        assert!((uu[(0, 0)].re - (1.0 - m.tail_mass)).abs() < 1e-10);
        assert!((dd[(1, 1)].re - (1.0 - m.tail_mass)).abs() < 1e-10);
        assert!(uu[(1, 1)].norm() < 1e-10);
    }
}

#[test]
fn coherence_matches_closed_form_for_coherent_field() {
    let (p, t) = propagator(0.3, 40);
    let m = conditional_maps(&p, FieldSpec::Coherent(c(1.0, 0.0)), &t, PI).unwrap();
    let oracle = m.get(Spin::Up, Spin::Down)[(0, 1)];
    let closed = single_qubit_coherence(c(0.5, 0.0), FieldSpec::Coherent(c(1.0, 0.0)), 0.3, PI)
        .unwrap()
        * 2.0;
    assert!((oracle - closed).norm() <= 1e-8, "{oracle} vs {closed}");
}

#[test]
fn coherence_matches_closed_form_for_thermal_field() {
    let (p, t) = propagator(0.3, 60);
    let m = conditional_maps(&p, FieldSpec::Thermal(1.0), &t, PI).unwrap();
    assert!(m.tail_mass <= 1e-10);
    let oracle = m.get(Spin::Up, Spin::Down)[(0, 1)];
    let closed =
        single_qubit_coherence(c(0.5, 0.0), FieldSpec::Thermal(1.0), 0.3, PI).unwrap() * 2.0;
    assert!((oracle - closed).norm() <= 1e-7, "{oracle} vs {closed}");
}

#[test]
fn coherence_matches_closed_form_over_time() {
    let fields = [
        FieldSpec::Vacuum,
        FieldSpec::Coherent(c(0.7, -0.4)),
        FieldSpec::Number(2),
        FieldSpec::Thermal(1.0),
    ];
    let (p, t) = propagator(0.3, 60);
    for field in fields {
        for k in 0..=12 {
            let wt = 2.0 * PI * k as f64 / 12.0;
            let m = conditional_maps(&p, field, &t, wt).unwrap();
            let oracle = m.get(Spin::Up, Spin::Down)[(0, 1)] / (1.0 - m.tail_mass);
            let closed = single_qubit_coherence(c(0.5, 0.0), field, 0.3, wt).unwrap() * 2.0;
            assert!(
                (oracle - closed).norm() <= 1e-8,
                "{field} at {wt}: {oracle} vs {closed}"
            );
        }
    }
}

#[test]
fn vacuum_corner_matches_closed_form() {
    let (p, t) = propagator(0.45, 40);
    let bell = make_bell(BellState::PhiPlus, QubitBasis::SigmaX);
    for wt in [0.0, 0.4, 1.3, PI, 4.0, 5.9] {
        let m = conditional_maps(&p, FieldSpec::Vacuum, &t, wt).unwrap();
        let q = two_qubit_reduced(&m, &m, &bell).unwrap();
        let closed =
            two_qubit_offdiagonal(BellState::PhiPlus, FieldSpec::Vacuum, 0.45, wt).unwrap();
        assert!((q.rho()[(0, 3)] - closed).norm() <= 1e-9);
    }
}

#[test]
fn every_bell_corner_matches_closed_form() {
    let field = FieldSpec::Coherent(c(1.0, 0.5));
    let (p, t) = propagator(0.5, 60);
    for bell in BellState::ALL {
        let init = make_bell(bell, QubitBasis::SigmaZ);
        for wt in [0.5, 2.0, 3.7] {
            let m = conditional_maps(&p, field, &t, wt).unwrap();
            let q = two_qubit_reduced(&m, &m, &init).unwrap();
            let closed = two_qubit_offdiagonal(bell, field, 0.5, wt).unwrap();
            let (r, col) = match bell {
                BellState::PhiPlus | BellState::PsiPlus => (0, 3),
                BellState::PhiMinus | BellState::PsiMinus => (1, 2),
            };
            assert!(
                (q.rho()[(r, col)] - closed).norm() <= 1e-9,
                "{bell} at {wt}"
            );
        }
    }
}

#[test]
fn two_qubit_diagonal_is_constant() {
    let (p, t) = propagator(0.5, 60);
    let init = make_esd_mixture();
    let times: Vec<f64> = (0..20).map(|k| 0.33 * k as f64).collect();
    let qs = qubit_pair_trace(&p, FieldSpec::Thermal(1.0), &init, &t, &times).unwrap();
    for q in &qs {
        for i in 0..4 {
            assert!((q.rho()[(i, i)] - init.rho()[(i, i)]).norm() <= 1e-10);
        }
    }
}

#[test]
fn esd_mixture_concurrence_matches_derived_formula() {
    let (p, t) = propagator(0.5, 70);
    let times: Vec<f64> = (0..=64).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
    let oracle =
        concurrence_trace(&p, FieldSpec::Thermal(2.0), &make_esd_mixture(), &t, &times).unwrap();
    for (wt, co) in times.iter().zip(oracle) {
        let closed = esd_concurrence_closed(0.5, 2.0, *wt).unwrap();
        assert!((co - closed).abs() <= 1e-7, "{wt}: {co} vs {closed}");
    }
}

#[test]
fn revival_at_full_period() {
    let (p, t) = propagator(0.5, 60);
    let bell = make_bell(BellState::PsiPlus, QubitBasis::SigmaZ);
    for field in [
        FieldSpec::Vacuum,
        FieldSpec::Number(5),
        FieldSpec::Thermal(2.0),
        FieldSpec::Coherent(c(1.0, 0.5)),
    ] {
        let m = conditional_maps(&p, field, &t, 2.0 * PI).unwrap();
        let q = two_qubit_reduced(&m, &m, &bell).unwrap();
        assert!((concurrence(&q).value - 1.0).abs() <= 1e-7, "{field}");
    }
}

#[test]
fn vacuum_fields_stay_separable() {
    let (p, t) = propagator(0.75, 60);
    let fp = field_field_reduced(&p, BellState::PhiPlus, FieldSpec::Vacuum, &t, PI).unwrap();
    assert!(fp.negativity().unwrap() <= 1e-9);
    let s = evolve_four_party(&p, BellState::PhiPlus, FieldSpec::Vacuum, &t, PI).unwrap();
    assert!((s.qubit_a_purity() - 0.5).abs() < 1e-12);
    let expected = vacuum_single_field_purity(0.75, PI);
    assert!((expected - (0.5 + 0.5 * (-9.0f64).exp())).abs() < 1e-15);
    assert!((s.field_a_purity() - expected).abs() < 1e-10);
    assert!((s.qubit_pair_purity() - (0.5 + 0.5 * (-18.0f64).exp())).abs() < 1e-10);
}
