mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use normcell::acf::time_acf_closed_form;
use normcell::dynamics::{energy, evolve, momentum_trajectory_coefficients, PhaseState};
use normcell::spectral::{
    build_spectrum, coupling_matrix, dense_eigenvalues, dense_propagator, mode_transform, propagator_matrix,
    Direction, PropagatorKind,
};
use normcell::{AssemblyConfig, Spectrum, TauGrid, TrigSeries, TrigTerm};

fn symmetric_spectrum(max_half: usize) -> impl Strategy<Value = Spectrum> {
    (1..=max_half).prop_flat_map(|n| {
        prop::collection::vec(0.0f64..4.0, n + 1).prop_map(move |half| {
            let mut w = vec![0.0; 2 * n + 1];
            for (k, x) in half.iter().enumerate() {
                w[n + k] = *x;
                w[n - k] = *x;
            }
            Spectrum::from_frequencies(w).unwrap()
        })
    })
}

fn state_for(n: usize) -> impl Strategy<Value = PhaseState> {
    let size = 2 * n + 1;
    (
        prop::collection::vec(-2.0f64..2.0, size),
        prop::collection::vec(-2.0f64..2.0, size),
    )
        .prop_map(|(p, q)| PhaseState::new(p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coupling_matrix_symmetric_with_squared_spectrum(s in symmetric_spectrum(16)) {
        let a = coupling_matrix(&s).unwrap();
        prop_assert!((&a - a.transpose()).amax() < 1e-12);
        let mut expected: Vec<f64> = s.frequencies().iter().map(|w| w * w).collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in dense_eigenvalues(&a).iter().zip(&expected) {
            prop_assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn propagators_match_dense_calculus(s in symmetric_spectrum(16)) {
        let a = coupling_matrix(&s).unwrap();
        for kind in [PropagatorKind::Cos, PropagatorKind::OmegaSin] {
            for t in [0.1, 1.0, 10.0] {
                let err = (propagator_matrix(&s, kind, t).unwrap() - dense_propagator(&a, kind, t).unwrap()).amax();
                prop_assert!(err < 1e-10, "kind {:?} t {} err {}", kind, t, err);
            }
        }
    }

    #[test]
    fn transform_round_trip(n in 1usize..=512, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<Complex64> = (0..2 * n + 1)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let back = mode_transform(&mode_transform(&v, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fast_transform_matches_double_loop(n in 1usize..=40, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<Complex64> = (0..2 * n + 1)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
            .collect();
        let fast = mode_transform(&v, Direction::Forward).unwrap();
        for (a, b) in fast.iter().zip(common::naive_forward(&v)) {
            prop_assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn flow_is_a_semigroup(state in state_for(10), t1 in -20.0f64..20.0, t2 in -20.0f64..20.0) {
        let s = build_spectrum(&AssemblyConfig::tangent(10)).unwrap();
        let direct = evolve(&state, &s, t1 + t2).unwrap();
        let stepped = evolve(&evolve(&state, &s, t1).unwrap(), &s, t2).unwrap();
        for (a, b) in direct.p.iter().zip(&stepped.p).chain(direct.q.iter().zip(&stepped.q)) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn series_and_flow_agree(state in state_for(16), t in 0.0f64..50.0) {
        let s = build_spectrum(&AssemblyConfig::tangent(16)).unwrap();
        let series = momentum_trajectory_coefficients(&state, &s).unwrap();
        let p0 = evolve(&state, &s, t).unwrap().p0();
        prop_assert!((series.evaluate(t) - p0).abs() < 1e-10 * (1.0 + p0.abs()));
    }

    #[test]
    fn closed_form_acf_is_positive_definite(
        terms in prop::collection::btree_map(1u32..10_000, (-3.0f64..3.0, -3.0f64..3.0), 1..30),
        constant in -2.0f64..2.0,
    ) {
        let mut list: Vec<TrigTerm> = terms
            .into_iter()
            .map(|(w, (a, b))| TrigTerm::new(w as f64 * 1e-3, a, b))
            .collect();
        list.push(TrigTerm::new(0.0, constant, 0.0));
        let curve = time_acf_closed_form(&TrigSeries::new(list).unwrap(), TauGrid::default());
        prop_assert!(curve.is_positive_definite(1e-12));
        let unit = curve.unit_at_zero();
        prop_assert_eq!(unit.values[0], 1.0);
    }
}

#[test]
fn energy_conserved_for_large_chains_and_long_times() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for n in [1usize, 64, 1000, 4096] {
        let s = build_spectrum(&AssemblyConfig::tangent(n)).unwrap();
        let size = 2 * n + 1;
        let state = PhaseState::new(
            (0..size).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..size).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let e0 = energy(&state, &s).unwrap();
        for t in [0.5, 17.0, 1000.0] {
            let e = energy(&evolve(&state, &s, t).unwrap(), &s).unwrap();
            assert!((e - e0).abs() / e0 < 1e-10, "N={n} t={t}: {e} vs {e0}");
        }
    }
}
