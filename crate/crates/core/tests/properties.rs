//! Property tests for the invariants of each layer.

use gpeps::entanglement::{chain_decay_f, log_negativity, swap_bound_f, Bipartition};
use gpeps::fock::{filter_success_law, optimal_conversion_probability};
use gpeps::linalg::{hermitian_eigenvalues, random_symplectic, random_unitary, C64};
use gpeps::ops::{apply_symplectic, project_pure_gaussian, symplectic_defect, PureProjectionTarget, SymplecticMatrix};
use gpeps::transport::{lemma4_delta, random_ensemble, transport_prob_exact, validate_ensemble};
use gpeps::{GaussianState, SqueezeParam};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sp(r: f64) -> SqueezeParam {
    SqueezeParam::new(r).unwrap()
}

/// Textbook form, used as an independent check on the stable evaluation.
fn naive_f(r1: f64, r2: f64) -> f64 {
    let (c1, c2) = ((2.0 * r1).cosh(), (2.0 * r2).cosh());
    0.5 * ((1.0 + c1 * c2) / (c1 + c2)).acosh()
}

fn two_tmss(r1: f64, r2: f64) -> GaussianState {
    GaussianState::tmss(sp(r1)).unwrap().tensor(&GaussianState::tmss(sp(r2)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_symplectics_preserve_the_form(seed in any::<u64>(), n in 1usize..5, sq in 0.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_symplectic(n, sq, &mut rng);
        prop_assert!(symplectic_defect(&s) < 1e-9 * s.amax().powi(2).max(1.0));
    }

    #[test]
    fn global_symplectic_keeps_spectrum_and_purity(seed in any::<u64>(), r in 0.0..1.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = SymplecticMatrix::new(random_symplectic(2, 1.0, &mut rng)).unwrap();
        let out = apply_symplectic(&GaussianState::tmss(sp(r)).unwrap(), &s, &[0, 1]).unwrap();
        prop_assert!(out.validate().valid);
        for nu in out.symplectic_eigenvalues().unwrap() {
            prop_assert!((nu - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn local_symplectics_leave_negativity_alone(seed in any::<u64>(), r in 0.0..1.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tmss = GaussianState::tmss(sp(r)).unwrap();
        let part = Bipartition::new(&[0], 2).unwrap();
        let s = SymplecticMatrix::new(random_symplectic(1, 1.0, &mut rng)).unwrap();
        let out = apply_symplectic(&tmss, &s, &[1]).unwrap();
        prop_assert!((log_negativity(&tmss, &part).unwrap() - 2.0 * r).abs() < 1e-9);
        prop_assert!((log_negativity(&out, &part).unwrap() - 2.0 * r).abs() < 1e-8);
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>(), r in 0.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = SymplecticMatrix::new(random_symplectic(2, 0.7, &mut rng)).unwrap();
        let st = apply_symplectic(&GaussianState::tmss(sp(r)).unwrap(), &s, &[0, 1]).unwrap();
        let back = GaussianState::from_json(&st.to_json()).unwrap();
        prop_assert_eq!(back.cov(), st.cov());
    }

    #[test]
    fn swap_map_is_symmetric_monotone_and_lossy(r1 in 0.001..3.0f64, r2 in 0.001..3.0f64, dr in 0.001..0.5f64) {
        let f = swap_bound_f(sp(r1), sp(r2)).r();
        prop_assert_eq!(f, swap_bound_f(sp(r2), sp(r1)).r());
        prop_assert!(f < r1.min(r2));
        prop_assert!(swap_bound_f(sp(r1 + dr), sp(r2)).r() > f);
        prop_assert!((f - naive_f(r1, r2)).abs() < 1e-10);
    }

    #[test]
    fn chain_ratios_stay_below_q(r in 0.05..2.5f64) {
        let rep = chain_decay_f(sp(r), 30).unwrap();
        prop_assert!(rep.ratio_bound_q < 1.0);
        prop_assert!(rep.ratios.iter().all(|&q| q <= rep.ratio_bound_q));
    }

    #[test]
    fn schur_complement_ignores_first_moments(
        r1 in 0.1..1.5f64, r2 in 0.1..1.5f64, t in -2.0..2.0f64,
        d in proptest::collection::vec(-3.0..3.0f64, 8),
    ) {
        let st = two_tmss(r1, r2);
        let shifted = st.clone().with_first_moments(DVector::from_vec(d)).unwrap();
        let target = PureProjectionTarget::squeezed_vacuum(1, t);
        let a = project_pure_gaussian(&st, &target).unwrap();
        let b = project_pure_gaussian(&shifted, &target).unwrap();
        prop_assert!((a.cov() - b.cov()).amax() < 1e-12);
        prop_assert!(a.validate().purity_defect < 1e-6);
    }

    #[test]
    fn pure_projections_of_pure_states_are_pure(seed in any::<u64>(), r1 in 0.1..1.5f64, r2 in 0.1..1.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_symplectic(2, 1.5, &mut rng);
        let target = PureProjectionTarget::new(&s * s.transpose(), vec![1, 2]).unwrap();
        let out = project_pure_gaussian(&two_tmss(r1, r2), &target).unwrap();
        prop_assert!(out.validate().purity_defect < 1e-6);
    }

    #[test]
    fn eigenvalue_gap_lower_bound(entries in proptest::collection::vec(-2.0..2.0f64, 16)) {
        let m = |o: usize| DMatrix::from_fn(2, 2, |i, j| C64::new(entries[o + 2 * i + j], entries[o + 4 + 2 * i + j]));
        let (ga, gb) = (m(0), m(8));
        let (a, b) = (&ga * ga.adjoint(), &gb * gb.adjoint());
        let gap = lemma4_delta(&a, &b).unwrap();
        prop_assert!(gap.delta >= 0.0 && gap.c <= 1.0 + 1e-12);
        let lhs = hermitian_eigenvalues(&(&a + &b))[0];
        let rhs = hermitian_eigenvalues(&a)[0] + hermitian_eigenvalues(&b)[0] + gap.delta;
        prop_assert!(lhs >= rhs - 1e-9 * (1.0 + a.norm() + b.norm()));
    }

    #[test]
    fn filter_law_matches_majorization(lambda in 0.0..0.99f64) {
        let l2 = lambda * lambda;
        let schmidt: Vec<f64> = (0..4000).map(|n| (1.0 - l2) * l2.powi(n)).collect();
        let p = optimal_conversion_probability(&schmidt, &[0.5, 0.5]);
        let law = filter_success_law(lambda).unwrap();
        prop_assert!((p - law).abs() < 1e-9);
        prop_assert!((law - (2.0 * l2).min(1.0)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transport_is_relabeling_invariant(seed in any::<u64>(), ops in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_ensemble(2, ops, &mut rng).unwrap();
        let mut perm: Vec<usize> = (0..ops).collect();
        perm.rotate_left(1);
        let p = transport_prob_exact(&e, 5).unwrap().probabilities;
        let q = transport_prob_exact(&e.permuted(&perm).unwrap(), 5).unwrap().probabilities;
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn mixing_outcomes_keeps_completeness(seed in any::<u64>(), ops in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_ensemble(2, ops, &mut rng).unwrap();
        let u = random_unitary(ops, &mut rng);
        prop_assert!(validate_ensemble(&e.mixed(&u).unwrap()).completeness_defect < 1e-10);
    }

    #[test]
    fn transport_probabilities_never_increase(seed in any::<u64>(), ops in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = transport_prob_exact(&random_ensemble(2, ops, &mut rng).unwrap(), 6).unwrap();
        let mut prev = 1.0;
        for &p in &rep.probabilities {
            prop_assert!((0.0..=prev * (1.0 + 1e-12)).contains(&p));
            prev = p;
        }
    }
}
