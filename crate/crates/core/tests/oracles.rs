//! Reference values checked against independent computations: closed forms
//! evaluated by hand, a second code path, or the truncated number basis.

use std::f64::consts::FRAC_PI_4;

use approx::assert_abs_diff_eq;
use gpeps::entanglement::{
    chain_decay_f, log_negativity, partial_transpose_cov, swap_bound_f, symplectic_spectrum, Bipartition,
};
use gpeps::fock::{fock_log_negativity, fock_tmss};
use gpeps::network::{graph_distance, partition_along_path, BondGraph};
use gpeps::ops::{
    apply_symplectic, homodyne, peps_project, project_pure_gaussian, standard_symplectic, PureProjectionTarget,
    Quadrature, StandardGate,
};
use gpeps::transport::{damping_pair, decay_rate_nu, random_ensemble, validate_ensemble, TransportCase};
use gpeps::{GaussianState, SqueezeParam};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sp(r: f64) -> SqueezeParam {
    SqueezeParam::new(r).unwrap()
}

fn cut() -> Bipartition {
    Bipartition::new(&[0], 2).unwrap()
}

#[test]
fn reduced_tmss_is_thermal() {
    let half = GaussianState::tmss(sp(2.0)).unwrap().partial_trace(&[0]).unwrap();
    assert!(half.validate().valid && !half.is_pure());
    assert_abs_diff_eq!(half.symplectic_eigenvalues().unwrap()[0], 4.0_f64.cosh(), epsilon = 1e-9);
    let r = 0.7_f64;
    let kept = GaussianState::tmss(sp(r)).unwrap().partial_trace(&[1]).unwrap();
    assert_abs_diff_eq!(*kept.cov(), DMatrix::identity(2, 2) * (2.0 * r).cosh(), epsilon = 1e-14);
}

#[test]
fn tmss_is_symmetric_under_mode_exchange() {
    let st = GaussianState::tmss(sp(0.9)).unwrap();
    assert_eq!(st.permute_modes(&[1, 0]).unwrap().cov(), st.cov());
}

#[test]
fn squeezer_on_vacua_prepares_tmss() {
    let r = 0.65;
    let out = apply_symplectic(
        &GaussianState::vacuum(2).unwrap(),
        &standard_symplectic(StandardGate::TwoModeSqueezer { r }),
        &[0, 1],
    )
    .unwrap();
    assert_abs_diff_eq!(*out.cov(), *GaussianState::tmss(sp(r)).unwrap().cov(), epsilon = 1e-13);
}

#[test]
fn vacuum_projection_by_hand() {
    let r = 0.8_f64;
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let out = project_pure_gaussian(&GaussianState::tmss(sp(r)).unwrap(), &PureProjectionTarget::vacuum(vec![1]))
        .unwrap();
    let want = c - s * s / (c + 1.0);
    assert_abs_diff_eq!(out.cov()[(0, 0)], want, epsilon = 1e-12);
    assert_abs_diff_eq!(out.cov()[(1, 1)], want, epsilon = 1e-12);
    assert!(out.validate().pure);
}

#[test]
fn homodyne_is_the_infinite_squeezing_limit() {
    let r = 0.6_f64;
    let st = GaussianState::tmss(sp(r)).unwrap();
    let hom = homodyne(&st, 1, Quadrature::X).unwrap();
    let c = (2.0 * r).cosh();
    assert_abs_diff_eq!(hom.cov()[(0, 0)], 1.0 / c, epsilon = 1e-12);
    assert_abs_diff_eq!(hom.cov()[(1, 1)], c, epsilon = 1e-12);
    assert!(hom.validate().pure);
    let finite = project_pure_gaussian(&st, &PureProjectionTarget::squeezed_vacuum(1, 10.0)).unwrap();
    assert_abs_diff_eq!(*finite.cov(), *hom.cov(), epsilon = 1e-6);
}

#[test]
fn partial_transpose_spectrum() {
    let r = 0.4_f64;
    let pt = partial_transpose_cov(GaussianState::tmss(sp(r)).unwrap().cov(), &cut());
    let mut nu = symplectic_spectrum(&pt).unwrap();
    nu.sort_by(f64::total_cmp);
    assert_abs_diff_eq!(nu[0], (-2.0 * r).exp(), epsilon = 1e-12);
    assert_abs_diff_eq!(nu[1], (2.0 * r).exp(), epsilon = 1e-12);
}

#[test]
fn negativity_agrees_with_number_basis() {
    for r in [0.2_f64, 0.5, 0.8, 1.0] {
        let lambda = r.tanh();
        let cm = log_negativity(&GaussianState::tmss(sp(r)).unwrap(), &cut()).unwrap();
        let fock = fock_log_negativity(&fock_tmss(lambda, 60).unwrap(), &cut()).unwrap();
        assert_abs_diff_eq!(cm, 2.0 * r, epsilon = 1e-12);
        assert_abs_diff_eq!(fock, ((1.0 + lambda) / (1.0 - lambda)).ln(), epsilon = 1e-6);
    }
}

#[test]
fn truncation_defect_is_the_geometric_tail() {
    let v = fock_tmss(0.5, 20).unwrap();
    assert_abs_diff_eq!(v.norm_defect(), 0.5_f64.powi(40), epsilon = 1e-15);
}

#[test]
fn swap_values() {
    // Direct textbook evaluation at (1, 1).
    let c = 2.0_f64.cosh();
    let want = 0.5 * ((1.0 + c * c) / (2.0 * c)).acosh();
    assert_abs_diff_eq!(swap_bound_f(sp(1.0), sp(1.0)).r(), want, epsilon = 1e-15);
    let rep = chain_decay_f(sp(1.0), 60).unwrap();
    assert_abs_diff_eq!(rep.values[1], 0.66255, epsilon = 1e-4);
    assert_abs_diff_eq!(rep.values[2], 0.47443, epsilon = 1e-4);
    let a = rep.fit_window(5, 25).unwrap().xi;
    let b = rep.fit_window(10, 50).unwrap().xi;
    assert!((a - b).abs() / b < 0.05, "{a} vs {b}");
}

#[test]
fn peps_projection_shapes_a_chain() {
    let r = 0.9;
    let bonds = GaussianState::tmss(sp(r)).unwrap().tensor(&GaussianState::tmss(sp(r)).unwrap());
    let out = peps_project(&bonds, &[1, 2], 1).unwrap();
    assert_eq!(out.num_modes(), 3);
    assert!(out.validate().valid);
    assert!(peps_project(&bonds, &[1], 1).is_err());
}

#[test]
fn grid_distance_and_partition() {
    let g = BondGraph::grid(5, 5, sp(1.0)).unwrap();
    assert_eq!(graph_distance(&g, 0, 24).unwrap().distance, Some(8));
    let g3 = BondGraph::grid(3, 3, sp(1.0)).unwrap();
    let part = partition_along_path(&g3, 0, 8).unwrap();
    part.verify(&g3).unwrap();
    let mut all: Vec<usize> = part.regions.iter().flatten().copied().collect();
    all.sort();
    assert_eq!(all, (0..9).collect::<Vec<_>>());
}

#[test]
fn damping_pair_rate_is_cos_squared() {
    let beta = 0.5_f64;
    let nu = decay_rate_nu(&damping_pair(beta), 6).unwrap();
    assert_abs_diff_eq!(nu.empirical, beta.cos().powi(2), epsilon = 1e-12);
    assert_eq!(nu.case, TransportCase::Commuting);
    assert_eq!(validate_ensemble(&damping_pair(FRAC_PI_4)).case, TransportCase::Commuting);
}

#[test]
fn random_ensembles_do_not_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let e = random_ensemble(2, 3, &mut rng).unwrap();
        let d = validate_ensemble(&e);
        assert_eq!(d.case, TransportCase::NonCommuting);
        assert!(d.max_commutator > 1e-8);
    }
}
