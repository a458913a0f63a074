//! Transport probabilities of Kraus wires and the decay constant nu.

use gpeps::linalg::C64;
use gpeps::transport::{
    damping_pair, decay_rate_nu, lemma4_delta, random_ensemble, transport_prob_exact, validate_ensemble,
};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gpeps::Result<()> {
    let damping = damping_pair(std::f64::consts::FRAC_PI_4);
    let rep = transport_prob_exact(&damping, 6)?;
    println!("damping pair: p_N = {:?}", rep.probabilities);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let e = random_ensemble(2, 3, &mut rng)?;
    let diag = validate_ensemble(&e);
    println!("random ensemble: case {:?}, max commutator {:.3e}", diag.case, diag.max_commutator);
    let rep = transport_prob_exact(&e, 8)?;
    for (n, (p, q)) in rep.probabilities.iter().zip(&rep.ratios).enumerate() {
        println!("  N = {}: p = {p:.6e}, ratio {q:.6}", n + 1);
    }
    let nu = decay_rate_nu(&e, 8)?;
    println!("  nu empirical {:.6}, certificate {:.6}", nu.empirical, nu.certificate);

    let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]).map(|x| C64::new(x, 0.0));
    let b = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]).map(|x| C64::new(x, 0.0));
    let gap = lemma4_delta(&a, &b)?;
    println!("eigenvalue gap for two projectors at 45 degrees: delta = {:.6}, c = {:.6}", gap.delta, gap.c);
    Ok(())
}
