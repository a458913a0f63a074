//! Truncated number-basis cross-checks of the phase-space results.

use gpeps::entanglement::swap_bound_f;
use gpeps::fock::{filter_to_bell, fock_bell_swap, fock_tmss};
use gpeps::{GaussianState, SqueezeParam};

fn main() -> gpeps::Result<()> {
    for r in [0.3, 0.8, 1.0] {
        let sp = SqueezeParam::new(r)?;
        let fock = fock_tmss(sp.lambda(), 40)?.covariance()?;
        let diff = (fock.cov() - GaussianState::tmss(sp)?.cov()).amax();
        println!("TMSS r = {r}: max |cov_fock - cov_cm| = {diff:.2e}");
    }

    let one = SqueezeParam::new(1.0)?;
    let rep = fock_bell_swap(one.lambda(), one.lambda(), 40)?;
    println!(
        "Bell swap negativities {:?} extrapolate to {:.8}; CM gives {:.8}",
        rep.negativities,
        rep.extrapolated,
        2.0 * swap_bound_f(one, one).r()
    );

    for lambda in [0.3, 0.6, 0.8] {
        let f = filter_to_bell(lambda, 40)?;
        println!(
            "filter lambda = {lambda}: optimum {:.6}, protocol {:.6}, fidelity {:.12}",
            f.p_optimal, f.p_protocol, f.fidelity
        );
    }
    Ok(())
}
