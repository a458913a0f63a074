//! Repeated entanglement swapping: F(k+1) = f(F(k), r_I) decays exponentially.

use gpeps::entanglement::{chain_decay_f, swap_bound_f};
use gpeps::SqueezeParam;

fn main() -> gpeps::Result<()> {
    let one = SqueezeParam::new(1.0)?;
    println!("f(1, 1) = {:.16}", swap_bound_f(one, one).r());

    let rep = chain_decay_f(one, 40)?;
    for k in [0, 1, 2, 5, 10, 20, 40] {
        println!("F({k:2}) = {:.6e}", rep.values[k]);
    }
    println!(
        "largest ratio {:.6} < Q = {:.6} < 1, asymptotic ratio tanh r = {:.6}",
        rep.q_empirical, rep.ratio_bound_q, rep.asymptotic_ratio
    );
    if let Some(fit) = &rep.fit {
        println!("fit on k in {:?}: c = {:.4}, xi = {:.4}, rms residual {:.2e}", fit.window, fit.c, fit.xi, fit.residual);
    }
    Ok(())
}
