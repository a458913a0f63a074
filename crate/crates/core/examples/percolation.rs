//! Bond percolation crossing and filtered repeater chains, both seeded.

use gpeps::network::{percolation_sweep, repeater_filter_chain};

fn main() -> gpeps::Result<()> {
    let ps = [0.40, 0.45, 0.50, 0.55, 0.60];
    for (p, e) in ps.iter().zip(percolation_sweep(64, 64, &ps, 2000, 1)?) {
        println!("p = {p:.2}: crossing {:.4} +- {:.4}", e.rate, e.stderr);
    }
    for lambda in [0.5, 0.65, std::f64::consts::FRAC_1_SQRT_2] {
        let s = repeater_filter_chain(lambda, 8, 10_000, 3)?;
        println!(
            "lambda = {lambda:.4}: per-link {:.4}, chain {:.4} (expected {:.4})",
            s.p_link, s.estimate.rate, s.expected
        );
    }
    Ok(())
}
