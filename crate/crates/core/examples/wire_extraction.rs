//! Kraus maps of Gaussian wires and the flat-spectrum check.

use gpeps::fock::two_mode_squeezer;
use gpeps::transport::{beamsplitter_wire, flat_spectrum_test, slab_wire, transport_prob_exact, wire_kraus_extract};

fn main() -> gpeps::Result<()> {
    for r in [0.3, 0.5, 0.8] {
        let rep = flat_spectrum_test(&two_mode_squeezer(r, 20), 20)?;
        println!(
            "squeezer r = {r}: top spectrum {:?}, min gap {:.3e}, trace {:.12}",
            &rep.spectrum[..4],
            rep.min_gap,
            rep.trace
        );
    }

    let (layout, u) = beamsplitter_wire(0.6, 3)?;
    let rep = wire_kraus_extract(&layout, &u, None, 1e-6)?;
    println!("beam-splitter wire: map defects {:?}", rep.defects);
    let tr = transport_prob_exact(&rep.ensemble, 10)?;
    println!("  p_N = {:?}", tr.probabilities);
    if let Some(fit) = tr.fit {
        println!("  xi = {:.4}", fit.xi);
    }

    let (layout, u) = slab_wire(2, 2, 0.6, 3)?;
    let rep = wire_kraus_extract(&layout, &u, None, 1e-6)?;
    println!(
        "2x2 slab: {} maps, defects {:?}, leakage {:.3e}",
        rep.maps.len(),
        rep.defects,
        rep.leakage
    );
    Ok(())
}
