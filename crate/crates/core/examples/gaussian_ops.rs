//! Symplectic gates, homodyne detection, Bell measurements and the PEPS
//! projection at the covariance-matrix level.

use gpeps::entanglement::{log_negativity, swap_bound_f, tmss_normal_form, Bipartition};
use gpeps::ops::{
    apply_symplectic, gaussian_bell_measure, homodyne, peps_project, standard_symplectic, Quadrature, StandardGate,
};
use gpeps::{GaussianState, SqueezeParam};

fn main() -> gpeps::Result<()> {
    let (r1, r2) = (SqueezeParam::new(1.0)?, SqueezeParam::new(0.6)?);

    // A B1 | B2 C: measure the middle modes.
    let chain = GaussianState::tmss(r1)?.tensor(&GaussianState::tmss(r2)?);
    let swapped = gaussian_bell_measure(&chain, 1, 2)?;
    let got = tmss_normal_form(&swapped, &Bipartition::new(&[0], 2)?)?[0].r();
    println!("swap of r = 1.0 and 0.6: CM {got:.12}, f(r1, r2) {:.12}", swap_bound_f(r1, r2).r());

    // Homodyne on half a TMSS leaves a squeezed single mode.
    let cond = homodyne(&GaussianState::tmss(r1)?, 1, Quadrature::X)?;
    println!("after x-homodyne: cov = {:?}", cond.cov().as_slice());

    // A beam splitter moves squeezing between modes.
    let sq = apply_symplectic(
        &GaussianState::vacuum(2)?,
        &standard_symplectic(StandardGate::SingleModeSqueezer { r: 0.5 }),
        &[0],
    )?;
    let mixed = apply_symplectic(&sq, &standard_symplectic(StandardGate::BeamSplitter { theta: 0.7 }), &[0, 1])?;
    let en = log_negativity(&mixed, &Bipartition::new(&[0], 2)?)?;
    println!("squeezed vacuum through a beam splitter: log-negativity {en:.6}");

    // Vertex with two virtual modes, each bonded to an outside partner.
    let bonds = GaussianState::tmss(r1)?.tensor(&GaussianState::tmss(r1)?);
    let vertex = peps_project(&bonds.permute_modes(&[0, 1, 2, 3])?, &[1, 2], 1)?;
    println!("after the PEPS projection: {} modes, pure = {}", vertex.num_modes(), vertex.is_pure());
    Ok(())
}
