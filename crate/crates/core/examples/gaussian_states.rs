//! Covariance-matrix states: build, validate, reduce, serialize.

use gpeps::entanglement::{log_negativity, tmss_normal_form, Bipartition};
use gpeps::{GaussianState, SqueezeParam};

fn main() -> gpeps::Result<()> {
    let r = SqueezeParam::new(0.8)?;
    let tmss = GaussianState::tmss(r)?;
    let diag = tmss.validate();
    println!("TMSS r = {}: valid = {}, pure = {}", r.r(), diag.valid, diag.pure);
    println!("symplectic eigenvalues: {:?}", tmss.symplectic_eigenvalues()?);

    let half = tmss.partial_trace(&[0])?;
    let nu = half.symplectic_eigenvalues()?[0];
    println!("reduced mode is thermal with nu = {nu:.6} (cosh 2r = {:.6})", (2.0 * r.r()).cosh());

    let part = Bipartition::new(&[0], 2)?;
    println!("log-negativity {:.6} (2r = {:.6})", log_negativity(&tmss, &part)?, 2.0 * r.r());

    // Hide the pair among vacua and recover it from the normal form.
    let big = GaussianState::vacuum(1)?.tensor(&tmss).permute_modes(&[1, 0, 2])?;
    let nf = tmss_normal_form(&big, &Bipartition::new(&[0], 3)?)?;
    println!("normal form squeezings: {:?}", nf.iter().map(|s| s.r()).collect::<Vec<_>>());

    let json = tmss.to_json();
    let back = GaussianState::from_json(&json)?;
    println!("JSON round trip is bit-exact: {}", back.cov() == tmss.cov());
    Ok(())
}
