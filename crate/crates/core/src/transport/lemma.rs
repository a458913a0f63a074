//! Gap in the superadditivity of the smallest eigenvalue for 2×2 PSD pairs.
//!
//! For PSD `A, B` with `a = ‖A‖`, `b = ‖B‖` and `x = ‖A^{1/2}B^{1/2}‖²`,
//! `‖A+B‖ ≤ ½[(a+b) + √((a−b)² + 4x)]`. In two dimensions
//! `λ₂ = tr − λ₁`, so
//!
//! `λ₂(A+B) − λ₂(A) − λ₂(B) ≥ δ = 2(ab − x) / [(a+b) + √((a−b)² + 4x)]`.
//!
//! `δ > 0` exactly when `c = x/(ab) < 1`. Commuting pairs whose top
//! eigenvectors coincide have `c = 1`; commuting pairs with opposite ordering
//! (`diag(1,0)`, `diag(0,1)`) have `c = 0` and a strictly positive gap.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, sqrt_psd, C64};

/// `δ` is reported as zero once `1 − c` drops below this.
pub const ALIGNED_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma4Gap {
    pub delta: f64,
    /// `‖A^{1/2}B^{1/2}‖² / (‖A‖‖B‖)`, 1 when either matrix vanishes.
    pub c: f64,
}

fn check_psd(m: &DMatrix<C64>, name: &str) -> Result<f64> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::invalid(format!("{name} must be 2x2")));
    }
    let scale = m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())).max(1.0);
    let herm = (m - m.adjoint()).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if !(herm <= PSD_TOL * scale) {
        return Err(Error::invalid(format!("{name} is not Hermitian (defect {herm:.3e})")));
    }
    let ev = hermitian_eigenvalues(m);
    if ev[0] < -PSD_TOL * scale {
        return Err(Error::invalid(format!("{name} is not PSD (eigenvalue {:.3e})", ev[0])));
    }
    Ok(ev[1].max(0.0))
}

pub fn lemma4_delta(a_mat: &DMatrix<C64>, b_mat: &DMatrix<C64>) -> Result<Lemma4Gap> {
    let a = check_psd(a_mat, "A")?;
    let b = check_psd(b_mat, "B")?;
    if a == 0.0 || b == 0.0 {
        return Ok(Lemma4Gap { delta: 0.0, c: 1.0 });
    }
    let ra = sqrt_psd(a_mat);
    let x = hermitian_eigenvalues(&(&ra * b_mat * &ra))[1].clamp(0.0, a * b);
    let c = x / (a * b);
    let delta = if 1.0 - c <= ALIGNED_TOL {
        0.0
    } else {
        2.0 * (a * b - x) / ((a + b) + ((a - b).powi(2) + 4.0 * x).sqrt())
    };
    Ok(Lemma4Gap { delta, c })
}
