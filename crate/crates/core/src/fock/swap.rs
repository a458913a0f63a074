//! Entanglement swapping of two TMSS in the number basis.
//!
//! Modes `A B₁ | B₂ C` start in `Σ c_n c'_m |n,n,m,m⟩`. The inner modes pass a
//! balanced beam splitter (exact on each photon-number sector), after which
//! `B₁` is projected onto a p-squeezed and `B₂` onto an x-squeezed vacuum with
//! squeezing `t`. Since the inner state has finite support the projections
//! are exact inner products; only the inputs are truncated. Ideal homodyne is
//! the `t → ∞` limit, reached by polynomial extrapolation in `e^{-2t}`.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::entanglement::Bipartition;
use crate::error::{Error, Result};
use crate::linalg::C64;

use super::gates::squeezed_vacuum_even;
use super::state::FockVector;

/// Approximant squeezings used by [`fock_bell_swap`].
pub const BELL_SWAP_SQUEEZINGS: [f64; 3] = [2.0, 3.0, 4.0];
/// Largest admissible input truncation loss.
pub const BELL_SWAP_BUDGET: f64 = 1e-8;
/// Smallest resolvable post-selection weight.
pub const MIN_POSTSELECTION: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct BellSwapReport {
    pub squeezings: Vec<f64>,
    pub negativities: Vec<f64>,
    /// Weight of the projected outcome at each squeezing.
    pub weights: Vec<f64>,
    /// Extrapolation of the negativity to ideal homodyne detection.
    pub extrapolated: f64,
    /// Normalized Schmidt coefficients of the output at the largest squeezing.
    pub schmidt: Vec<f64>,
    /// `max_k |p_k − (1−μ)μ^k|` with `μ = p₁/p₀`.
    pub geometric_defect: f64,
    pub input_defect: f64,
    #[serde(skip)]
    pub state: FockVector,
}

pub fn fock_bell_swap(lambda1: f64, lambda2: f64, cutoff: usize) -> Result<BellSwapReport> {
    fock_bell_swap_with(lambda1, lambda2, cutoff, &BELL_SWAP_SQUEEZINGS)
}

/// Sector matrix of the beam splitter for `N` photons, basis `|k, N−k⟩`.
fn sector_unitary(total: usize, theta: f64) -> DMatrix<f64> {
    let n = total + 1;
    let mut g = DMatrix::zeros(n, n);
    for k in 0..total {
        let w = (((k + 1) * (total - k)) as f64).sqrt();
        g[(k + 1, k)] = w;
        g[(k, k + 1)] = -w;
    }
    (g * theta).exp()
}

fn output_amplitudes(c1: &[f64], c2: &[f64], sectors: &[DMatrix<f64>], t: f64) -> DMatrix<f64> {
    let d = c1.len();
    let len = d; // even levels 0, 2, …, 2(d−1) cover every sector
    let ev_p = squeezed_vacuum_even(t, len);
    let ev_x = squeezed_vacuum_even(-t, len);
    let amp = |even: &[f64], n: usize| if n % 2 == 0 { even[n / 2] } else { 0.0 };
    DMatrix::from_fn(d, d, |n, m| {
        let total = n + m;
        let u = &sectors[total];
        let k_amp: f64 = (0..=total).map(|k| u[(k, n)] * amp(&ev_p, k) * amp(&ev_x, total - k)).sum();
        c1[n] * c2[m] * k_amp
    })
}

pub fn fock_bell_swap_with(lambda1: f64, lambda2: f64, cutoff: usize, squeezings: &[f64]) -> Result<BellSwapReport> {
    for l in [lambda1, lambda2] {
        if !(0.0..1.0).contains(&l) {
            return Err(Error::invalid(format!("lambda must lie in [0, 1), got {l}")));
        }
    }
    if squeezings.is_empty() || squeezings.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::invalid("need at least one positive approximant squeezing"));
    }
    if cutoff < 2 {
        return Err(Error::invalid("cutoff must be >= 2"));
    }
    let input_defect = lambda1.powi(2 * cutoff as i32) + lambda2.powi(2 * cutoff as i32);
    if input_defect >= BELL_SWAP_BUDGET {
        let worst = lambda1.max(lambda2);
        return Err(Error::Truncation {
            defect: input_defect,
            budget: BELL_SWAP_BUDGET,
            suggested_cutoff: ((BELL_SWAP_BUDGET / 2.0).ln() / (2.0 * worst.ln())).ceil() as usize + 1,
        });
    }
    let coeffs = |l: f64| -> Vec<f64> {
        let c = (1.0 - l * l).sqrt();
        (0..cutoff).map(|n| c * l.powi(n as i32)).collect()
    };
    let (c1, c2) = (coeffs(lambda1), coeffs(lambda2));
    let sectors: Vec<DMatrix<f64>> = (0..=2 * (cutoff - 1)).map(|n| sector_unitary(n, FRAC_PI_4)).collect();

    let part = Bipartition::new(&[0], 2)?;
    let mut negativities = Vec::new();
    let mut weights = Vec::new();
    let mut last = None;
    for &t in squeezings {
        let m = output_amplitudes(&c1, &c2, &sectors, t);
        let w = m.norm_squared();
        if !(w >= MIN_POSTSELECTION) {
            return Err(Error::Unresolvable(w));
        }
        let amps = DVector::from_iterator(cutoff * cutoff, m.transpose().iter().map(|&x| C64::new(x, 0.0)));
        let amps = &amps / C64::new(w.sqrt(), 0.0);
        let state = FockVector::new(cutoff, 2, amps, input_defect.min(1.0))?;
        negativities.push(state.log_negativity_with_budget(&part, BELL_SWAP_BUDGET)?);
        weights.push(w);
        last = Some(state);
    }
    let state = last.expect("at least one squeezing");
    let schmidt = state.schmidt_coefficients(&part)?;
    let geometric_defect = if schmidt.len() > 1 && schmidt[0] > 0.0 {
        let mu = schmidt[1] / schmidt[0];
        schmidt
            .iter()
            .enumerate()
            .map(|(k, p)| (p - (1.0 - mu) * mu.powi(k as i32)).abs())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let hs: Vec<f64> = squeezings.iter().map(|t| (-2.0 * t).exp()).collect();
    Ok(BellSwapReport {
        squeezings: squeezings.to_vec(),
        extrapolated: extrapolate_to_zero(&hs, &negativities),
        negativities,
        weights,
        schmidt,
        geometric_defect,
        input_defect,
        state,
    })
}

/// Value at `h = 0` of the interpolating polynomial through `(h_i, y_i)`.
pub fn extrapolate_to_zero(h: &[f64], y: &[f64]) -> f64 {
    (0..h.len())
        .map(|i| {
            let w: f64 = (0..h.len()).filter(|&j| j != i).map(|j| h[j] / (h[j] - h[i])).product();
            w * y[i]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_is_exact_on_polynomials() {
        let h = [0.1, 0.05, 0.01];
        let y: Vec<f64> = h.iter().map(|x| 2.0 - 3.0 * x + 5.0 * x * x).collect();
        assert!((extrapolate_to_zero(&h, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_partner_gives_product() {
        let rep = fock_bell_swap(0.6, 0.0, 30).unwrap();
        assert!(rep.negativities.iter().all(|&e| e.abs() < 1e-12));
    }

    #[test]
    fn refuses_coarse_truncation() {
        assert!(matches!(fock_bell_swap(0.9, 0.9, 10), Err(Error::Truncation { .. })));
    }

    #[test]
    fn sector_unitaries_are_orthogonal() {
        for n in [0, 1, 5, 20] {
            let u = sector_unitary(n, 0.3);
            assert!((u.transpose() * &u - DMatrix::identity(n + 1, n + 1)).amax() < 1e-12);
        }
    }
}
