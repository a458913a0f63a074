//! Gaussian gates on the truncated number basis.
//!
//! Each gate is the exponential of its quadratic generator restricted to the
//! box `0..cutoff` per mode. The restricted generator is anti-Hermitian, so
//! the result is exactly unitary and obeys `U(a)U(b) = U(a+b)`; it agrees with
//! the true gate on states whose support stays clear of the box edge. The
//! generators conserve photon number (beam splitter), photon-number difference
//! (two-mode squeezer) or parity (single-mode squeezer), so the exponentials
//! are built block by block.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::ops::StandardGate;

use super::state::{apply_on_modes, FockVector};

/// `exp(t·G)` for a real tridiagonal chain generator with
/// `G[j+1, j] = w_j = −G[j, j+1]`.
fn chain_exp(t: f64, weights: &[f64]) -> DMatrix<f64> {
    let n = weights.len() + 1;
    let mut g = DMatrix::zeros(n, n);
    for (j, &w) in weights.iter().enumerate() {
        g[(j + 1, j)] = w;
        g[(j, j + 1)] = -w;
    }
    (g * t).exp()
}

/// `exp(θ(a₁†a₂ − a₁a₂†))` on two modes; `a₁ ↦ cos θ a₁ + sin θ a₂`.
pub fn beamsplitter(theta: f64, cutoff: usize) -> DMatrix<C64> {
    let d = cutoff;
    let mut u = DMatrix::zeros(d * d, d * d);
    for total in 0..=2 * (d - 1) {
        let lo = total.saturating_sub(d - 1);
        let hi = total.min(d - 1);
        let weights: Vec<f64> = (lo..hi).map(|k| (((k + 1) * (total - k)) as f64).sqrt()).collect();
        let block = chain_exp(theta, &weights);
        let index = |k: usize| k * d + (total - k);
        for (i, ki) in (lo..=hi).enumerate() {
            for (j, kj) in (lo..=hi).enumerate() {
                u[(index(ki), index(kj))] = C64::new(block[(i, j)], 0.0);
            }
        }
    }
    u
}

/// `exp(r(a†b† − ab))`; maps `|0,0⟩` to a TMSS with `λ = tanh r`.
pub fn two_mode_squeezer(r: f64, cutoff: usize) -> DMatrix<C64> {
    let d = cutoff as isize;
    let mut u = DMatrix::zeros((d * d) as usize, (d * d) as usize);
    for diff in -(d - 1)..d {
        let (s0, s1) = (diff.max(0), (-diff).max(0));
        let len = (d - s0.max(s1)) as usize;
        let weights: Vec<f64> = (0..len - 1)
            .map(|j| (((s0 as usize + j + 1) * (s1 as usize + j + 1)) as f64).sqrt())
            .collect();
        let block = chain_exp(r, &weights);
        let index = |j: usize| (s0 as usize + j) * cutoff + (s1 as usize + j);
        for i in 0..len {
            for j in 0..len {
                u[(index(i), index(j))] = C64::new(block[(i, j)], 0.0);
            }
        }
    }
    u
}

/// `exp(r(a†² − a²)/2)`; stretches x by `e^r`.
pub fn single_mode_squeezer(r: f64, cutoff: usize) -> DMatrix<C64> {
    let mut u = DMatrix::zeros(cutoff, cutoff);
    for parity in 0..2 {
        let levels: Vec<usize> = (parity..cutoff).step_by(2).collect();
        if levels.is_empty() {
            continue;
        }
        let weights: Vec<f64> = levels[..levels.len() - 1]
            .iter()
            .map(|&n| 0.5 * (((n + 1) * (n + 2)) as f64).sqrt())
            .collect();
        let block = chain_exp(r, &weights);
        for (i, &ni) in levels.iter().enumerate() {
            for (j, &nj) in levels.iter().enumerate() {
                u[(ni, nj)] = C64::new(block[(i, j)], 0.0);
            }
        }
    }
    u
}

/// `e^{iφ n}`; `a ↦ e^{iφ} a`.
pub fn phase(phi: f64, cutoff: usize) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_fn(cutoff, |n, _| C64::from_polar(1.0, phi * n as f64)))
}

/// Number-basis counterpart of a phase-space gate, same conventions.
pub fn fock_gate(gate: StandardGate, cutoff: usize) -> DMatrix<C64> {
    match gate {
        StandardGate::BeamSplitter { theta } => beamsplitter(theta, cutoff),
        StandardGate::TwoModeSqueezer { r } => two_mode_squeezer(r, cutoff),
        StandardGate::SingleModeSqueezer { r } => single_mode_squeezer(r, cutoff),
        StandardGate::Phase { phi } => phase(phi, cutoff),
    }
}

/// Lifts a gate on `modes` to the full `num_modes` box.
pub fn embed(u: &DMatrix<C64>, cutoff: usize, num_modes: usize, modes: &[usize]) -> Result<DMatrix<C64>> {
    if u.nrows() != cutoff.pow(modes.len() as u32) || modes.iter().any(|&m| m >= num_modes) {
        return Err(Error::invalid("gate does not fit the requested modes"));
    }
    let dim = cutoff.pow(num_modes as u32);
    let mut full = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let mut e = DVector::zeros(dim);
        e[c] = C64::new(1.0, 0.0);
        full.set_column(c, &apply_on_modes(&e, u, modes, cutoff, num_modes));
    }
    Ok(full)
}

/// `√(1−λ²) Σ_{n<cutoff} λⁿ |n, n⟩`, norm defect `λ^{2·cutoff}`.
pub fn fock_tmss(lambda: f64, cutoff: usize) -> Result<FockVector> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda must lie in [0, 1), got {lambda}")));
    }
    if cutoff < 2 {
        return Err(Error::invalid("cutoff must be >= 2"));
    }
    let mut amps = DVector::zeros(cutoff * cutoff);
    let c = (1.0 - lambda * lambda).sqrt();
    let mut ln = 1.0;
    for n in 0..cutoff {
        amps[n * cutoff + n] = C64::new(c * ln, 0.0);
        ln *= lambda;
    }
    FockVector::new(cutoff, 2, amps, lambda.powi(2 * cutoff as i32))
}

/// Even-level amplitudes of `exp(t(a†² − a²)/2)|0⟩`:
/// `sech(t)^{1/2} tanh(t)^m √((2m)!) / (2^m m!)` for `m = 0..len`
/// (p-squeezed for `t > 0`, x-squeezed for `t < 0`).
pub fn squeezed_vacuum_even(t: f64, len: usize) -> Vec<f64> {
    let th = t.tanh();
    let lsech = -0.5 * t.cosh().ln();
    (0..len)
        .map(|m| {
            let m_f = m as f64;
            // ln(√((2m)!) / (2^m m!)) = ½ lnΓ(2m+1) − m ln 2 − lnΓ(m+1)
            let lc = 0.5 * ln_factorial(2 * m) - m_f * std::f64::consts::LN_2 - ln_factorial(m);
            let mag = (lsech + lc).exp() * th.abs().powi(m as i32);
            if th < 0.0 && m % 2 == 1 {
                -mag
            } else {
                mag
            }
        })
        .collect()
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}
