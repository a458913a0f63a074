//! Partial transposition, logarithmic negativity and the swap recursion.
//!
//! Under the TMSS convention of [`crate::state`] a two-mode squeezed state
//! with parameter `r` has logarithmic negativity `2r` (natural log).

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{self, DecayFit};
use crate::linalg;
use crate::state::{GaussianState, SqueezeParam};

/// Split of the modes into two nonempty sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    /// `side_a` against its complement in `0..num_modes`.
    pub fn new(side_a: &[usize], num_modes: usize) -> Result<Self> {
        let mut a = side_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != side_a.len() {
            return Err(Error::invalid(format!("duplicate mode in {side_a:?}")));
        }
        if a.iter().any(|&m| m >= num_modes) {
            return Err(Error::invalid(format!("side {side_a:?} out of range for {num_modes} modes")));
        }
        let b: Vec<usize> = (0..num_modes).filter(|m| !a.contains(m)).collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::invalid("both sides of a bipartition must be nonempty"));
        }
        Ok(Bipartition { side_a: a, side_b: b })
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn num_modes(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    fn check(&self, state: &GaussianState) -> Result<()> {
        if self.num_modes() != state.num_modes() {
            return Err(Error::invalid(format!(
                "bipartition covers {} modes, state has {}",
                self.num_modes(),
                state.num_modes()
            )));
        }
        Ok(())
    }
}

/// Flips the sign of every p-quadrature on side A.
pub fn partial_transpose_cov(cov: &DMatrix<f64>, part: &Bipartition) -> DMatrix<f64> {
    let mut out = cov.clone();
    for &m in part.side_a() {
        let p = 2 * m + 1;
        for j in 0..out.ncols() {
            out[(p, j)] = -out[(p, j)];
        }
        for i in 0..out.nrows() {
            out[(i, p)] = -out[(i, p)];
        }
    }
    out
}

/// Symplectic eigenvalues, descending.
pub fn symplectic_spectrum(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    linalg::symplectic_eigenvalues(cov)
}

pub fn log_negativity(state: &GaussianState, part: &Bipartition) -> Result<f64> {
    part.check(state)?;
    let pt = partial_transpose_cov(state.cov(), part);
    let nu = symplectic_spectrum(&pt)?;
    Ok(nu.iter().map(|v| (-v.ln()).max(0.0)).sum())
}

/// Squeezing parameters of the product of TMSS that a pure state is locally
/// equivalent to, descending. One value per mode of the smaller side.
pub fn tmss_normal_form(state: &GaussianState, part: &Bipartition) -> Result<Vec<SqueezeParam>> {
    part.check(state)?;
    let diag = state.validate();
    if !diag.pure {
        return Err(Error::invalid(format!(
            "normal form needs a pure state (purity defect {:.3e})",
            diag.purity_defect
        )));
    }
    let side = if part.side_a().len() <= part.side_b().len() {
        part.side_a()
    } else {
        part.side_b()
    };
    let reduced = state.partial_trace(side)?;
    let nu = reduced.symplectic_eigenvalues()?;
    nu.iter().map(|&v| SqueezeParam::new(0.5 * v.max(1.0).acosh())).collect()
}

/// Output squeezing of a Gaussian Bell measurement on the inner modes of two
/// TMSS: `½ arcosh[(1 + cosh 2r₁ cosh 2r₂)/(cosh 2r₁ + cosh 2r₂)]`.
///
/// Evaluated as `½ arcosh(1 + ε)` with
/// `ε = 4 sinh²r₁ sinh²r₂ / (cosh 2r₁ + cosh 2r₂)`, which keeps full relative
/// precision for small arguments. Arguments are sorted first, so the result is
/// exactly symmetric.
pub fn swap_bound_f(r1: SqueezeParam, r2: SqueezeParam) -> SqueezeParam {
    let (hi, lo) = if r1.r() >= r2.r() { (r1.r(), r2.r()) } else { (r2.r(), r1.r()) };
    if lo == 0.0 {
        return SqueezeParam::zero();
    }
    // ε = (1 − 1/cosh 2hi) · 2 sinh² lo / (1 + cosh 2lo / cosh 2hi)
    let inv_c_hi = 2.0 * (-2.0 * hi).exp() / (1.0 + (-4.0 * hi).exp());
    let ratio = (2.0 * (lo - hi)).exp() * (1.0 + (-4.0 * lo).exp()) / (1.0 + (-4.0 * hi).exp());
    let acosh = if lo > 200.0 {
        // arcosh(1 + ε) = ln 2ε to double precision; sinh lo = e^lo / 2.
        (1.0 - inv_c_hi).ln() + 2.0 * lo - ratio.ln_1p()
    } else {
        let s = lo.sinh();
        let eps = (1.0 - inv_c_hi) * 2.0 * s * s / (1.0 + ratio);
        if eps > 1e150 {
            std::f64::consts::LN_2 + eps.ln()
        } else {
            (eps + (eps * (2.0 + eps)).sqrt()).ln_1p()
        }
    };
    SqueezeParam::new(0.5 * acosh).expect("nonnegative by construction")
}

/// `F(k)` for `k = 0..=k_max` with `F(0) = r_I` and `F(k+1) = f(F(k), r_I)`.
#[derive(Debug, Clone, Serialize)]
pub struct SwapChainReport {
    pub r_initial: f64,
    pub values: Vec<f64>,
    /// `F(k+1)/F(k)` for `k = 0..k_max`.
    pub ratios: Vec<f64>,
    pub q_empirical: f64,
    /// `asinh(tanh r_I · sinh r_I) / r_I`, a strict upper bound on every
    /// ratio (from `sinh g(r) ≤ tanh r_I · sinh r`).
    pub ratio_bound_q: f64,
    /// Asymptotic ratio `tanh r_I`.
    pub asymptotic_ratio: f64,
    /// Fit over the tail `k ∈ [k_max/4, k_max]`.
    pub fit: Option<DecayFit>,
    /// Set when `r_I = 0`: every value vanishes.
    pub degenerate: bool,
}

impl SwapChainReport {
    pub fn fit_window(&self, lo: usize, hi: usize) -> Result<DecayFit> {
        fit::fit_window(&self.values, lo, hi)
    }
}

pub fn chain_decay_f(r_initial: SqueezeParam, k_max: usize) -> Result<SwapChainReport> {
    if k_max < 2 {
        return Err(Error::invalid(format!("k_max must be >= 2, got {k_max}")));
    }
    let ri = r_initial.r();
    let mut values = Vec::with_capacity(k_max + 1);
    let mut cur = r_initial;
    values.push(ri);
    for _ in 0..k_max {
        cur = swap_bound_f(cur, r_initial);
        values.push(cur.r());
    }
    if ri == 0.0 {
        return Ok(SwapChainReport {
            r_initial: ri,
            values,
            ratios: vec![0.0; k_max],
            q_empirical: 0.0,
            ratio_bound_q: 0.0,
            asymptotic_ratio: 0.0,
            fit: None,
            degenerate: true,
        });
    }
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    let q_empirical = ratios.iter().copied().fold(0.0, f64::max);
    let lo = (k_max / 4).min(k_max - 2);
    let fit = fit::fit_window(&values, lo, k_max).ok();
    Ok(SwapChainReport {
        r_initial: ri,
        values,
        ratios,
        q_empirical,
        ratio_bound_q: (ri.tanh() * ri.sinh()).asinh() / ri,
        asymptotic_ratio: ri.tanh(),
        fit,
        degenerate: false,
    })
}
