//! Local filtering of a TMSS into the Bell pair `(|0,0⟩ + |1,1⟩)/√2`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Optimal probability of converting a pure state with Schmidt coefficients
/// `alpha` into one with `beta` by local operations and classical
/// communication: `min_l E_l(α)/E_l(β)` over tails `E_l = Σ_{i≥l}`.
///
/// Both lists are sorted internally. Each distribution is taken to have unit
/// total mass and tails are computed as `1 − head`, so `alpha` may list only
/// its leading coefficients.
pub fn optimal_conversion_probability(alpha: &[f64], beta: &[f64]) -> f64 {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (a, b) = (sorted(alpha), sorted(beta));
    let mut best = 1.0_f64;
    let (mut head_a, mut head_b) = (0.0_f64, 0.0_f64);
    for l in 0..b.len() {
        let tail_b = 1.0 - head_b;
        if tail_b <= 0.0 {
            break;
        }
        best = best.min(((1.0 - head_a) / tail_b).max(0.0));
        head_a += a.get(l).copied().unwrap_or(0.0);
        head_b += b[l];
    }
    best
}

/// Optimal TMSS-to-Bell conversion probability for Schmidt parameter `λ`,
/// from the untruncated spectrum `(1−λ²)λ^{2n}`.
pub fn filter_success_law(lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda must lie in [0, 1), got {lambda}")));
    }
    Ok(optimal_conversion_probability(&[1.0 - lambda * lambda], &[0.5, 0.5]))
}

/// Closed forms the computed law is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterLawCandidates {
    pub lambda: f64,
    pub computed: f64,
    /// `min(1, 2λ²)`.
    pub two_lambda_sq: f64,
    /// `min(1, 2(1−λ²))`.
    pub two_one_minus_lambda_sq: f64,
}

impl FilterLawCandidates {
    pub fn new(lambda: f64) -> Result<Self> {
        Ok(FilterLawCandidates {
            lambda,
            computed: filter_success_law(lambda)?,
            two_lambda_sq: (2.0 * lambda * lambda).min(1.0),
            two_one_minus_lambda_sq: (2.0 * (1.0 - lambda * lambda)).min(1.0),
        })
    }
}

/// Which closed form reproduces the computed law on every sample to `tol`.
pub fn matched_filter_law(lambdas: &[f64], tol: f64) -> Result<Option<&'static str>> {
    let rows: Vec<FilterLawCandidates> = lambdas.iter().map(|&l| FilterLawCandidates::new(l)).collect::<Result<_>>()?;
    if rows.iter().all(|r| (r.computed - r.two_lambda_sq).abs() <= tol) {
        Ok(Some("min(1, 2*lambda^2)"))
    } else if rows.iter().all(|r| (r.computed - r.two_one_minus_lambda_sq).abs() <= tol) {
        Ok(Some("min(1, 2*(1-lambda^2))"))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterReport {
    pub lambda: f64,
    pub cutoff: usize,
    /// Optimum from the untruncated Schmidt spectrum.
    pub p_optimal: f64,
    /// Success probability of the explicit protocol on the truncated state.
    pub p_protocol: f64,
    /// Worst fidelity with the Bell pair over successful branches.
    pub fidelity: f64,
    /// The truncated state already satisfies `α_max ≤ ½`.
    pub deterministic: bool,
    pub kraus_count: usize,
    /// `max |Σ M_k†M_k − 1|` of the full instrument on side A.
    pub completeness_defect: f64,
    pub truncation_gap: f64,
}

/// Splits `a` (with `max a ≤ Σa/2`) into weighted uniform pairs
/// `q (δ_i + δ_j)/2`. Returns `(q, i, j)` triples and the unassigned mass.
fn pair_decomposition(a: &[f64]) -> (Vec<(f64, usize, usize)>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut out = Vec::new();
    for _ in 0..4 * m.len() + 4 {
        let total: f64 = m.iter().sum();
        if total <= 1e-15 {
            break;
        }
        let mut idx: Vec<usize> = (0..m.len()).collect();
        idx.sort_by(|&x, &y| m[y].total_cmp(&m[x]).then(x.cmp(&y)));
        let (i, j) = (idx[0], idx[1]);
        let third = idx.get(2).map(|&k| m[k]).unwrap_or(0.0);
        let x = m[j].min(0.5 * total - third);
        if !(x > 0.0) {
            break;
        }
        m[i] = (m[i] - x).max(0.0);
        m[j] = (m[j] - x).max(0.0);
        out.push((2.0 * x, i, j));
    }
    (out, m)
}

/// Explicit filtering protocol on `√(1−λ²) Σ_{n<cutoff} λⁿ |n,n⟩`.
///
/// If the largest Schmidt coefficient exceeds ½, side A first applies the
/// filter `diag(√x, 1, 1, …)` with `x = (1−α₀)/α₀`. The (renormalized) state
/// is then split into uniform pairs, each realized by the Kraus operator
/// `√(q/2)(|0⟩⟨i| + |1⟩⟨j|) D^{-1/2}`; side B relabels `i, j ↦ 0, 1`.
pub fn filter_to_bell(lambda: f64, cutoff: usize) -> Result<FilterReport> {
    let p_optimal = filter_success_law(lambda)?;
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda must be positive"));
    }
    if cutoff < 2 {
        return Err(Error::invalid("cutoff must be >= 2"));
    }
    let raw: Vec<f64> = (0..cutoff).map(|n| lambda.powi(2 * n as i32)).collect();
    let total: f64 = raw.iter().sum();
    let alpha: Vec<f64> = raw.iter().map(|x| x / total).collect();

    let deterministic = alpha[0] <= 0.5;
    let filter: Vec<f64> = if deterministic {
        vec![1.0; cutoff]
    } else {
        let mut f = vec![1.0; cutoff];
        f[0] = (1.0 - alpha[0]) / alpha[0];
        f
    };
    // Squared amplitudes after the filter (unnormalized) and their total.
    let filtered: Vec<f64> = alpha.iter().zip(&filter).map(|(a, f)| a * f).collect();
    let p_filter: f64 = filtered.iter().sum();
    let alpha2: Vec<f64> = filtered.iter().map(|x| x / p_filter).collect();

    let (pairs, leftover) = pair_decomposition(&alpha2);
    let psi = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(cutoff, alpha.iter().map(|x| x.sqrt())));
    let mut p_protocol = 0.0;
    let mut fidelity = 1.0_f64;
    let mut gram = DMatrix::<f64>::zeros(cutoff, cutoff);
    for &(q, i, j) in &pairs {
        let mut k = DMatrix::<f64>::zeros(2, cutoff);
        let s = (0.5 * q).sqrt();
        k[(0, i)] = s / alpha2[i].sqrt();
        k[(1, j)] = s / alpha2[j].sqrt();
        debug_assert!(alpha2[i] > 0.0 && alpha2[j] > 0.0);
        // Overall Kraus operator on A, including the filter.
        let full = &k * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(cutoff, filter.iter().map(|f| f.sqrt())));
        gram += full.transpose() * &full;
        let out = &full * &psi; // rows: qubit, cols: B levels
        let prob = out.norm_squared();
        let overlap = (out[(0, i)] + out[(1, j)]) / std::f64::consts::SQRT_2;
        p_protocol += prob;
        fidelity = fidelity.min(overlap * overlap / prob);
    }
    // Failure branch of the filter.
    let fail: Vec<f64> = filter.iter().map(|f| 1.0 - f).collect();
    for (n, f) in fail.iter().enumerate() {
        gram[(n, n)] += f;
    }
    // Mass the pair split left behind also counts as failure.
    for (n, rest) in leftover.iter().enumerate() {
        if alpha2[n] > 0.0 {
            gram[(n, n)] += filter[n] * rest / alpha2[n];
        }
    }
    let completeness_defect = (gram - DMatrix::identity(cutoff, cutoff)).amax();
    Ok(FilterReport {
        lambda,
        cutoff,
        p_optimal,
        p_protocol,
        fidelity,
        deterministic,
        kraus_count: pairs.len(),
        completeness_defect,
        truncation_gap: p_optimal - p_protocol,
    })
}
