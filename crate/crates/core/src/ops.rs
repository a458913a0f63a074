//! Symplectic transformations and Gaussian measurements.
//!
//! Every measurement removes the measured modes and returns the conditional
//! state on the remaining modes, which keep their relative order.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::GaussianState;

const SYMPLECTIC_TOL: f64 = 1e-10;

/// Ancilla squeezing used by [`peps_project`]: the discarded beam-splitter
/// outputs are projected onto an x-squeezed vacuum with this parameter.
pub const PEPS_ANCILLA_SQUEEZING: f64 = 1.0;

/// A real matrix `S` with `S σ Sᵀ = σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix(DMatrix<f64>);

impl SymplecticMatrix {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        let n2 = s.nrows();
        if n2 == 0 || n2 % 2 != 0 || !s.is_square() {
            return Err(Error::invalid(format!("symplectic matrix must be 2N x 2N, got {}x{}", s.nrows(), s.ncols())));
        }
        let defect = symplectic_defect(&s);
        let scale = linalg::max_abs(&s).powi(2).max(1.0);
        if !(defect <= SYMPLECTIC_TOL * scale) {
            return Err(Error::invalid(format!("matrix is not symplectic: defect {defect:.3e}")));
        }
        Ok(SymplecticMatrix(s))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn num_modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn compose(&self, after: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.0.nrows() != after.0.nrows() {
            return Err(Error::invalid("cannot compose symplectic matrices of different size"));
        }
        Ok(SymplecticMatrix(&after.0 * &self.0))
    }

    pub fn inverse(&self) -> SymplecticMatrix {
        // S⁻¹ = -σ Sᵀ σ
        let sig = linalg::symplectic_form(self.num_modes());
        SymplecticMatrix(-(&sig * self.0.transpose() * &sig))
    }
}

/// `max |S σ Sᵀ − σ|`.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let sig = linalg::symplectic_form(s.nrows() / 2);
    linalg::max_abs(&(s * &sig * s.transpose() - &sig))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StandardGate {
    /// Two-mode mixer `a₁ ↦ cos θ a₁ + sin θ a₂`; `θ = π/4` is balanced.
    BeamSplitter { theta: f64 },
    /// Two-mode squeezer; acting on two vacua it prepares the TMSS with the
    /// same `r`.
    TwoModeSqueezer { r: f64 },
    /// `diag(e^r, e^{-r})`.
    SingleModeSqueezer { r: f64 },
    /// Rotation `a ↦ e^{iφ} a`.
    Phase { phi: f64 },
}

pub fn standard_symplectic(kind: StandardGate) -> SymplecticMatrix {
    let m = match kind {
        StandardGate::BeamSplitter { theta } => {
            let (s, c) = theta.sin_cos();
            #[rustfmt::skip]
            let m = DMatrix::from_row_slice(4, 4, &[
                c,   0.0, s,   0.0,
                0.0, c,   0.0, s,
                -s,  0.0, c,   0.0,
                0.0, -s,  0.0, c,
            ]);
            m
        }
        StandardGate::TwoModeSqueezer { r } => {
            let (ch, sh) = (r.cosh(), r.sinh());
            #[rustfmt::skip]
            let m = DMatrix::from_row_slice(4, 4, &[
                ch,  0.0, sh,  0.0,
                0.0, ch,  0.0, -sh,
                sh,  0.0, ch,  0.0,
                0.0, -sh, 0.0, ch,
            ]);
            m
        }
        StandardGate::SingleModeSqueezer { r } => {
            DMatrix::from_diagonal(&DVector::from_vec(vec![r.exp(), (-r).exp()]))
        }
        StandardGate::Phase { phi } => {
            let (s, c) = phi.sin_cos();
            DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
        }
    };
    debug_assert!(m.iter().all(|x| x.is_finite()));
    SymplecticMatrix(m)
}

/// Applies `S` to the listed modes (in the order given).
pub fn apply_symplectic(state: &GaussianState, s: &SymplecticMatrix, modes: &[usize]) -> Result<GaussianState> {
    if s.num_modes() != modes.len() {
        return Err(Error::invalid(format!(
            "{}-mode symplectic applied to {} modes",
            s.num_modes(),
            modes.len()
        )));
    }
    state.check_modes(modes)?;
    let n2 = 2 * state.num_modes();
    let idx = linalg::quadrature_indices(modes);
    let mut full = DMatrix::identity(n2, n2);
    for (i, &ri) in idx.iter().enumerate() {
        for (j, &cj) in idx.iter().enumerate() {
            full[(ri, cj)] = s.matrix()[(i, j)];
        }
    }
    let cov = &full * state.cov() * full.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    let d = &full * state.first_moments();
    GaussianState::new(d, cov)
}

/// A pure Gaussian state onto which some modes are projected.
#[derive(Debug, Clone, PartialEq)]
pub struct PureProjectionTarget {
    gamma: DMatrix<f64>,
    modes: Vec<usize>,
}

impl PureProjectionTarget {
    pub fn new(gamma: DMatrix<f64>, modes: Vec<usize>) -> Result<Self> {
        if gamma.nrows() != 2 * modes.len() {
            return Err(Error::invalid(format!(
                "target covariance is {}x{} but {} modes are projected",
                gamma.nrows(),
                gamma.ncols(),
                modes.len()
            )));
        }
        let diag = GaussianState::from_cov(gamma.clone())?.validate();
        if !diag.pure {
            return Err(Error::invalid(format!(
                "projection target must be a pure state (purity defect {:.3e}{})",
                diag.purity_defect,
                diag.message.map(|m| format!(", {m}")).unwrap_or_default()
            )));
        }
        Ok(PureProjectionTarget { gamma, modes })
    }

    /// Vacuum on every listed mode.
    pub fn vacuum(modes: Vec<usize>) -> Self {
        let n = modes.len();
        PureProjectionTarget {
            gamma: DMatrix::identity(2 * n, 2 * n),
            modes,
        }
    }

    /// Single-mode squeezed vacuum `diag(e^{-2t}, e^{2t})` (x-squeezed for
    /// `t > 0`).
    pub fn squeezed_vacuum(mode: usize, t: f64) -> Self {
        PureProjectionTarget {
            gamma: DMatrix::from_diagonal(&DVector::from_vec(vec![(-2.0 * t).exp(), (2.0 * t).exp()])),
            modes: vec![mode],
        }
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }
}

fn complement(n: usize, removed: &[usize]) -> Vec<usize> {
    (0..n).filter(|m| !removed.contains(m)).collect()
}

/// Conditional state after projecting onto a pure Gaussian target with zero
/// displacement.
pub fn project_pure_gaussian(state: &GaussianState, target: &PureProjectionTarget) -> Result<GaussianState> {
    let zero = DVector::zeros(target.gamma.nrows());
    project_pure_gaussian_with_outcome(state, target, &zero)
}

/// As [`project_pure_gaussian`] with the target displaced to `outcome`.
///
/// `cov' = U − V (W + Γ)⁻¹ Vᵀ`, `d' = d_U − V (W + Γ)⁻¹ (d_W − outcome)`.
pub fn project_pure_gaussian_with_outcome(
    state: &GaussianState,
    target: &PureProjectionTarget,
    outcome: &DVector<f64>,
) -> Result<GaussianState> {
    let modes = target.modes();
    state.check_modes(modes)?;
    if outcome.len() != 2 * modes.len() {
        return Err(Error::invalid("outcome length does not match projected modes"));
    }
    let keep = complement(state.num_modes(), modes);
    if keep.is_empty() {
        return Err(Error::invalid("projection would remove every mode"));
    }
    let (ik, im) = (linalg::quadrature_indices(&keep), linalg::quadrature_indices(modes));
    let cov = state.cov();
    let u = linalg::submatrix(cov, &ik, &ik);
    let v = linalg::submatrix(cov, &ik, &im);
    let w = linalg::submatrix(cov, &im, &im);
    let inv = linalg::checked_inverse(&(w + &target.gamma), modes)?;
    let gain = &v * inv;
    let new_cov = &u - &gain * v.transpose();
    let new_cov = (&new_cov + new_cov.transpose()) * 0.5;
    let d = state.first_moments();
    let dk = linalg::subvector(d, &ik);
    let dm = linalg::subvector(d, &im);
    let new_d = dk - gain * (dm - outcome);
    GaussianState::new(new_d, new_cov)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Ideal homodyne detection with outcome zero.
pub fn homodyne(state: &GaussianState, mode: usize, q: Quadrature) -> Result<GaussianState> {
    homodyne_with_outcome(state, mode, q, 0.0)
}

/// Ideal homodyne detection, the infinite-squeezing limit of a projection:
/// `cov' = A − B (π C π)⁺ Bᵀ`.
pub fn homodyne_with_outcome(state: &GaussianState, mode: usize, q: Quadrature, outcome: f64) -> Result<GaussianState> {
    state.check_modes(&[mode])?;
    let keep = complement(state.num_modes(), &[mode]);
    if keep.is_empty() {
        return Err(Error::invalid("homodyne would remove every mode"));
    }
    let ik = linalg::quadrature_indices(&keep);
    let im = linalg::quadrature_indices(&[mode]);
    let cov = state.cov();
    let a = linalg::submatrix(cov, &ik, &ik);
    let b = linalg::submatrix(cov, &ik, &im);
    let c = linalg::submatrix(cov, &im, &im);
    let mut pi = DMatrix::zeros(2, 2);
    pi[(q.offset(), q.offset())] = 1.0;
    let pinched = linalg::pseudo_inverse(&(&pi * c * &pi));
    let gain = &b * pinched;
    let new_cov = &a - &gain * b.transpose();
    let new_cov = (&new_cov + new_cov.transpose()) * 0.5;
    let d = state.first_moments();
    let mut shift = linalg::subvector(d, &im);
    shift[q.offset()] -= outcome;
    let new_d = linalg::subvector(d, &ik) - gain * shift;
    GaussianState::new(new_d, new_cov)
}

/// Balanced beam splitter on `(a, b)`, then homodyne of p on the first output
/// and of x on the second.
pub fn gaussian_bell_measure(state: &GaussianState, a: usize, b: usize) -> Result<GaussianState> {
    gaussian_bell_measure_with_outcome(state, a, b, (0.0, 0.0))
}

pub fn gaussian_bell_measure_with_outcome(
    state: &GaussianState,
    a: usize,
    b: usize,
    outcome: (f64, f64),
) -> Result<GaussianState> {
    if a == b {
        return Err(Error::invalid("Bell measurement needs two distinct modes"));
    }
    let bs = standard_symplectic(StandardGate::BeamSplitter { theta: FRAC_PI_4 });
    let mixed = apply_symplectic(state, &bs, &[a, b])?;
    let after_a = homodyne_with_outcome(&mixed, a, Quadrature::P, outcome.0)?;
    let b_shifted = if b > a { b - 1 } else { b };
    homodyne_with_outcome(&after_a, b_shifted, Quadrature::X, outcome.1)
}

/// Merges the virtual modes `modes` into a single physical mode.
///
/// A beam-splitter cascade with `cos θ_k = √(k/(k+1))` routes the symmetric
/// combination `Σ a_j / √N` into the first listed mode; the remaining outputs
/// are projected onto x-squeezed vacua with [`PEPS_ANCILLA_SQUEEZING`]. The
/// physical mode is placed at position `out_index` among the surviving modes.
/// Outcomes only displace first moments, so the map is deterministic up to a
/// local displacement.
pub fn peps_project(state: &GaussianState, modes: &[usize], out_index: usize) -> Result<GaussianState> {
    if modes.len() < 2 {
        return Err(Error::invalid(format!("PEPS projection needs at least 2 modes, got {}", modes.len())));
    }
    state.check_modes(modes)?;
    let mut s = state.clone();
    let head = modes[0];
    for (k, &m) in modes.iter().enumerate().skip(1) {
        let theta = (k as f64 / (k as f64 + 1.0)).sqrt().acos();
        let bs = standard_symplectic(StandardGate::BeamSplitter { theta });
        s = apply_symplectic(&s, &bs, &[head, m])?;
    }
    // Project discarded outputs, highest index first so lower indices stay put.
    let mut discard: Vec<usize> = modes[1..].to_vec();
    discard.sort_unstable_by(|a, b| b.cmp(a));
    let mut head_pos = head;
    for m in discard {
        let target = PureProjectionTarget::squeezed_vacuum(m, PEPS_ANCILLA_SQUEEZING);
        s = project_pure_gaussian(&s, &target)?;
        if m < head_pos {
            head_pos -= 1;
        }
    }
    let n = s.num_modes();
    if out_index >= n {
        return Err(Error::invalid(format!("out_index {out_index} out of range for {n} output modes")));
    }
    let mut order: Vec<usize> = (0..n).filter(|&m| m != head_pos).collect();
    order.insert(out_index, head_pos);
    s.permute_modes(&order)
}
