use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entanglement::Bipartition;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::state::GaussianState;

/// Default norm-defect budget for covariance and negativity evaluations.
pub const FOCK_BUDGET: f64 = 1e-6;

const UNITARY_TOL: f64 = 1e-10;
/// Above this dimension unitarity is checked on random probe vectors instead
/// of forming `U†U`.
const EXACT_UNITARY_CHECK_DIM: usize = 512;

/// Pure state on `num_modes` modes, each truncated to levels `0..cutoff`.
/// Mode 0 is the most significant digit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    num_modes: usize,
    amps: DVector<C64>,
    norm_defect: f64,
}

pub(crate) fn strides(cutoff: usize, num_modes: usize) -> Vec<usize> {
    (0..num_modes).map(|m| cutoff.pow((num_modes - 1 - m) as u32)).collect()
}

fn check_dims(cutoff: usize, num_modes: usize) -> Result<usize> {
    if cutoff < 2 || num_modes == 0 {
        return Err(Error::invalid(format!("need cutoff >= 2 and >= 1 mode, got cutoff {cutoff}, {num_modes} modes")));
    }
    cutoff
        .checked_pow(num_modes as u32)
        .filter(|&d| d <= 1 << 24)
        .ok_or_else(|| Error::invalid(format!("cutoff {cutoff} on {num_modes} modes is too large")))
}

/// Cutoff at which a geometric tail with the observed defect would fall below
/// `budget`.
fn suggest_cutoff(cutoff: usize, defect: f64, budget: f64) -> usize {
    if defect <= 0.0 || defect >= 1.0 {
        return 2 * cutoff;
    }
    (cutoff as f64 * budget.ln() / defect.ln()).ceil() as usize + 1
}

impl FockVector {
    /// Wraps amplitudes; `norm_defect` is the probability known to be lost to
    /// truncation. Amplitudes with norm above one are rejected.
    pub fn new(cutoff: usize, num_modes: usize, amps: DVector<C64>, norm_defect: f64) -> Result<Self> {
        let dim = check_dims(cutoff, num_modes)?;
        if amps.len() != dim {
            return Err(Error::invalid(format!("expected {dim} amplitudes, got {}", amps.len())));
        }
        if amps.norm_squared() > 1.0 + 1e-10 {
            return Err(Error::invalid(format!("amplitude norm² {} exceeds 1", amps.norm_squared())));
        }
        if !(0.0..=1.0).contains(&norm_defect) {
            return Err(Error::invalid(format!("norm defect {norm_defect} outside [0, 1]")));
        }
        Ok(FockVector {
            cutoff,
            num_modes,
            amps,
            norm_defect,
        })
    }

    /// Basis state `|n_0, …, n_{N-1}⟩`.
    pub fn number_state(cutoff: usize, levels: &[usize]) -> Result<Self> {
        let dim = check_dims(cutoff, levels.len())?;
        if levels.iter().any(|&n| n >= cutoff) {
            return Err(Error::invalid(format!("levels {levels:?} exceed cutoff {cutoff}")));
        }
        let st = strides(cutoff, levels.len());
        let idx: usize = levels.iter().zip(&st).map(|(n, s)| n * s).sum();
        let mut amps = DVector::zeros(dim);
        amps[idx] = C64::new(1.0, 0.0);
        Self::new(cutoff, levels.len(), amps, 0.0)
    }

    pub fn vacuum(cutoff: usize, num_modes: usize) -> Result<Self> {
        Self::number_state(cutoff, &vec![0; num_modes])
    }

    /// Coherent state `e^{-|α|²/2} Σ αⁿ/√n! |n⟩`.
    pub fn coherent(alpha: C64, cutoff: usize) -> Result<Self> {
        check_dims(cutoff, 1)?;
        let mut amps = DVector::zeros(cutoff);
        let mut a = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..cutoff {
            amps[n] = a;
            a = a * alpha / ((n + 1) as f64).sqrt();
        }
        let defect = (1.0 - amps.norm_squared()).max(0.0);
        Self::new(cutoff, 1, amps, defect)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_defect(&self) -> f64 {
        self.norm_defect
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn amplitude(&self, levels: &[usize]) -> C64 {
        let st = strides(self.cutoff, self.num_modes);
        self.amps[levels.iter().zip(&st).map(|(n, s)| n * s).sum::<usize>()]
    }

    pub fn tensor(&self, other: &FockVector) -> Result<FockVector> {
        if self.cutoff != other.cutoff {
            return Err(Error::invalid("tensor product needs equal cutoffs"));
        }
        let amps = self.amps.kronecker(&other.amps);
        let defect = 1.0 - (1.0 - self.norm_defect) * (1.0 - other.norm_defect);
        FockVector::new(self.cutoff, self.num_modes + other.num_modes, amps, defect.clamp(0.0, 1.0))
    }

    /// `a_mode |ψ⟩`, exact within the truncated space.
    pub fn lower(&self, mode: usize) -> DVector<C64> {
        lower(&self.amps, self.cutoff, self.num_modes, mode)
    }

    fn check_budget(&self, budget: f64) -> Result<()> {
        if !(self.norm_defect < budget) {
            return Err(Error::Truncation {
                defect: self.norm_defect,
                budget,
                suggested_cutoff: suggest_cutoff(self.cutoff, self.norm_defect, budget),
            });
        }
        Ok(())
    }

    /// First moments and covariance of the renormalized state.
    ///
    /// Uses only lowering-operator moments `⟨a_j⟩`, `⟨a_j a_k⟩`, `⟨a_j† a_k⟩`,
    /// which are exact in the truncated basis.
    pub fn covariance(&self) -> Result<GaussianState> {
        self.check_budget(FOCK_BUDGET)?;
        let norm2 = self.norm_squared();
        if norm2 == 0.0 {
            return Err(Error::invalid("zero vector has no moments"));
        }
        let n = self.num_modes;
        let low: Vec<DVector<C64>> = (0..n).map(|m| self.lower(m)).collect();
        let mean: Vec<C64> = low.iter().map(|l| self.amps.dotc(l) / norm2).collect();
        let nn = DMatrix::from_fn(n, n, |j, k| low[j].dotc(&low[k]) / norm2);
        let mm = DMatrix::from_fn(n, n, |j, k| {
            self.amps.dotc(&lower(&low[k], self.cutoff, n, j)) / norm2
        });
        // R = u a + ū a† with u = 1/√2 (x) or -i/√2 (p).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = |q: usize| if q % 2 == 0 { C64::new(s, 0.0) } else { C64::new(0.0, -s) };
        let d = DVector::from_fn(2 * n, |j, _| 2.0 * (u(j) * mean[j / 2]).re);
        let cov = DMatrix::from_fn(2 * n, 2 * n, |j, k| {
            let (m, l) = (j / 2, k / 2);
            let (uj, uk) = (u(j), u(k));
            let delta = if m == l { 1.0 } else { 0.0 };
            let rr = uj * uk * mm[(m, l)]
                + uj * uk.conj() * (nn[(l, m)] + delta)
                + uj.conj() * uk * nn[(m, l)]
                + uj.conj() * uk.conj() * mm[(m, l)].conj();
            2.0 * rr.re - 2.0 * d[j] * d[k]
        });
        let cov = (&cov + cov.transpose()) * 0.5;
        GaussianState::new(d, cov)
    }

    /// Amplitudes as a matrix with side-A configurations as rows.
    fn bipartite_matrix(&self, part: &Bipartition) -> Result<DMatrix<C64>> {
        if part.num_modes() != self.num_modes {
            return Err(Error::invalid("bipartition does not match the number of modes"));
        }
        let d = self.cutoff;
        let st = strides(d, self.num_modes);
        let (a, b) = (part.side_a(), part.side_b());
        let rows = d.pow(a.len() as u32);
        let cols = d.pow(b.len() as u32);
        let mut m = DMatrix::zeros(rows, cols);
        for (idx, z) in self.amps.iter().enumerate() {
            let digit = |mode: usize| (idx / st[mode]) % d;
            let r = a.iter().fold(0, |acc, &x| acc * d + digit(x));
            let c = b.iter().fold(0, |acc, &x| acc * d + digit(x));
            m[(r, c)] = *z;
        }
        Ok(m)
    }

    /// Schmidt coefficients (normalized, descending).
    pub fn schmidt_coefficients(&self, part: &Bipartition) -> Result<Vec<f64>> {
        let sv = self.bipartite_matrix(part)?.singular_values();
        let norm2 = self.norm_squared();
        let mut p: Vec<f64> = sv.iter().map(|s| s * s / norm2).collect();
        p.sort_by(|x, y| y.total_cmp(x));
        Ok(p)
    }

    /// `ln ‖ρ^{T_A}‖₁ = 2 ln Σ √p_k` of the renormalized state.
    pub fn log_negativity(&self, part: &Bipartition) -> Result<f64> {
        self.log_negativity_with_budget(part, FOCK_BUDGET)
    }

    pub fn log_negativity_with_budget(&self, part: &Bipartition, budget: f64) -> Result<f64> {
        self.check_budget(budget)?;
        let sv = self.bipartite_matrix(part)?.singular_values();
        let norm = self.norm_squared().sqrt();
        Ok((2.0 * (sv.sum() / norm).ln()).max(0.0))
    }

    pub fn density(&self) -> FockDensity {
        FockDensity {
            cutoff: self.cutoff,
            num_modes: self.num_modes,
            rho: &self.amps * self.amps.adjoint(),
        }
    }

    /// Applies a unitary acting on `modes` (first listed mode most
    /// significant). The norm defect is carried over unchanged.
    pub fn apply_unitary(&self, u: &DMatrix<C64>, modes: &[usize]) -> Result<FockVector> {
        let d = self.cutoff;
        let k = modes.len();
        let sub = d.checked_pow(k as u32).unwrap_or(usize::MAX);
        if !u.is_square() || u.nrows() != sub {
            return Err(Error::invalid(format!("unitary is {}x{}, expected {sub}x{sub}", u.nrows(), u.ncols())));
        }
        let mut seen = vec![false; self.num_modes];
        for &m in modes {
            if m >= self.num_modes || std::mem::replace(&mut seen[m], true) {
                return Err(Error::invalid(format!("bad mode list {modes:?}")));
            }
        }
        let defect = unitarity_defect_fast(u);
        if !(defect <= UNITARY_TOL) {
            return Err(Error::invalid(format!("operator is not unitary: defect {defect:.3e}")));
        }
        let out = apply_on_modes(&self.amps, u, modes, d, self.num_modes);
        FockVector::new(d, self.num_modes, out, self.norm_defect)
    }
}

/// `U` on `modes` without any checks.
pub(crate) fn apply_on_modes(
    amps: &DVector<C64>,
    u: &DMatrix<C64>,
    modes: &[usize],
    cutoff: usize,
    num_modes: usize,
) -> DVector<C64> {
    let d = cutoff;
    let k = modes.len();
    let sub = u.nrows();
    let st = strides(d, num_modes);
    let offsets: Vec<usize> = (0..sub)
        .map(|s| {
            let mut rem = s;
            let mut off = 0;
            for j in (0..k).rev() {
                off += (rem % d) * st[modes[j]];
                rem /= d;
            }
            off
        })
        .collect();
    let mut out = DVector::zeros(amps.len());
    let mut buf = DVector::zeros(sub);
    for base in 0..amps.len() {
        if modes.iter().any(|&m| (base / st[m]) % d != 0) {
            continue;
        }
        for (s, off) in offsets.iter().enumerate() {
            buf[s] = amps[base + off];
        }
        let res = u * &buf;
        for (s, off) in offsets.iter().enumerate() {
            out[base + off] = res[s];
        }
    }
    out
}

pub(crate) fn lower(amps: &DVector<C64>, cutoff: usize, num_modes: usize, mode: usize) -> DVector<C64> {
    let st = strides(cutoff, num_modes)[mode];
    let mut out = DVector::zeros(amps.len());
    for (idx, z) in amps.iter().enumerate() {
        let n = (idx / st) % cutoff;
        if n > 0 {
            out[idx - st] += z * (n as f64).sqrt();
        }
    }
    out
}

/// `max |U†U − 1|`, or for large matrices the worst `|U†U x − x|` over a few
/// fixed random probes.
pub(crate) fn unitarity_defect_fast(u: &DMatrix<C64>) -> f64 {
    let n = u.ncols();
    if n <= EXACT_UNITARY_CHECK_DIM {
        return linalg::unitarity_defect(u);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0_f64;
    for _ in 0..3 {
        let x = DVector::from_fn(n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let x = &x / C64::new(x.norm(), 0.0);
        let y = u.adjoint() * (u * &x);
        worst = worst.max((y - x).camax());
    }
    worst
}

pub fn fock_log_negativity(s: &FockVector, part: &Bipartition) -> Result<f64> {
    s.log_negativity(part)
}

/// Density matrix on a truncated multi-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    cutoff: usize,
    num_modes: usize,
    rho: DMatrix<C64>,
}

impl FockDensity {
    pub fn new(cutoff: usize, num_modes: usize, rho: DMatrix<C64>) -> Result<Self> {
        let dim = check_dims(cutoff, num_modes)?;
        if rho.nrows() != dim || !rho.is_square() {
            return Err(Error::invalid(format!("density must be {dim}x{dim}")));
        }
        let herm = (&rho - rho.adjoint()).camax();
        if herm > 1e-10 {
            return Err(Error::invalid(format!("density is not Hermitian ({herm:.3e})")));
        }
        let d = FockDensity { cutoff, num_modes, rho };
        let ev = d.eigenvalues();
        if ev.first().is_some_and(|&e| e < -1e-10) {
            return Err(Error::invalid(format!("density has negative eigenvalue {:.3e}", ev[0])));
        }
        if d.trace() > 1.0 + 1e-10 {
            return Err(Error::invalid(format!("density trace {} exceeds 1", d.trace())));
        }
        Ok(d)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.rho)
    }

    pub fn partial_transpose(&self, part: &Bipartition) -> Result<DMatrix<C64>> {
        if part.num_modes() != self.num_modes {
            return Err(Error::invalid("bipartition does not match the number of modes"));
        }
        let d = self.cutoff;
        let st = strides(d, self.num_modes);
        let dim = self.rho.nrows();
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                // Swap the side-A digits of the row and column indices.
                let (mut ni, mut nj) = (i, j);
                for &m in part.side_a() {
                    let (di, dj) = ((i / st[m]) % d, (j / st[m]) % d);
                    ni = ni - di * st[m] + dj * st[m];
                    nj = nj - dj * st[m] + di * st[m];
                }
                out[(ni, nj)] = self.rho[(i, j)];
            }
        }
        Ok(out)
    }

    /// `ln(‖ρ^{T_A}‖₁ / tr ρ)`.
    pub fn log_negativity(&self, part: &Bipartition) -> Result<f64> {
        let pt = self.partial_transpose(part)?;
        let ev = linalg::hermitian_eigenvalues(&pt);
        let tn: f64 = ev.iter().map(|e| e.abs()).sum();
        Ok((tn / self.trace()).ln().max(0.0))
    }

    /// Reduced density on `keep` (in increasing mode order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<FockDensity> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&m| m >= self.num_modes) {
            return Err(Error::invalid(format!("bad mode list {keep:?}")));
        }
        let d = self.cutoff;
        let st = strides(d, self.num_modes);
        let kdim = d.pow(keep.len() as u32);
        let dim = self.rho.nrows();
        let reduced_index = |i: usize| keep.iter().fold(0, |acc, &m| acc * d + (i / st[m]) % d);
        let traced: Vec<usize> = (0..self.num_modes).filter(|m| !keep.contains(m)).collect();
        let traced_key = |i: usize| traced.iter().fold(0, |acc, &m| acc * d + (i / st[m]) % d);
        let mut out = DMatrix::zeros(kdim, kdim);
        for i in 0..dim {
            for j in 0..dim {
                if traced_key(i) == traced_key(j) {
                    out[(reduced_index(i), reduced_index(j))] += self.rho[(i, j)];
                }
            }
        }
        Ok(FockDensity {
            cutoff: d,
            num_modes: keep.len(),
            rho: out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_moments() {
        let v = FockVector::vacuum(6, 2).unwrap();
        let g = v.covariance().unwrap();
        assert_abs_diff_eq!(g.cov().clone(), DMatrix::identity(4, 4), epsilon = 1e-14);
    }

    #[test]
    fn coherent_moments() {
        let alpha = C64::new(0.6, -0.3);
        let v = FockVector::coherent(alpha, 30).unwrap();
        let g = v.covariance().unwrap();
        let s = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(g.first_moments()[0], s * 0.6, epsilon = 1e-10);
        assert_abs_diff_eq!(g.first_moments()[1], -s * 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(g.cov().clone(), DMatrix::identity(2, 2), epsilon = 1e-9);
    }

    #[test]
    fn truncation_refusal() {
        let v = FockVector::coherent(C64::new(3.0, 0.0), 8).unwrap();
        match v.covariance() {
            Err(Error::Truncation { suggested_cutoff, .. }) => assert!(suggested_cutoff > 8),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn density_partial_transpose_of_product() {
        let v = FockVector::number_state(3, &[1, 0]).unwrap();
        let part = Bipartition::new(&[0], 2).unwrap();
        assert_eq!(v.density().log_negativity(&part).unwrap(), 0.0);
        assert_eq!(v.log_negativity(&part).unwrap(), 0.0);
        let r = v.density().partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(r.matrix()[(1, 1)].re, 1.0, epsilon = 0.0);
    }

    #[test]
    fn non_unitary_rejected() {
        let v = FockVector::vacuum(3, 1).unwrap();
        let m = DMatrix::from_diagonal_element(3, 3, C64::new(2.0, 0.0));
        assert!(v.apply_unitary(&m, &[0]).is_err());
    }
}
