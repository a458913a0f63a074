//! Covariance-matrix representation of Gaussian states.
//!
//! Quadratures are ordered `(x1, p1, ..., xN, pN)` and the vacuum has the
//! identity as covariance matrix. Squeezing is tracked by the CM-level
//! parameter `r` of the two-mode squeezed state
//!
//! ```text
//!  | cosh 2r    0      sinh 2r     0     |
//!  |   0     cosh 2r     0     -sinh 2r  |
//!  | sinh 2r    0      cosh 2r     0     |
//!  |   0    -sinh 2r     0      cosh 2r  |
//! ```
//!
//! whose number-basis Schmidt parameter is `λ = tanh r`. That pairing is the
//! one the Fock oracle reproduces (see `fock::covariance`).

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// Largest accepted squeezing; `cosh(40)` is still comfortably finite.
pub const MAX_SQUEEZING: f64 = 20.0;

const SYMMETRY_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-9;
const PURITY_TOL: f64 = 1e-6;

/// Two-mode squeezing parameter `r ≥ 0` (CM level).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SqueezeParam(f64);

impl SqueezeParam {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid(format!("squeezing must be finite and >= 0, got {r}")));
        }
        Ok(SqueezeParam(r))
    }

    pub fn zero() -> Self {
        SqueezeParam(0.0)
    }

    /// From the Schmidt parameter `λ ∈ [0, 1)`.
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::invalid(format!("lambda must lie in [0, 1), got {lambda}")));
        }
        Ok(SqueezeParam(lambda.atanh()))
    }

    pub fn r(self) -> f64 {
        self.0
    }

    pub fn lambda(self) -> f64 {
        self.0.tanh()
    }
}

impl fmt::Display for SqueezeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={}", self.0)
    }
}

/// First moments and covariance matrix of an `N`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    first_moments: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Result of [`GaussianState::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateDiagnostics {
    pub valid: bool,
    pub asymmetry: f64,
    /// Smallest eigenvalue of `cov + iσ`.
    pub min_uncertainty_eigenvalue: f64,
    pub symplectic_eigenvalues: Vec<f64>,
    /// `Π νₖ − 1`, i.e. `sqrt(det cov) − 1`.
    pub purity_defect: f64,
    pub pure: bool,
    pub message: Option<String>,
}

impl GaussianState {
    /// Wraps moments and covariance after shape checks only; physicality is
    /// reported by [`validate`](Self::validate).
    pub fn new(first_moments: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n2 = cov.nrows();
        if n2 == 0 || n2 % 2 != 0 || !cov.is_square() {
            return Err(Error::invalid(format!(
                "covariance must be 2N x 2N with N >= 1, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if first_moments.len() != n2 {
            return Err(Error::invalid(format!(
                "first moments have length {}, expected {n2}",
                first_moments.len()
            )));
        }
        if cov.iter().chain(first_moments.iter()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite entry in state"));
        }
        Ok(GaussianState { first_moments, cov })
    }

    pub fn from_cov(cov: DMatrix<f64>) -> Result<Self> {
        let n2 = cov.nrows();
        Self::new(DVector::zeros(n2), cov)
    }

    pub fn vacuum(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("vacuum needs at least one mode"));
        }
        Ok(GaussianState {
            first_moments: DVector::zeros(2 * n),
            cov: DMatrix::identity(2 * n, 2 * n),
        })
    }

    pub fn tmss(r: SqueezeParam) -> Result<Self> {
        let r = r.r();
        if r > MAX_SQUEEZING {
            return Err(Error::invalid(format!(
                "squeezing r={r} exceeds the representable limit {MAX_SQUEEZING}"
            )));
        }
        if r > 10.0 {
            log::warn!("two-mode squeezing r={r}: covariance entries reach {:.2e}", (2.0 * r).cosh());
        }
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c,   0.0, s,   0.0,
            0.0, c,   0.0, -s,
            s,   0.0, c,   0.0,
            0.0, -s,  0.0, c,
        ]);
        Ok(GaussianState {
            first_moments: DVector::zeros(4),
            cov,
        })
    }

    /// Single-mode coherent state with `d = √2 (Re α, Im α)`.
    pub fn coherent(alpha: C64) -> Self {
        let s = std::f64::consts::SQRT_2;
        GaussianState {
            first_moments: DVector::from_vec(vec![s * alpha.re, s * alpha.im]),
            cov: DMatrix::identity(2, 2),
        }
    }

    pub fn num_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn first_moments(&self) -> &DVector<f64> {
        &self.first_moments
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn with_first_moments(mut self, d: DVector<f64>) -> Result<Self> {
        if d.len() != self.first_moments.len() {
            return Err(Error::invalid("first-moment length mismatch"));
        }
        self.first_moments = d;
        Ok(self)
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::symplectic_eigenvalues(&self.cov)
    }

    /// Never fails; an unphysical state is reported through the flags.
    pub fn validate(&self) -> StateDiagnostics {
        let n = self.num_modes();
        let asym = linalg::asymmetry(&self.cov);
        let scale = linalg::max_abs(&self.cov).max(1.0);
        let symmetric = asym <= SYMMETRY_TOL * scale;

        let sigma = linalg::symplectic_form(n);
        let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| C64::new(self.cov[(i, j)], sigma[(i, j)]));
        let min_eig = linalg::hermitian_eigenvalues(&m)
            .first()
            .copied()
            .unwrap_or(f64::NAN);

        let (nu, message) = match self.symplectic_eigenvalues() {
            Ok(nu) => (nu, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let positive = !nu.is_empty();
        let uncertainty = positive && nu.iter().all(|&v| v >= 1.0 - SPECTRUM_TOL);
        let purity_defect = if positive {
            nu.iter().product::<f64>() - 1.0
        } else {
            f64::NAN
        };
        let valid = symmetric && uncertainty;
        let message = message.or_else(|| {
            if !symmetric {
                Some(format!("covariance asymmetry {asym:.3e}"))
            } else if !uncertainty {
                Some(format!(
                    "uncertainty relation violated: smallest symplectic eigenvalue {:.6}",
                    nu.last().copied().unwrap_or(f64::NAN)
                ))
            } else {
                None
            }
        });
        StateDiagnostics {
            valid,
            asymmetry: asym,
            min_uncertainty_eigenvalue: min_eig,
            symplectic_eigenvalues: nu,
            purity_defect,
            pure: valid && purity_defect.abs() < PURITY_TOL,
            message,
        }
    }

    pub fn is_pure(&self) -> bool {
        self.validate().pure
    }

    /// Direct sum, modes of `self` first.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (a, b) = (self.cov.nrows(), other.cov.nrows());
        let mut cov = DMatrix::zeros(a + b, a + b);
        cov.view_mut((0, 0), (a, a)).copy_from(&self.cov);
        cov.view_mut((a, a), (b, b)).copy_from(&other.cov);
        let d = DVector::from_iterator(
            a + b,
            self.first_moments.iter().chain(other.first_moments.iter()).copied(),
        );
        GaussianState {
            first_moments: d,
            cov,
        }
    }

    /// Tensor product that refuses unphysical factors.
    pub fn tensor_checked(&self, other: &GaussianState) -> Result<GaussianState> {
        for (label, s) in [("left", self), ("right", other)] {
            let diag = s.validate();
            if !diag.valid {
                return Err(Error::invalid(format!(
                    "{label} factor is not a valid state: {}",
                    diag.message.unwrap_or_default()
                )));
            }
        }
        Ok(self.tensor(other))
    }

    /// Marginal on `keep` (in the given order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<GaussianState> {
        if keep.is_empty() {
            return Err(Error::invalid("partial trace must keep at least one mode"));
        }
        self.check_modes(keep)?;
        let idx = linalg::quadrature_indices(keep);
        Ok(GaussianState {
            first_moments: linalg::subvector(&self.first_moments, &idx),
            cov: linalg::submatrix(&self.cov, &idx, &idx),
        })
    }

    /// Output mode `i` is input mode `perm[i]`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<GaussianState> {
        let n = self.num_modes();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::invalid(format!("permutation has length {}, expected {n}", perm.len())));
        }
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid(format!("malformed permutation {perm:?}")));
            }
        }
        self.partial_trace(perm)
    }

    pub(crate) fn check_modes(&self, modes: &[usize]) -> Result<()> {
        let n = self.num_modes();
        let mut seen = vec![false; n];
        for &m in modes {
            if m >= n {
                return Err(Error::invalid(format!("mode {m} out of range for {n}-mode state")));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::invalid(format!("mode {m} listed twice")));
            }
        }
        Ok(())
    }

    pub fn to_record(&self) -> StateRecord {
        StateRecord {
            n: self.num_modes(),
            d: self.first_moments.iter().copied().collect(),
            cov: self.cov.transpose().iter().copied().collect(),
        }
    }

    pub fn from_record(rec: &StateRecord) -> Result<Self> {
        let n2 = 2 * rec.n;
        if rec.cov.len() != n2 * n2 {
            return Err(Error::Parse(format!(
                "cov has {} entries, expected {}",
                rec.cov.len(),
                n2 * n2
            )));
        }
        Self::new(
            DVector::from_vec(rec.d.clone()),
            DMatrix::from_row_slice(n2, n2, &rec.cov),
        )
    }

    /// JSON record `{n, d, cov}` with row-major `cov`; floats round-trip
    /// bit-exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("plain numeric record")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: StateRecord = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_record(&rec)
    }
}

/// Serialized form of a [`GaussianState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub n: usize,
    pub d: Vec<f64>,
    pub cov: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sp(r: f64) -> SqueezeParam {
        SqueezeParam::new(r).unwrap()
    }

    #[test]
    fn vacuum_shapes() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.cov(), &DMatrix::<f64>::identity(2, 2));
        assert_eq!(v.first_moments(), &DVector::<f64>::zeros(2));
        let v3 = GaussianState::vacuum(3).unwrap();
        assert_eq!(v3.cov(), &DMatrix::<f64>::identity(6, 6));
        let diag = v.validate();
        assert!(diag.valid && diag.pure);
        assert_abs_diff_eq!(diag.symplectic_eigenvalues[0], 1.0, epsilon = 1e-14);
        assert!(GaussianState::vacuum(0).is_err());
    }

    #[test]
    fn tmss_entries() {
        let t0 = GaussianState::tmss(sp(0.0)).unwrap();
        assert_abs_diff_eq!(t0.cov().clone(), DMatrix::identity(4, 4), epsilon = 0.0);

        let t = GaussianState::tmss(sp(1.0)).unwrap();
        assert_abs_diff_eq!(t.cov()[(0, 0)], 3.762195691083631, epsilon = 1e-12);
        assert_abs_diff_eq!(t.cov()[(0, 2)], 3.626860407847019, epsilon = 1e-12);
        assert_abs_diff_eq!(t.cov()[(1, 3)], -3.626860407847019, epsilon = 1e-12);
        let diag = t.validate();
        assert!(diag.valid && diag.pure);
        assert!(diag.purity_defect.abs() < 1e-9);
    }

    #[test]
    fn tmss_rejects_out_of_range() {
        assert!(SqueezeParam::new(-0.1).is_err());
        assert!(GaussianState::tmss(sp(20.5)).is_err());
        assert!(GaussianState::tmss(sp(19.0)).is_ok());
    }

    #[test]
    fn sub_vacuum_is_invalid() {
        let s = GaussianState::from_cov(DMatrix::from_diagonal_element(2, 2, 0.5)).unwrap();
        let diag = s.validate();
        assert!(!diag.valid);
        assert!(diag.min_uncertainty_eigenvalue < 0.0);
    }

    #[test]
    fn reduced_tmss_is_thermal() {
        let t = GaussianState::tmss(sp(2.0)).unwrap();
        let m = t.partial_trace(&[0]).unwrap();
        let diag = m.validate();
        assert!(diag.valid && !diag.pure);
        assert_abs_diff_eq!(diag.symplectic_eigenvalues[0], 4.0_f64.cosh(), epsilon = 1e-9);
        assert_abs_diff_eq!(m.cov().clone(), DMatrix::identity(2, 2) * 4.0_f64.cosh(), epsilon = 1e-12);
    }

    #[test]
    fn tensor_and_trace() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.tensor(&v), GaussianState::vacuum(2).unwrap());

        let (a, b) = (GaussianState::tmss(sp(0.3)).unwrap(), GaussianState::tmss(sp(0.7)).unwrap());
        let ab = a.tensor(&b);
        assert_eq!(ab.partial_trace(&[0, 1]).unwrap(), a);
        assert_eq!(ab.partial_trace(&[2, 3]).unwrap(), b);
        let det = ab.cov().determinant();
        assert_abs_diff_eq!(det, a.cov().determinant() * b.cov().determinant(), epsilon = 1e-9);

        let bad = GaussianState::from_cov(DMatrix::from_diagonal_element(2, 2, 0.5)).unwrap();
        assert!(a.tensor_checked(&bad).is_err());

        let v3 = GaussianState::vacuum(3).unwrap();
        assert_eq!(v3.partial_trace(&[0, 2]).unwrap(), GaussianState::vacuum(2).unwrap());
        assert_eq!(v3.partial_trace(&[0, 1, 2]).unwrap(), v3);
        assert!(v3.partial_trace(&[]).is_err());
        assert!(v3.partial_trace(&[3]).is_err());
    }

    #[test]
    fn permutations() {
        let t = GaussianState::tmss(sp(0.9)).unwrap();
        assert_eq!(t.permute_modes(&[0, 1]).unwrap(), t);
        assert_eq!(t.permute_modes(&[1, 0]).unwrap(), t);
        assert!(t.permute_modes(&[0, 0]).is_err());
        assert!(t.permute_modes(&[0]).is_err());

        let s = t.tensor(&GaussianState::coherent(C64::new(0.5, -1.0)));
        let p = s.permute_modes(&[2, 0, 1]).unwrap();
        let back = p.permute_modes(&[1, 2, 0]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let t = GaussianState::tmss(sp(0.123456789)).unwrap();
        let d = DVector::from_vec(vec![0.1, 1.0 / 3.0, -2.5e-300, std::f64::consts::PI]);
        let t = t.with_first_moments(d).unwrap();
        let back = GaussianState::from_json(&t.to_json()).unwrap();
        for (x, y) in t.cov().iter().zip(back.cov().iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (x, y) in t.first_moments().iter().zip(back.first_moments().iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
