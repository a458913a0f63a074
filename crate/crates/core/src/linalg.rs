//! Small dense linear-algebra helpers shared by the phase-space and Fock
//! modules.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Singular values below this fraction of the largest one count as zero.
pub const PINV_RTOL: f64 = 1e-12;

/// Block-diagonal symplectic form for `n` modes in (x1,p1,...,xn,pn) order.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        s[(2 * k, 2 * k + 1)] = 1.0;
        s[(2 * k + 1, 2 * k)] = -1.0;
    }
    s
}

/// Quadrature row indices (x then p) of the listed modes.
pub fn quadrature_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn subvector(v: &DVector<f64>, rows: &[usize]) -> DVector<f64> {
    DVector::from_fn(rows.len(), |i, _| v[rows[i]])
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Inverse of a symmetric positive matrix, refusing when the condition number
/// exceeds `1 / PINV_RTOL`.
pub fn checked_inverse(m: &DMatrix<f64>, modes: &[usize]) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > PINV_RTOL * smax) {
        return Err(Error::NumericalDegeneracy {
            modes: modes.to_vec(),
            detail: format!("singular values span [{smin:.3e}, {smax:.3e}]"),
        });
    }
    svd.pseudo_inverse(0.0)
        .map_err(|e| Error::Internal(e.to_string()))
}

pub fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let eps = PINV_RTOL * svd.singular_values.max();
    svd.pseudo_inverse(eps).expect("svd computed with u and v")
}

/// Symplectic eigenvalues of a positive definite matrix, descending, one per
/// mode.
///
/// With `cov = L Lᵀ` the antisymmetric matrix `Lᵀ σ L` is similar to `σ cov`
/// and its singular values are the symplectic eigenvalues, each twice.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n2 = cov.nrows();
    if n2 == 0 || n2 % 2 != 0 || !cov.is_square() {
        return Err(Error::invalid(format!(
            "covariance must be square of even size, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let chol = sym
        .cholesky()
        .ok_or_else(|| Error::invalid("covariance is not positive definite"))?;
    let l = chol.l();
    let k = l.transpose() * symplectic_form(n2 / 2) * &l;
    let mut sv: Vec<f64> = k.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let mut out = Vec::with_capacity(n2 / 2);
    for pair in sv.chunks(2) {
        let tol = 1e-9 * pair[0].max(1.0);
        if (pair[0] - pair[1]).abs() > tol {
            log::debug!("symplectic pair mismatch {} vs {}", pair[0], pair[1]);
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn sqrt_psd(m: &DMatrix<C64>) -> DMatrix<C64> {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = h.symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    m.singular_values().max()
}

pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let d = u.adjoint() * u - DMatrix::identity(u.ncols(), u.ncols());
    d.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Haar-random unitary via QR of a complex Gaussian matrix with the phases of
/// R's diagonal divided out.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Phase-space action of the passive transformation `a ↦ U a`.
pub fn passive_symplectic(u: &DMatrix<C64>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let z = u[(j, k)];
            s[(2 * j, 2 * k)] = z.re;
            s[(2 * j, 2 * k + 1)] = -z.im;
            s[(2 * j + 1, 2 * k)] = z.im;
            s[(2 * j + 1, 2 * k + 1)] = z.re;
        }
    }
    s
}

/// Random symplectic matrix in Bloch-Messiah form `O₁ · diag(e^{s}, e^{-s}) · O₂`
/// with squeezings drawn uniformly from `[-max_squeeze, max_squeeze]`.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, max_squeeze: f64, rng: &mut R) -> DMatrix<f64> {
    let o1 = passive_symplectic(&random_unitary(n, rng));
    let o2 = passive_symplectic(&random_unitary(n, rng));
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let s = if max_squeeze > 0.0 {
            rng.random_range(-max_squeeze..=max_squeeze)
        } else {
            0.0
        };
        d[(2 * k, 2 * k)] = s.exp();
        d[(2 * k + 1, 2 * k + 1)] = (-s).exp();
    }
    o1 * d * o2
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_symplectic_preserves_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..4 {
            let s = random_symplectic(n, 1.5, &mut rng);
            let sig = symplectic_form(n);
            let defect = max_abs(&(&s * &sig * s.transpose() - &sig));
            assert!(defect < 1e-10, "defect {defect}");
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(5, &mut rng);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn spectrum_of_thermal_mode() {
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 3.0, 1.0, 1.0]));
        let nu = symplectic_eigenvalues(&cov).unwrap();
        assert!((nu[0] - 3.0).abs() < 1e-12 && (nu[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_rejects_indefinite() {
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(symplectic_eigenvalues(&cov).is_err());
    }
}
