//! Kraus ensembles `{W_j}` of a sequentially prepared wire.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sqrt_psd, C64};

/// Largest accepted `max |Σ W_j†W_j − 1|`.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// An operator counts as proportional-unitary when `1 − σ_min/σ_max` is below this.
pub const UNITARY_TOL: f64 = 1e-10;
/// Gramians commute when `‖[A, B]‖_max` is below this times their scale.
pub const COMMUTE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausEnsemble {
    dim: usize,
    ops: Vec<DMatrix<C64>>,
}

fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn completeness_defect(dim: usize, ops: &[DMatrix<C64>]) -> f64 {
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for w in ops {
        sum += w.adjoint() * w;
    }
    max_entry(&(sum - DMatrix::identity(dim, dim)))
}

/// `1 − σ_min/σ_max`; zero for the zero map (it is `0·U`).
pub fn proportional_unitary_defect(w: &DMatrix<C64>) -> f64 {
    let sv = w.singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if hi == 0.0 {
        0.0
    } else {
        (1.0 - lo / hi).max(0.0)
    }
}

impl KrausEnsemble {
    pub fn new(ops: Vec<DMatrix<C64>>) -> Result<Self> {
        let dim = ops.first().map(|w| w.nrows()).ok_or_else(|| Error::invalid("ensemble has no operators"))?;
        if dim < 2 {
            return Err(Error::invalid("logical dimension must be >= 2"));
        }
        if let Some(k) = ops.iter().position(|w| w.nrows() != dim || w.ncols() != dim) {
            return Err(Error::invalid(format!("operator {k} is not {dim}x{dim}")));
        }
        if ops.iter().flat_map(|w| w.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("operators must be finite"));
        }
        let defect = completeness_defect(dim, &ops);
        if !(defect <= COMPLETENESS_TOL) {
            return Err(Error::invalid(format!(
                "completeness defect {defect:.3e} exceeds {COMPLETENESS_TOL:.0e}"
            )));
        }
        Ok(KrausEnsemble { dim, ops })
    }

    /// Real operators, convenient for hand-built examples.
    pub fn from_real(ops: &[DMatrix<f64>]) -> Result<Self> {
        Self::new(ops.iter().map(|w| w.map(|x| C64::new(x, 0.0))).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[DMatrix<C64>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Relabels outcomes: output `j` is input `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.ops.len()];
        if perm.len() != self.ops.len() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid("not a permutation of the outcomes"));
        }
        Ok(KrausEnsemble {
            dim: self.dim,
            ops: perm.iter().map(|&p| self.ops[p].clone()).collect(),
        })
    }

    /// Coarse-grains the outcomes with a unitary mixing `W_j ↦ Σ_k u_{jk} W_k`.
    pub fn mixed(&self, u: &DMatrix<C64>) -> Result<Self> {
        let m = self.ops.len();
        if u.nrows() != m || u.ncols() != m {
            return Err(Error::invalid(format!("mixing matrix must be {m}x{m}")));
        }
        let ops = (0..m)
            .map(|j| {
                let mut w = DMatrix::zeros(self.dim, self.dim);
                for (k, op) in self.ops.iter().enumerate() {
                    w += op * u[(j, k)];
                }
                w
            })
            .collect();
        KrausEnsemble::new(ops)
    }

    pub fn to_record(&self) -> EnsembleRecord {
        let rows = |m: &DMatrix<C64>, f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        EnsembleRecord {
            dim: self.dim,
            ops: self
                .ops
                .iter()
                .map(|w| MatrixRecord {
                    re: rows(w, |z| z.re),
                    im: rows(w, |z| z.im),
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &EnsembleRecord) -> Result<Self> {
        let ops = rec
            .ops
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == rec.dim && rows.iter().all(|r| r.len() == rec.dim);
                if !shape_ok(&m.re) || !shape_ok(&m.im) {
                    return Err(Error::Parse(format!("operator {k} is not {0}x{0}", rec.dim)));
                }
                Ok(DMatrix::from_fn(rec.dim, rec.dim, |i, j| C64::new(m.re[i][j], m.im[i][j])))
            })
            .collect::<Result<Vec<_>>>()?;
        KrausEnsemble::new(ops)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("ensemble record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: EnsembleRecord = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_record(&rec)
    }
}

/// Matrices as pairs of row-major real arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRecord {
    pub dim: usize,
    pub ops: Vec<MatrixRecord>,
}

/// Which decay argument applies to an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportCase {
    /// Every `W_j` is proportional to a unitary: perfect transport.
    Unitary,
    /// The Gramians `W_j†W_j` commute and are simultaneously diagonal.
    Commuting,
    /// Generic case, handled by the 2×2 eigenvalue gap.
    NonCommuting,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleDiagnostics {
    pub dim: usize,
    pub num_ops: usize,
    pub completeness_defect: f64,
    /// `1 − σ_min/σ_max` per operator.
    pub unitarity_defects: Vec<f64>,
    pub all_unitary: bool,
    /// Largest `‖[W_i†W_i, W_j†W_j]‖_max`.
    pub max_commutator: f64,
    pub commuting: bool,
    pub case: TransportCase,
}

pub fn validate_ensemble(e: &KrausEnsemble) -> EnsembleDiagnostics {
    let grams: Vec<DMatrix<C64>> = e.ops.iter().map(|w| w.adjoint() * w).collect();
    let mut max_commutator = 0.0_f64;
    for i in 0..grams.len() {
        for j in i + 1..grams.len() {
            let c = &grams[i] * &grams[j] - &grams[j] * &grams[i];
            max_commutator = max_commutator.max(max_entry(&c));
        }
    }
    let unitarity_defects: Vec<f64> = e.ops.iter().map(proportional_unitary_defect).collect();
    let all_unitary = unitarity_defects.iter().all(|&d| d <= UNITARY_TOL);
    let commuting = max_commutator <= COMMUTE_TOL;
    EnsembleDiagnostics {
        dim: e.dim,
        num_ops: e.ops.len(),
        completeness_defect: completeness_defect(e.dim, &e.ops),
        unitarity_defects,
        all_unitary,
        max_commutator,
        commuting,
        case: if all_unitary {
            TransportCase::Unitary
        } else if commuting {
            TransportCase::Commuting
        } else {
            TransportCase::NonCommuting
        },
    }
}

/// Generic ensemble: complex Gaussian `G_j` normalized as `W_j = G_j S^{-1/2}`
/// with `S = Σ G_j†G_j`.
pub fn random_ensemble<R: Rng + ?Sized>(dim: usize, num_ops: usize, rng: &mut R) -> Result<KrausEnsemble> {
    if dim < 2 || num_ops < 1 {
        return Err(Error::invalid("need dim >= 2 and at least one operator"));
    }
    let gs: Vec<DMatrix<C64>> = (0..num_ops)
        .map(|_| {
            DMatrix::from_fn(dim, dim, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im)
            })
        })
        .collect();
    let mut s = DMatrix::<C64>::zeros(dim, dim);
    for g in &gs {
        s += g.adjoint() * g;
    }
    let inv_sqrt = sqrt_psd(&s)
        .try_inverse()
        .ok_or_else(|| Error::Internal("random Gramian is singular".into()))?;
    KrausEnsemble::new(gs.iter().map(|g| g * &inv_sqrt).collect())
}

/// Amplitude-damping-style pair with `W_0†W_0 = diag(1, cos²β)` and
/// `W_1†W_1 = diag(0, sin²β)`.
pub fn damping_pair(beta: f64) -> KrausEnsemble {
    let (s, c) = beta.sin_cos();
    let w0 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, c]);
    let w1 = DMatrix::from_row_slice(2, 2, &[0.0, s, 0.0, 0.0]);
    KrausEnsemble::from_real(&[w0, w1]).expect("damping pair is complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_incomplete() {
        let w = DMatrix::<f64>::identity(2, 2) * 0.5;
        assert!(KrausEnsemble::from_real(&[w]).is_err());
        assert!(KrausEnsemble::new(vec![]).is_err());
    }

    #[test]
    fn diagnostics_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u1 = random_unitary(2, &mut rng) * C64::new(0.5_f64.sqrt(), 0.0);
        let u2 = random_unitary(2, &mut rng) * C64::new(0.5_f64.sqrt(), 0.0);
        let uni = KrausEnsemble::new(vec![u1, u2]).unwrap();
        assert_eq!(validate_ensemble(&uni).case, TransportCase::Unitary);

        let d = validate_ensemble(&damping_pair(0.4));
        assert_eq!(d.case, TransportCase::Commuting);
        assert!(d.completeness_defect < 1e-15);

        // Two outcomes always commute: W_1†W_1 = 1 − W_0†W_0.
        assert!(validate_ensemble(&random_ensemble(2, 2, &mut rng).unwrap()).commuting);
        let r = random_ensemble(2, 3, &mut rng).unwrap();
        let d = validate_ensemble(&r);
        assert_eq!(d.case, TransportCase::NonCommuting);
        assert!(d.max_commutator > 1e-3 && d.completeness_defect < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = random_ensemble(3, 2, &mut rng).unwrap();
        assert_eq!(KrausEnsemble::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn unitary_mixing_preserves_completeness() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = random_ensemble(2, 3, &mut rng).unwrap();
        let u = random_unitary(3, &mut rng);
        assert!(e.mixed(&u).is_ok());
        assert!(e.permuted(&[0, 0, 1]).is_err());
    }
}
