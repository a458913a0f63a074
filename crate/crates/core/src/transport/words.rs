//! Exact transport probabilities `p_N = Σ_J λ_min(V_J†V_J)` over outcome
//! words `V_J = W_{j_N}⋯W_{j_1}`.
//!
//! Words are visited depth first in lexicographic order of `(j_1, j_2, …)`;
//! the first letter is split across threads and partial sums are merged in
//! letter order, so results do not depend on the thread count. A prefix with
//! `det V = 0` is dropped since every extension is singular too.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_exponential, DecayFit};
use crate::linalg::{hermitian_eigenvalues, C64};

use super::ensemble::{validate_ensemble, KrausEnsemble, TransportCase};
use super::lemma::lemma4_delta;

/// Largest admissible `|ops|^N`.
pub const WORD_BUDGET: f64 = 1e7;

/// Decay constant `ν` with `p_{N+1} ≤ ν p_N`.
///
/// `empirical` is the largest one-step ratio `Σ_j λ_min(V†W_j†W_jV)/λ_min(V†V)`
/// over every nonsingular word of length below `depth`; since `p_{N+1}/p_N`
/// is a weighted mean of these ratios, it bounds every observed step up to
/// `depth`. `certificate` replaces the numerator with the eigenvalue-gap estimate
/// `λ_min(V†V) − Σ δ`, folded over the outcomes, and is never below
/// `empirical`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuEstimate {
    pub empirical: f64,
    pub certificate: f64,
    pub depth: usize,
    pub words: u64,
    pub case: TransportCase,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportReport {
    pub n_max: usize,
    /// `p_1, …, p_N`.
    pub probabilities: Vec<f64>,
    /// `p_N / p_{N−1}` for `N = 1..`, with `p_0 = 1`.
    pub ratios: Vec<f64>,
    /// Present for qubit ensembles.
    pub nu: Option<NuEstimate>,
    /// Exponential fit of `p_N`; absent with fewer than three positive values.
    pub fit: Option<DecayFit>,
    pub unitary_flag: bool,
    /// Words whose `λ_min` was evaluated.
    pub words: u64,
}

fn check_budget(num_ops: usize, n: usize) -> Result<()> {
    let words = (num_ops as f64).powi(n as i32);
    if words > WORD_BUDGET {
        let suggested_n = (WORD_BUDGET.ln() / (num_ops as f64).ln()).floor() as usize;
        return Err(Error::BudgetExceeded {
            words,
            budget: WORD_BUDGET,
            suggested_n,
        });
    }
    Ok(())
}

/// `W_{j_N}⋯W_{j_1}` for `word = [j_1, …, j_N]`.
pub fn word_operator(e: &KrausEnsemble, word: &[usize]) -> Result<DMatrix<C64>> {
    let mut v = DMatrix::identity(e.dim(), e.dim());
    for &j in word {
        let w = e.ops().get(j).ok_or_else(|| Error::invalid(format!("outcome {j} out of range")))?;
        v = w * v;
    }
    Ok(v)
}

struct Walker<'a> {
    ops: &'a [DMatrix<C64>],
    dets: Vec<C64>,
    depth: usize,
    nu: bool,
}

#[derive(Debug, Clone)]
struct Acc {
    sums: Vec<f64>,
    nu: f64,
    cert: f64,
    words: u64,
}

impl Acc {
    fn new(depth: usize) -> Self {
        Acc {
            sums: vec![0.0; depth + 1],
            nu: 0.0,
            cert: 0.0,
            words: 0,
        }
    }

    fn merge(&mut self, other: &Acc) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        self.nu = self.nu.max(other.nu);
        self.cert = self.cert.max(other.cert);
        self.words += other.words;
    }
}

impl Walker<'_> {
    /// `λ_min(V†V)`; for qubits `|det V|² / λ_max`, which keeps full relative
    /// accuracy for nearly singular words.
    fn lambda_min(&self, v: &DMatrix<C64>, det: C64) -> f64 {
        let g = v.adjoint() * v;
        if v.nrows() == 2 {
            let (a, b) = (g[(0, 0)].re, g[(1, 1)].re);
            let d2 = det.norm_sqr();
            let lmax = 0.5 * (a + b + ((a - b).powi(2) + 4.0 * g[(0, 1)].norm_sqr()).sqrt());
            if lmax > 0.0 {
                d2 / lmax
            } else {
                0.0
            }
        } else {
            hermitian_eigenvalues(&g)[0].max(0.0)
        }
    }

    /// Children of the word `v` at `level`; returns those worth extending.
    fn expand(&self, v: &DMatrix<C64>, det: C64, lmin: f64, level: usize, acc: &mut Acc) -> Vec<(DMatrix<C64>, C64, f64)> {
        let kids: Vec<(DMatrix<C64>, C64, f64)> = self
            .ops
            .iter()
            .zip(&self.dets)
            .map(|(w, dw)| {
                let c = w * v;
                let dc = dw * det;
                let l = self.lambda_min(&c, dc);
                (c, dc, l)
            })
            .collect();
        acc.words += kids.len() as u64;
        let total: f64 = kids.iter().map(|k| k.2).sum();
        acc.sums[level + 1] += total;
        if self.nu && lmin > 0.0 {
            acc.nu = acc.nu.max(total / lmin);
            let grams: Vec<DMatrix<C64>> = kids.iter().map(|k| k.0.adjoint() * &k.0).collect();
            let mut running = grams[0].clone();
            let mut delta = 0.0;
            for g in &grams[1..] {
                delta += lemma4_delta(&running, g).map(|x| x.delta).unwrap_or(0.0);
                running += g;
            }
            acc.cert = acc.cert.max(1.0 - delta / lmin);
        }
        kids.into_iter().filter(|k| k.1 != C64::new(0.0, 0.0)).collect()
    }

    fn descend(&self, v: &DMatrix<C64>, det: C64, lmin: f64, level: usize, acc: &mut Acc) {
        if level == self.depth {
            return;
        }
        for (c, dc, l) in self.expand(v, det, lmin, level, acc) {
            self.descend(&c, dc, l, level + 1, acc);
        }
    }

    fn run(&self) -> Acc {
        let dim = self.ops[0].nrows();
        let mut acc = Acc::new(self.depth);
        acc.sums[0] = 1.0;
        acc.words = 1;
        if self.depth == 0 {
            return acc;
        }
        let id = DMatrix::identity(dim, dim);
        let kids = self.expand(&id, C64::new(1.0, 0.0), 1.0, 0, &mut acc);
        let parts: Vec<Acc> = kids
            .par_iter()
            .map(|(c, dc, l)| {
                let mut a = Acc::new(self.depth);
                self.descend(c, *dc, *l, 1, &mut a);
                a
            })
            .collect();
        for p in &parts {
            acc.merge(p);
        }
        acc
    }
}

fn walker(e: &KrausEnsemble, depth: usize, nu: bool) -> Walker<'_> {
    Walker {
        ops: e.ops(),
        dets: e.ops().iter().map(|w| w.determinant()).collect(),
        depth,
        nu,
    }
}

/// `ν` from all words of length below `depth`. Qubits only.
pub fn decay_rate_nu(e: &KrausEnsemble, depth: usize) -> Result<NuEstimate> {
    if e.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "the decay constant is a 2x2 statement, ensemble has dimension {}",
            e.dim()
        )));
    }
    if depth == 0 {
        return Err(Error::invalid("depth must be >= 1"));
    }
    let diag = validate_ensemble(e);
    if diag.all_unitary {
        return Ok(NuEstimate {
            empirical: 1.0,
            certificate: 1.0,
            depth,
            words: 0,
            case: diag.case,
        });
    }
    check_budget(e.len(), depth)?;
    let acc = walker(e, depth, true).run();
    Ok(NuEstimate {
        empirical: acc.nu,
        certificate: acc.cert,
        depth,
        words: acc.words,
        case: diag.case,
    })
}

pub fn transport_prob_exact(e: &KrausEnsemble, n: usize) -> Result<TransportReport> {
    if n == 0 {
        return Err(Error::invalid("N must be >= 1"));
    }
    check_budget(e.len(), n)?;
    let diag = validate_ensemble(e);
    let qubit = e.dim() == 2;
    let acc = walker(e, n, qubit && !diag.all_unitary).run();
    let probabilities = acc.sums[1..].to_vec();
    let ratios = acc
        .sums
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let nu = qubit.then(|| {
        if diag.all_unitary {
            NuEstimate {
                empirical: 1.0,
                certificate: 1.0,
                depth: n,
                words: 0,
                case: diag.case,
            }
        } else {
            NuEstimate {
                empirical: acc.nu,
                certificate: acc.cert,
                depth: n,
                words: acc.words,
                case: diag.case,
            }
        }
    });
    let samples: Vec<(f64, f64)> = probabilities
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(k, p)| ((k + 1) as f64, *p))
        .collect();
    let fit = if samples.len() >= 3 { fit_exponential(&samples).ok() } else { None };
    Ok(TransportReport {
        n_max: n,
        probabilities,
        ratios,
        nu,
        fit,
        unitary_flag: diag.all_unitary,
        words: acc.words,
    })
}

/// Optimal recovery `X` with `X V = c·1` and `X†X ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub x: DMatrix<C64>,
    /// `c = σ_min(V)`; the success probability is `c² = λ_min(V†V)`.
    pub c: f64,
}

/// `X = σ_min V⁻¹`; a singular word admits only `X = 0`.
pub fn recovery_operator(v: &DMatrix<C64>) -> Result<Recovery> {
    if v.nrows() != v.ncols() {
        return Err(Error::invalid("word operator must be square"));
    }
    let n = v.nrows();
    let svd = v.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let s = &svd.singular_values;
    let (smin, smax) = (s.min(), s.max());
    if !(smin > 1e-14 * smax) {
        return Ok(Recovery {
            x: DMatrix::zeros(n, n),
            c: 0.0,
        });
    }
    let scaled = DMatrix::from_diagonal(&s.map(|x| C64::new(smin / x, 0.0)));
    Ok(Recovery {
        x: vt.adjoint() * scaled * u.adjoint(),
        c: smin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use crate::transport::{damping_pair, random_ensemble};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn damping_pair_closed_form() {
        let beta = std::f64::consts::FRAC_PI_4;
        let rep = transport_prob_exact(&damping_pair(beta), 3).unwrap();
        assert!((rep.probabilities[2] - 0.125).abs() < 1e-15);
        let nu = rep.nu.unwrap();
        assert!((nu.empirical - 0.5).abs() < 1e-15);
        assert!(nu.certificate >= nu.empirical);
    }

    #[test]
    fn unitary_ensemble_is_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ops: Vec<_> = [0.3, 0.7]
            .iter()
            .map(|w: &f64| random_unitary(2, &mut rng) * C64::new(w.sqrt(), 0.0))
            .collect();
        let rep = transport_prob_exact(&KrausEnsemble::new(ops).unwrap(), 6).unwrap();
        assert!(rep.unitary_flag);
        assert!(rep.probabilities.iter().all(|p| (p - 1.0).abs() < 1e-12));
        assert_eq!(rep.nu.unwrap().empirical, 1.0);
    }

    #[test]
    fn budget_refusal_suggests_n() {
        let e = damping_pair(0.3);
        match transport_prob_exact(&e, 30) {
            Err(Error::BudgetExceeded { suggested_n, .. }) => assert_eq!(suggested_n, 23),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn recovery_attains_lambda_min() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = random_ensemble(2, 3, &mut rng).unwrap();
        let v = word_operator(&e, &[0, 2, 1, 1]).unwrap();
        let r = recovery_operator(&v).unwrap();
        let xv = &r.x * &v;
        assert!((xv - DMatrix::identity(2, 2) * C64::new(r.c, 0.0)).iter().all(|z| z.norm() < 1e-12));
        let top = hermitian_eigenvalues(&(r.x.adjoint() * &r.x))[1];
        assert!(top <= 1.0 + 1e-12);
        let lmin = hermitian_eigenvalues(&(v.adjoint() * &v))[0];
        assert!((r.c * r.c - lmin).abs() < 1e-12);
    }

    #[test]
    fn thread_count_does_not_change_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e = random_ensemble(2, 3, &mut rng).unwrap();
        let a = transport_prob_exact(&e, 7).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| transport_prob_exact(&e, 7).unwrap());
        assert_eq!(a.probabilities, b.probabilities);
        assert_eq!(a.nu, b.nu);
    }
}
