//! Seeded Monte-Carlo estimators. Trial `t` of a run draws from the ChaCha8
//! stream `t` of the run seed, so results are independent of thread count.

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::filter_success_law;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    /// Binomial standard error `√(p(1−p)/n)`.
    pub stderr: f64,
}

impl Estimate {
    fn from_counts(successes: u64, trials: u64) -> Self {
        let rate = successes as f64 / trials as f64;
        Estimate {
            successes,
            trials,
            rate,
            stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        }
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn count_successes(trials: u64, seed: u64, stream_base: u64, f: impl Fn(&mut ChaCha8Rng) -> bool + Sync) -> u64 {
    (0..trials)
        .into_par_iter()
        .filter(|&t| f(&mut trial_rng(seed, stream_base + t)))
        .count() as u64
}

/// Left-right crossing probability of open-bond percolation on a
/// `width × height` vertex grid.
pub fn bond_percolation(width: usize, height: usize, p_edge: f64, trials: u64, seed: u64) -> Result<Estimate> {
    percolation_point(width, height, p_edge, trials, seed, 0)
}

/// Crossing estimates at several bond probabilities; point `i` uses streams
/// starting at `i << 32`.
pub fn percolation_sweep(width: usize, height: usize, ps: &[f64], trials: u64, seed: u64) -> Result<Vec<Estimate>> {
    ps.iter()
        .enumerate()
        .map(|(i, &p)| percolation_point(width, height, p, trials, seed, (i as u64) << 32))
        .collect()
}

fn percolation_point(
    width: usize,
    height: usize,
    p_edge: f64,
    trials: u64,
    seed: u64,
    stream_base: u64,
) -> Result<Estimate> {
    if width < 2 || height < 1 {
        return Err(Error::invalid(format!("lattice must be at least 2x1, got {width}x{height}")));
    }
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::invalid(format!("p_edge must lie in [0, 1], got {p_edge}")));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let n = width * height;
    let hits = count_successes(trials, seed, stream_base, |rng| {
        let (left, right) = (n, n + 1);
        let mut uf = UnionFind::<usize>::new(n + 2);
        for y in 0..height {
            uf.union(left, y * width);
            uf.union(right, y * width + width - 1);
        }
        for y in 0..height {
            for x in 0..width {
                let v = y * width + x;
                if x + 1 < width && rng.random::<f64>() < p_edge {
                    uf.union(v, v + 1);
                }
                if y + 1 < height && rng.random::<f64>() < p_edge {
                    uf.union(v, v + width);
                }
            }
        }
        uf.equiv(left, right)
    });
    Ok(Estimate::from_counts(hits, trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepeaterStats {
    pub lambda: f64,
    pub n_links: usize,
    /// Per-link filter success probability.
    pub p_link: f64,
    /// `p_link^n_links`.
    pub expected: f64,
    pub estimate: Estimate,
}

/// Chain of `n_links` TMSS links; each is filtered into a Bell pair
/// independently with the optimal local-filtering probability, and a chain
/// succeeds when every link does (the Bell pairs are then swapped perfectly).
pub fn repeater_filter_chain(lambda: f64, n_links: usize, trials: u64, seed: u64) -> Result<RepeaterStats> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let p = filter_success_law(lambda)?;
    let hits = count_successes(trials, seed, 0, |rng| (0..n_links).all(|_| rng.random::<f64>() < p));
    Ok(RepeaterStats {
        lambda,
        n_links,
        p_link: p,
        expected: p.powi(n_links as i32),
        estimate: Estimate::from_counts(hits, trials),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percolation_extremes() {
        assert_eq!(bond_percolation(8, 8, 1.0, 50, 1).unwrap().rate, 1.0);
        assert_eq!(bond_percolation(8, 8, 0.0, 50, 1).unwrap().rate, 0.0);
        assert!(bond_percolation(1, 8, 0.5, 50, 1).is_err());
        assert!(bond_percolation(8, 8, 1.5, 50, 1).is_err());
    }

    #[test]
    fn percolation_is_reproducible() {
        let a = bond_percolation(16, 16, 0.5, 200, 42).unwrap();
        let b = bond_percolation(16, 16, 0.5, 200, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn repeater_regimes() {
        let det = repeater_filter_chain(0.8, 10, 500, 3).unwrap();
        assert_eq!(det.estimate.rate, 1.0);
        let none = repeater_filter_chain(0.3, 0, 10, 3).unwrap();
        assert_eq!(none.estimate.rate, 1.0);
        let s = repeater_filter_chain(0.6, 3, 4000, 9).unwrap();
        assert!((s.estimate.rate - s.expected).abs() < 3.0 * s.estimate.stderr.max(1e-3));
    }
}
