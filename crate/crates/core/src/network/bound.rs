use serde::Serialize;

use crate::entanglement::swap_bound_f;
use crate::error::{Error, Result};
use crate::state::SqueezeParam;

use super::graph::{graph_distance, partition_along_path, BondGraph, RegionPartition};

/// Upper bound on the two-mode squeezing that Gaussian measurements can
/// localize between two vertices.
#[derive(Debug, Clone, Serialize)]
pub struct LeBound {
    pub bound: f64,
    pub distance: Option<usize>,
    /// Strongest bond across each cut `R_i | R_{i+1}`.
    pub cut_strengths: Vec<f64>,
}

/// Seeds with the strongest bond out of `R_0` and folds in each further cut
/// with the swap map. Only the strongest bond per cut is used, so parallel
/// weaker bonds never change the value.
pub fn le_bound_on_partition(g: &BondGraph, part: &RegionPartition) -> Result<LeBound> {
    let n = g.num_vertices();
    let region = part.region_of(n);
    let cuts = part.num_regions().saturating_sub(1);
    let mut strongest = vec![0.0_f64; cuts];
    for e in g.edges() {
        if let (Some(i), Some(j)) = (region[e.u], region[e.v]) {
            if i.abs_diff(j) == 1 {
                let c = i.min(j);
                strongest[c] = strongest[c].max(e.r);
            }
        }
    }
    if let Some(i) = strongest.iter().position(|&s| s == 0.0) {
        return Err(Error::Internal(format!("cut {i} of the partition carries no bond")));
    }
    let mut r = SqueezeParam::zero();
    for (i, &s) in strongest.iter().enumerate() {
        let s = SqueezeParam::new(s)?;
        r = if i == 0 { s } else { swap_bound_f(r, s) };
    }
    Ok(LeBound {
        bound: r.r(),
        distance: Some(cuts),
        cut_strengths: strongest,
    })
}

pub fn le_gaussian_bound(g: &BondGraph, a: usize, b: usize) -> Result<LeBound> {
    if a == b {
        return Err(Error::invalid("localizable entanglement needs two distinct vertices"));
    }
    if graph_distance(g, a, b)?.distance.is_none() {
        return Ok(LeBound {
            bound: 0.0,
            distance: None,
            cut_strengths: Vec::new(),
        });
    }
    let part = partition_along_path(g, a, b)?;
    le_bound_on_partition(g, &part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::chain_decay_f;

    fn sp(r: f64) -> SqueezeParam {
        SqueezeParam::new(r).unwrap()
    }

    #[test]
    fn chain_matches_swap_recursion() {
        let rep = chain_decay_f(sp(0.8), 12).unwrap();
        let g = BondGraph::path(14, sp(0.8)).unwrap();
        for d in 1..=13 {
            let b = le_gaussian_bound(&g, 0, d).unwrap();
            assert_eq!(b.distance, Some(d));
            assert!((b.bound - rep.values[d - 1]).abs() < 1e-14);
        }
    }

    #[test]
    fn complete_graph_neighbours() {
        let g = BondGraph::complete(6, sp(0.9)).unwrap();
        assert_eq!(le_gaussian_bound(&g, 1, 4).unwrap().bound, 0.9);
    }

    #[test]
    fn parallel_bonds() {
        let mut g = BondGraph::path(4, sp(1.0)).unwrap();
        let before = le_gaussian_bound(&g, 0, 3).unwrap().bound;
        g.add_edge(1, 2, sp(0.3)).unwrap();
        assert_eq!(le_gaussian_bound(&g, 0, 3).unwrap().bound, before);
        g.add_edge(1, 2, sp(1.5)).unwrap();
        assert!(le_gaussian_bound(&g, 0, 3).unwrap().bound > before);
    }

    #[test]
    fn disconnected_and_degenerate() {
        let g = BondGraph::new(3);
        assert_eq!(le_gaussian_bound(&g, 0, 2).unwrap().bound, 0.0);
        assert!(le_gaussian_bound(&g, 1, 1).is_err());
    }

    #[test]
    fn reversal_symmetry() {
        let mut g = BondGraph::grid(4, 3, sp(0.7)).unwrap();
        g.add_edge(5, 6, sp(1.3)).unwrap();
        g.add_edge(0, 4, sp(0.2)).unwrap();
        let part = partition_along_path(&g, 0, 11).unwrap();
        let fwd = le_bound_on_partition(&g, &part).unwrap();
        let back = le_bound_on_partition(&g, &part.reversed()).unwrap();
        assert!((fwd.bound - back.bound).abs() < 1e-14);
    }
}
