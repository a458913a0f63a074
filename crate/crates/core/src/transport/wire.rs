//! Kraus maps of Gaussian wires in a truncated number basis, and the
//! flat-spectrum check on two-mode unitaries.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{embed, fock_gate};
use crate::linalg::{hermitian_eigenvalues, sqrt_psd, unitarity_defect, C64};
use crate::ops::StandardGate;

use super::ensemble::{proportional_unitary_defect, KrausEnsemble};

/// Spectral values closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Eigenvalues below this fraction of the largest are not "top" eigenvalues.
pub const TOP_FRACTION: f64 = 1e-4;
const UNITARY_INPUT_TOL: f64 = 1e-8;
/// Largest Hilbert-space dimension handled by the dense wire code.
pub const MAX_WIRE_DIM: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct FlatSpectrumReport {
    pub cutoff: usize,
    /// Spectrum of the first-mode reduced state of `U|0,0⟩`, descending.
    pub spectrum: Vec<f64>,
    pub trace: f64,
    /// Smallest gap between consecutive top eigenvalues; infinite when fewer
    /// than two are above `TOP_FRACTION` of the largest.
    pub min_gap: f64,
    pub top_count: usize,
    pub degenerate: bool,
    /// Spectrum of `tr₂ U†(1⊗|0⟩⟨0|)U`, descending.
    pub literal_spectrum: Vec<f64>,
}

pub fn flat_spectrum_test(u: &DMatrix<C64>, cutoff: usize) -> Result<FlatSpectrumReport> {
    let d = cutoff;
    if d < 2 || u.nrows() != d * d || u.ncols() != d * d {
        return Err(Error::invalid(format!("expected a {0}x{0} two-mode unitary", d * d)));
    }
    let defect = unitarity_defect(u);
    if !(defect <= UNITARY_INPUT_TOL) {
        return Err(Error::invalid(format!("U is not unitary (defect {defect:.3e})")));
    }
    // U|0,0⟩ reshaped with the first mode as row index.
    let m = DMatrix::from_fn(d, d, |a, b| u[(a * d + b, 0)]);
    let mut spectrum = hermitian_eigenvalues(&(&m * m.adjoint()));
    spectrum.reverse();
    let trace: f64 = spectrum.iter().sum();

    let mut literal = DMatrix::<C64>::zeros(d, d);
    for b in 0..d {
        // Rows ⟨i,0|U restricted to columns |a,b⟩.
        let rb = DMatrix::from_fn(d, d, |i, a| u[(i * d, a * d + b)]);
        literal += rb.adjoint() * rb;
    }
    let mut literal_spectrum = hermitian_eigenvalues(&literal);
    literal_spectrum.reverse();

    let top: Vec<f64> = spectrum.iter().copied().filter(|&x| x >= TOP_FRACTION * spectrum[0]).collect();
    let min_gap = top.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    Ok(FlatSpectrumReport {
        cutoff,
        trace,
        top_count: top.len(),
        degenerate: min_gap <= DEGENERACY_TOL,
        min_gap,
        spectrum,
        literal_spectrum,
    })
}

/// Mode roles of a wire step. Logical states are level tuples on the carrier
/// modes; every mode outside `carrier_in` starts in vacuum and every mode
/// outside `carrier_out` is measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WireLayout {
    pub cutoff: usize,
    pub num_modes: usize,
    pub carrier_in: Vec<usize>,
    pub carrier_out: Vec<usize>,
    pub logical: Vec<Vec<usize>>,
}

impl WireLayout {
    fn check(&self) -> Result<()> {
        if self.cutoff.checked_pow(self.num_modes as u32).is_none_or(|d| d > MAX_WIRE_DIM) {
            return Err(Error::Unsupported(format!("wire space exceeds {MAX_WIRE_DIM} dimensions")));
        }
        if self.cutoff < 2 || self.logical.len() < 2 {
            return Err(Error::invalid("need cutoff >= 2 and at least two logical states"));
        }
        for modes in [&self.carrier_in, &self.carrier_out] {
            if modes.is_empty() || modes.iter().any(|&m| m >= self.num_modes) {
                return Err(Error::invalid("carrier modes out of range"));
            }
        }
        if self.carrier_out.len() >= self.num_modes {
            return Err(Error::invalid("no mode left to measure"));
        }
        for s in &self.logical {
            if s.len() != self.carrier_in.len() || s.len() != self.carrier_out.len() {
                return Err(Error::invalid("logical states must give one level per carrier mode"));
            }
            if s.iter().any(|&l| l >= self.cutoff) {
                return Err(Error::invalid("logical level beyond the cutoff"));
            }
        }
        Ok(())
    }

    pub fn measured_modes(&self) -> Vec<usize> {
        (0..self.num_modes).filter(|m| !self.carrier_out.contains(m)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WireReport {
    /// Measurement outcome index of each kept map.
    pub outcomes: Vec<usize>,
    /// `1 − σ_min/σ_max` for each kept map.
    pub defects: Vec<f64>,
    pub max_defect: f64,
    /// Smallest map defect; a perfect wire needs every defect to vanish.
    pub min_defect: f64,
    /// `λ_max(1 − Σ K†K)`: weight leaving the logical subspace.
    pub leakage: f64,
    /// Largest population on the top truncation level over logical inputs.
    pub edge_population: f64,
    /// Kept maps, completed by `√(1 − Σ K†K)` when `leakage` is nonzero.
    #[serde(skip)]
    pub ensemble: KrausEnsemble,
    #[serde(skip)]
    pub maps: Vec<DMatrix<C64>>,
}

fn digits(mut index: usize, cutoff: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % cutoff;
        index /= cutoff;
    }
    out
}

fn index_of(levels: &[usize], cutoff: usize) -> usize {
    levels.iter().fold(0, |acc, &l| acc * cutoff + l)
}

/// Per-outcome logical maps `K_j[b, a] = ⟨η_j|⟨s_b| U |s_a⟩|0…⟩`.
///
/// `basis` holds the measurement vectors as columns over the measured modes
/// (number basis when `None`). The input is refused when a logical input
/// puts more than `budget` population on the top truncation level.
pub fn wire_kraus_extract(
    layout: &WireLayout,
    u: &DMatrix<C64>,
    basis: Option<&DMatrix<C64>>,
    budget: f64,
) -> Result<WireReport> {
    layout.check()?;
    let (d, n) = (layout.cutoff, layout.num_modes);
    let dim = d.pow(n as u32);
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::invalid(format!("wire unitary must be {dim}x{dim}")));
    }
    let measured = layout.measured_modes();
    let mdim = d.pow(measured.len() as u32);
    let identity;
    let basis = match basis {
        Some(b) => {
            if b.nrows() != mdim || b.ncols() != mdim {
                return Err(Error::invalid(format!("measurement basis must be {mdim}x{mdim}")));
            }
            if !(unitarity_defect(b) <= UNITARY_INPUT_TOL) {
                return Err(Error::invalid("measurement basis is not complete and orthonormal"));
            }
            b
        }
        None => {
            identity = DMatrix::identity(mdim, mdim);
            &identity
        }
    };

    let k = layout.logical.len();
    let mut outputs = Vec::with_capacity(k);
    let mut edge_population = 0.0_f64;
    for s in &layout.logical {
        let mut levels = vec![0; n];
        for (&m, &l) in layout.carrier_in.iter().zip(s) {
            levels[m] = l;
        }
        let mut e = DVector::zeros(dim);
        e[index_of(&levels, d)] = C64::new(1.0, 0.0);
        let out = u * e;
        let edge: f64 = (0..dim)
            .filter(|&i| digits(i, d, n).contains(&(d - 1)))
            .map(|i| out[i].norm_sqr())
            .sum();
        edge_population = edge_population.max(edge);
        outputs.push(out);
    }
    if edge_population > budget {
        return Err(Error::Truncation {
            defect: edge_population,
            budget,
            suggested_cutoff: d + 1,
        });
    }

    // amplitude[(b, m)] for each input a: carrier_out at logical b, measured at m.
    let full_index = |b: usize, m: usize| {
        let mut levels = vec![0; n];
        for (&mode, &l) in layout.carrier_out.iter().zip(&layout.logical[b]) {
            levels[mode] = l;
        }
        for (&mode, l) in measured.iter().zip(digits(m, d, measured.len())) {
            levels[mode] = l;
        }
        index_of(&levels, d)
    };
    let mut outcomes = Vec::new();
    let mut maps = Vec::new();
    for j in 0..mdim {
        let kj = DMatrix::from_fn(k, k, |b, a| {
            (0..mdim).map(|m| basis[(m, j)].conj() * outputs[a][full_index(b, m)]).sum::<C64>()
        });
        if kj.iter().any(|z| z.norm() > 1e-14) {
            outcomes.push(j);
            maps.push(kj);
        }
    }
    let defects: Vec<f64> = maps.iter().map(proportional_unitary_defect).collect();
    let mut gram = DMatrix::<C64>::zeros(k, k);
    for m in &maps {
        gram += m.adjoint() * m;
    }
    let rest = DMatrix::identity(k, k) - gram;
    let leakage = hermitian_eigenvalues(&rest).last().copied().unwrap_or(0.0).max(0.0);
    let mut ops = maps.clone();
    if leakage > 1e-12 {
        ops.push(sqrt_psd(&rest));
    }
    Ok(WireReport {
        outcomes,
        max_defect: defects.iter().copied().fold(0.0, f64::max),
        min_defect: defects.iter().copied().fold(f64::INFINITY, f64::min),
        defects,
        leakage,
        edge_population,
        ensemble: KrausEnsemble::new(ops)?,
        maps,
    })
}

/// `G_k⋯G_1` for a gate list applied in order on the `num_modes` box.
pub fn wire_unitary(gates: &[(StandardGate, Vec<usize>)], cutoff: usize, num_modes: usize) -> Result<DMatrix<C64>> {
    let dim = cutoff.pow(num_modes as u32);
    let mut u = DMatrix::identity(dim, dim);
    for (g, modes) in gates {
        u = embed(&fock_gate(*g, cutoff), cutoff, num_modes, modes)? * u;
    }
    Ok(u)
}

/// One-mode wire: the carrier and a fresh vacuum mode meet on a beam
/// splitter, then the old carrier is measured.
pub fn beamsplitter_wire(theta: f64, cutoff: usize) -> Result<(WireLayout, DMatrix<C64>)> {
    let layout = WireLayout {
        cutoff,
        num_modes: 2,
        carrier_in: vec![0],
        carrier_out: vec![1],
        logical: vec![vec![0], vec![1]],
    };
    let u = wire_unitary(&[(StandardGate::BeamSplitter { theta }, vec![0, 1])], cutoff, 2)?;
    Ok((layout, u))
}

/// A slab of width `k` in `dim` dimensions read as a wire: each column holds
/// `k^{dim−1}` modes. Column `j` meets column `j+1` (fresh vacua) through
/// beam splitters between partner modes, column `j+1` is mixed by a beam
/// splitter chain, and column `j` is measured. The logical qubit is a single
/// photon in the first mode of a column versus vacuum. The network is passive,
/// so a logical input never reaches level 2 and a cutoff of 3 is exact.
pub fn slab_wire(k: usize, dim: usize, theta: f64, cutoff: usize) -> Result<(WireLayout, DMatrix<C64>)> {
    if k < 1 || dim < 1 {
        return Err(Error::invalid("slab width and dimension must be >= 1"));
    }
    let m = k.pow(dim as u32 - 1);
    let num_modes = 2 * m;
    let mut gates = Vec::new();
    for i in 0..m {
        gates.push((StandardGate::BeamSplitter { theta }, vec![i, m + i]));
    }
    for i in 0..m.saturating_sub(1) {
        gates.push((StandardGate::BeamSplitter { theta: 0.5 * theta }, vec![m + i, m + i + 1]));
    }
    let zero = vec![0; m];
    let mut one = vec![0; m];
    one[0] = 1;
    let layout = WireLayout {
        cutoff,
        num_modes,
        carrier_in: (0..m).collect(),
        carrier_out: (m..2 * m).collect(),
        logical: vec![zero, one],
    };
    layout.check()?;
    let u = wire_unitary(&gates, cutoff, num_modes)?;
    Ok((layout, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::two_mode_squeezer;

    #[test]
    fn identity_has_single_top_eigenvalue() {
        let rep = flat_spectrum_test(&DMatrix::identity(16, 16), 4).unwrap();
        assert_eq!(rep.spectrum[0], 1.0);
        assert!(rep.spectrum[1..].iter().all(|&x| x.abs() < 1e-15));
        assert_eq!(rep.top_count, 1);
        assert!(!rep.degenerate);
    }

    #[test]
    fn squeezer_spectrum_is_geometric() {
        let r = 0.5_f64;
        let rep = flat_spectrum_test(&two_mode_squeezer(r, 20), 20).unwrap();
        let l2 = r.tanh().powi(2);
        for n in 0..6 {
            assert!((rep.spectrum[n] - (1.0 - l2) * l2.powi(n as i32)).abs() < 1e-9);
        }
        assert!((rep.trace - 1.0).abs() < 1e-12);
        assert!(!rep.degenerate);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::identity(9, 9) * C64::new(0.5, 0.0);
        assert!(flat_spectrum_test(&m, 3).is_err());
    }

    #[test]
    fn beamsplitter_wire_maps() {
        let theta = 0.6_f64;
        let (layout, u) = beamsplitter_wire(theta, 3).unwrap();
        let rep = wire_kraus_extract(&layout, &u, None, 1e-12).unwrap();
        assert_eq!(rep.outcomes, vec![0, 1]);
        let k0 = &rep.maps[0];
        assert!((k0[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((k0[(1, 1)].norm() - theta.sin().abs()).abs() < 1e-12);
        assert!(rep.leakage < 1e-12);
        assert!((rep.defects[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slab_is_exact_at_cutoff_three() {
        let (layout, u) = slab_wire(2, 2, 0.7, 3).unwrap();
        assert_eq!(layout.num_modes, 4);
        let rep = wire_kraus_extract(&layout, &u, None, 1e-12).unwrap();
        assert_eq!(rep.edge_population, 0.0);
        assert!(rep.max_defect > 0.01);
    }

    #[test]
    fn squeezing_wire_hits_budget() {
        let layout = WireLayout {
            cutoff: 3,
            num_modes: 2,
            carrier_in: vec![0],
            carrier_out: vec![1],
            logical: vec![vec![0], vec![1]],
        };
        let u = wire_unitary(&[(StandardGate::TwoModeSqueezer { r: 0.8 }, vec![0, 1])], 3, 2).unwrap();
        assert!(matches!(wire_kraus_extract(&layout, &u, None, 1e-6), Err(Error::Truncation { .. })));
    }
}
