//! Transport of a logical qubit along a sequentially prepared wire.

mod ensemble;
mod lemma;
mod wire;
mod words;

pub use ensemble::{
    damping_pair, proportional_unitary_defect, random_ensemble, validate_ensemble, EnsembleDiagnostics,
    EnsembleRecord, KrausEnsemble, MatrixRecord, TransportCase, COMMUTE_TOL, COMPLETENESS_TOL, UNITARY_TOL,
};
pub use lemma::{lemma4_delta, Lemma4Gap, ALIGNED_TOL};
pub use wire::{
    beamsplitter_wire, flat_spectrum_test, slab_wire, wire_kraus_extract, wire_unitary, FlatSpectrumReport, WireLayout,
    WireReport, DEGENERACY_TOL, MAX_WIRE_DIM, TOP_FRACTION,
};
pub use words::{
    decay_rate_nu, recovery_operator, transport_prob_exact, word_operator, NuEstimate, Recovery, TransportReport,
    WORD_BUDGET,
};
