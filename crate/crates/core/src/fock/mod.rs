//! Truncated number-basis oracle.

mod filter;
mod gates;
mod state;
mod swap;

pub use filter::{
    filter_success_law, filter_to_bell, matched_filter_law, optimal_conversion_probability, FilterLawCandidates,
    FilterReport,
};
pub use gates::{
    beamsplitter, embed, fock_gate, fock_tmss, phase, single_mode_squeezer, squeezed_vacuum_even, two_mode_squeezer,
};
pub use state::{fock_log_negativity, FockDensity, FockVector, FOCK_BUDGET};
pub use swap::{
    extrapolate_to_zero, fock_bell_swap, fock_bell_swap_with, BellSwapReport, BELL_SWAP_BUDGET, BELL_SWAP_SQUEEZINGS,
};
