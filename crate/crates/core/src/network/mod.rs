//! Bond graphs, the localizable-entanglement bound, and Monte-Carlo
//! estimators for percolation and filtered repeater chains.

mod bound;
mod graph;
mod montecarlo;

pub use bound::{le_bound_on_partition, le_gaussian_bound, LeBound};
pub use graph::{graph_distance, partition_along_path, BondGraph, EdgeRecord, GraphDistance, RegionPartition};
pub use montecarlo::{bond_percolation, percolation_sweep, repeater_filter_chain, Estimate, RepeaterStats};
