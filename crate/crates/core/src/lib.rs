pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod fock;
pub mod linalg;
pub mod network;
pub mod ops;
pub mod state;
pub mod transport;

pub use error::{Error, Result};
pub use state::{GaussianState, SqueezeParam};
