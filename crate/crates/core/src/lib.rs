//! Random Lindblad dynamics: random-matrix ensembles for jump operators,
//! GKSL propagation, decoherence rates and their ensemble statistics.

pub mod concentration;
pub mod decoherence;
pub mod ensembles;
pub mod error;
pub mod lindblad;
pub mod numerics;
pub mod randomness;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
