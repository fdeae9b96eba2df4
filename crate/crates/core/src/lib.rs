//! Comparison of finite Markov kernels under a partial order, mixing
//! diagnostics, and fastest-mixing constructions for monotone
//! birth-and-death chains.

pub mod chains;
pub mod duality;
pub mod error;
pub mod kernel;
pub mod mixing;
pub mod orders;
pub mod pmf;
pub mod poset;
pub mod search;
pub mod spectral;
pub mod structures;

pub use error::{Error, Result};
pub use kernel::Kernel;
pub use pmf::Pmf;
pub use poset::Poset;
