//! Multipole covariance-matrix entanglement witnesses for symmetric
//! (permutation-invariant) N-qubit states.

pub mod angular;
pub mod bipartite;
mod cache;
pub mod error;
pub mod linalg;
pub mod scan;
pub mod selftest;
pub mod states;
pub mod tensors;
pub mod witness;

pub use error::{Error, Result};
