//! A desk-scale cavity-QED laboratory.
//!
//! Prepares coherent-state superpositions with Ramsey interferometry and a
//! dispersive conditional phase, damps them with a cavity master equation,
//! and reconstructs their Wigner functions two ways: tomographically
//! (filtered back-projection of quadrature marginals) and directly (the
//! displaced-parity measurement with a probe atom).

pub mod error;
pub mod fock;
pub mod dynamics;
pub mod hermite;
pub mod protocol;
pub mod tomo;
pub mod direct;
pub mod wigner;

pub use error::{Error, Result};
