//! Charging dynamics of a Dicke-Ising quantum battery: a chain of two-level
//! ions with power-law `σˣσˣ` hopping, driven by a truncated bosonic mode.
//!
//! The crate is organised bottom-up:
//!
//! - [`hilbert`]: composite space, sparse operators and pure states;
//! - [`model`]: Hamiltonian assembly with counter-rotating toggles;
//! - [`dynamics`]: ground states, spectrum scans and time propagation;
//! - [`observables`]: reduced states, energies, ergotropy, entropy;
//! - [`harness`]: run configuration, experiment drivers and output files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod observables;

pub use error::{Error, Result};
