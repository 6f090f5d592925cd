//! Charge groups, anyon statistics and torus assembly for translationally invariant
//! two-dimensional stabilizer and subsystem codes.
//!
//! The pipeline runs bottom-up: [`gf2`] supplies bit-packed linear algebra,
//! [`code`] and [`lattice`] turn recipes into generators on a torus, [`group`]
//! checks validity and locality, [`charge`] computes charges, strings and their
//! statistics, [`torus`] assembles the finite code and its logical operators and
//! [`decode`] runs matching decoders under Pauli noise. [`analysis`] ties the
//! stages together and produces a serializable report.

pub mod analysis;
pub mod charge;
pub mod code;
pub mod decode;
mod error;
pub mod exec;
pub mod fixtures;
pub mod gf2;
pub mod group;
pub mod lattice;
pub mod torus;

pub use error::Error;
