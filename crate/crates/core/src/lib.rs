//! Exact SLOCC classification of four-qubit pure states.
//!
//! The pipeline: generator invariants ([`invariants`]) → three diagnostic
//! quartics and their root structure ([`quartics`]) → discriminating
//! covariants built by transvection ([`covariants`]) → the decision tree
//! ([`classifier`]). [`geometry`] supplies flattenings, multiranks and
//! stratum predicates; [`normal_forms`] generates the Verstraete families.

pub mod classifier;
pub mod covariants;
pub mod error;
pub mod field;
pub mod geometry;
pub mod invariants;
pub mod linalg;
pub mod multiform;
pub mod normal_forms;
pub mod oracles;
pub mod quartics;
pub mod report;
pub mod scalar;
pub mod search;
pub mod state;

pub use error::Error;
pub use field::{Field, Fp, Gaussian};
pub use state::{AnyState, LocalOperator, Permutation, State};
