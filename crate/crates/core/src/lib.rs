//! Runtime lower bounds for hybrid quantum interior point methods on LPs.
//!
//! The pipeline reads an MPS file, reduces it to a full-row-rank standard
//! form, builds the Newton systems at the canonical iterate `(1, 0, 1)` as
//! matrix-free operators, bounds their sparsity and condition number from
//! below, and turns those into a quantum cycle count that is compared with a
//! measured classical solve time.

pub mod basis;
pub mod classical;
pub mod cost;
pub mod error;
pub mod harness;
pub mod lp;
pub mod newton;
pub mod operator;
pub mod presolve;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result, Verdict};
