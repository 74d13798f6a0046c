//! Numerical laboratory for KPP traveling fronts in a 2-D cylinder with
//! shear flow and heat loss.
//!
//! The crate computes principal-eigenvalue curves of the cross-section
//! operators, minimal front speeds from the dispersion relation, and
//! traveling-front profiles on truncated cylinders, and verifies
//! empirically that interior heat loss concentrating in boundary layers
//! converges to a Robin boundary loss: eigencurves, minimal speeds and
//! front profiles all converge to their Robin counterparts.

pub mod cli;
pub mod convergence;
pub mod dispersion;
pub mod eigen;
pub mod error;
pub mod front;
pub mod grid;
pub mod models;
pub mod tridiag;

pub use error::{Error, Result};
