//! Nonlocal Rydberg-EIT susceptibility, glass–atoms–glass transfer-matrix
//! optics and the spin-dependent transverse shift of a reflected Gaussian
//! probe.

// `!(x > 0.0)` range checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod error;
pub mod linalg;
pub mod optics;
pub mod oracle;
pub mod quadrature;
pub mod response;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
