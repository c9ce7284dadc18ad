//! Isometric shift operators `T[a, φ, Δ]` on discretized spaces of continuous
//! functions, together with the tools used to certify their properties:
//! isometry, codimension-one range, transitivity of the underlying flows,
//! kernel-rank certificates and explicit non-shift witnesses.

pub mod blockmethod;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod funcspace;
pub mod shiftop;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Scalar, ScalarField};

/// Golden ratio conjugate `(√5 − 1) / 2`.
pub const PHI: f64 = 0.618_033_988_749_894_9;

pub(crate) const TAU: f64 = std::f64::consts::TAU;
