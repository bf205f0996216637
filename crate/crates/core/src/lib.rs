//! Numerical simulator for the Lipkin-Meshkov-Glick (LMG) model realized with an
//! NV-center spin ensemble coupled to two superconducting cavity supermodes.
//!
//! The crate is organized as a pipeline:
//!
//! - [`device`]: physical knobs (couplings, Rabi drives, detunings, cavity decay)
//!   and the effective Raman parameters obtained after eliminating the excited
//!   NV level.
//! - [`lmgmap`]: bad-cavity elimination of the supermodes, producing the
//!   generalized LMG triple `(h, lambda, chi)` and collective decay rates.
//! - [`semiclassical`]: mean-field Bloch equations, closed-form steady states,
//!   critical coupling and phase-diagram sweeps.
//! - [`dicke`]: exact finite-N dynamics in the symmetric Dicke sector.
//! - [`squeezing`]: the spin-squeezing parameter from collective-spin moments.
//! - [`hpboson`]: Holstein-Primakoff bosonic reduction with a closed
//!   second-moment solver and a truncated-Fock oracle.
//!
//! Units: every frequency and rate is a plain `f64` holding `value / 2pi` in MHz,
//! so time is measured in units of `1 / (2pi MHz)`. Figure reproductions use
//! dimensionless rates scaled by a reference rate `gamma` instead.
//!
//! All dissipators use the factor-two convention
//! `D[O] rho = 2 O rho O^dag - O^dag O rho - rho O^dag O`.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod csv;
pub mod device;
pub mod dicke;
mod error;
pub mod hpboson;
pub mod linalg;
pub mod lmgmap;
pub mod ode;
pub mod par;
pub mod semiclassical;
pub mod squeezing;

pub use error::{Error, Result};
pub use num_complex::Complex64;
