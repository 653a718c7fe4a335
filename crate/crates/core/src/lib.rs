//! Synthesis of numerical-scheme coefficients by self-adaptive Differential
//! Evolution, together with the machinery needed to check what was found.
//!
//! The crate covers three scheme families:
//!
//! - first-derivative finite-difference stencils ([`StencilScheme`]),
//! - explicit Runge-Kutta methods ([`ButcherTableau`]),
//! - Adams-Bashforth multistep integrators ([`MultistepScheme`]).
//!
//! Coefficients are evolved by the DE/rand/1/bin engine in [`de`], scored by
//! the evaluators in [`fitness`], audited algebraically by
//! [`conditions`] and empirically by the step-size sweeps in [`validation`].
//!
//! Everything here is `no_std` (with `alloc`); file formats, the CLI and
//! parallel population evaluation live in the `evoscheme` crate.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod catalog;
pub mod conditions;
pub mod de;
mod error;
pub mod fitness;
mod math;
pub mod scheme;
pub mod validation;

pub use error::{Error, Result};
pub use scheme::{ButcherTableau, MultistepScheme, StencilScheme, StencilTemplate};
