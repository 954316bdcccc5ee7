//! Resonances of a two-channel semiclassical Schrödinger system near a
//! transverse crossing of its potentials.
//!
//! The crate contains two independent routes to the resonance positions:
//! closed asymptotic formulas built from the action of the bonding well and
//! Airy cross-product integrals at the crossing ([`asymptotics`]), and a
//! direct coupled-channel solver that propagates the system along a complex
//! distortion contour and locates zeros of the 4×4 Wronskian ([`coupled`],
//! [`finder`]). The [`harness`] runs both over a sweep in `h` and compares.

pub mod error;
pub mod quad;
pub mod specfun;
pub mod crossing;
pub mod model;
pub mod action;
pub mod asymptotics;
pub mod ode;
pub mod coupled;
pub mod shooting;
pub mod finder;
pub mod harness;

pub use error::{Error, Result};
