//! Open-system simulation of a two-level oscillator travelling through a
//! Mach-Zehnder interferometer while coupled to an Ohmic (Lorentz-Drude)
//! thermal bath.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmath`]: 2×2 density matrices and the information measures on them.
//! * [`bath`]: spectral density, occupation numbers, stationary and transient
//!   master-equation coefficients.
//! * [`dynamics`]: the two-level Lindblad generator, an RK4 propagator, the
//!   closed-form propagator and the Gibbs fixed point.
//! * [`interferometer`]: beamsplitters, detector statistics and pointer
//!   distributions.
//! * [`thermo`]: entropy bookkeeping, second-law and Hatano-Sasa checks,
//!   quadratures and heat.
//! * [`config`], [`commands`], [`acceptance`]: the command-line front end.
//!
//! Units follow ħ = 1: frequencies and rates in s⁻¹, times in s, temperatures
//! in kelvin converted through [`bath::K_B_OVER_HBAR`].

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod bath;
pub mod commands;
pub mod config;
pub mod dynamics;
mod error;
pub mod interferometer;
pub mod output;
pub mod qmath;
pub mod quadrature;
pub mod thermo;

pub use error::{Error, Result};

/// Artifact version recorded in every emitted file header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
