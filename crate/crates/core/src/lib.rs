//! Canonical-ensemble classical-field Monte Carlo for a one-dimensional,
//! harmonically trapped, weakly interacting Bose gas.
//!
//! Units throughout are oscillator units: lengths in `sqrt(hbar / m omega)`,
//! energies in `hbar omega`, temperatures in `hbar omega / k_B`.
//!
//! The crate is organised bottom-up:
//!
//! * [`basis`]: uniform spatial grid, Hermite functions, quadrature.
//! * [`field`]: model parameters, field configurations, energy functional.
//! * [`sampler`]: norm-preserving Metropolis chains and the `T = 0` minimiser.
//! * [`analysis`]: density matrix, condensate identification, occupation
//!   statistics, `g1`, local density fluctuations, blocking errors.
//! * [`idealgas`]: exact quantum and classical-field ideal-gas references.
//! * [`gpe`]: imaginary-time Gross-Pitaevskii ground state and mode cutoff.

pub mod analysis;
pub mod basis;
pub mod error;
pub mod field;
pub mod gpe;
pub mod idealgas;
pub mod linalg;
pub mod quad;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
