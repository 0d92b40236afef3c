//! Single-photon Mach–Zehnder interferometry with the photon's own
//! polarization as a which-way detector.
//!
//! The crate covers the predictive path/phase duality (`D² + V² ≤ 1`), the
//! retrodictive four-state discrimination game and its ellipse relation,
//! and seeded Monte Carlo simulation of the guessing games.

pub mod duality;
pub mod error;
pub mod interferometer;
pub mod protocols;
pub mod qmath;
pub mod states;

pub use error::{Error, QmathError, Result};
