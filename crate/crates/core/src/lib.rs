//! Ground states of the one-dimensional fractional Gelfand equation
//! `(-Δ)^s u = K e^u`, `s ∈ (1/2, 1)`, computed through the nonlocal
//! shooting map on `v = √(K e^u)`, together with numerical certificates
//! for the identities such profiles satisfy.

pub mod cli;
pub mod continuation;
pub mod error;
pub mod fixedpoint;
pub mod grid;
pub mod params;
pub mod quad;
pub mod riesz;
pub mod spectral;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
