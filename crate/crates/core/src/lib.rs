//! Numerics for running FIR filters as quantum circuits: dense complex
//! linear algebra with unitarity certificates, classical reference filters,
//! amplitude encoding of signal windows, single-stage filter unitaries,
//! two-stage cascades through unitary dilation, and finite-shot measurement
//! simulation.

pub mod cascade;
pub mod encoding;
pub mod error;
pub mod filter;
pub mod linalg;
pub mod sampling;
pub mod unitary;

pub use error::{Error, Result};
