//! Projections of non-physical tomography estimates onto valid quantum
//! channels and measurements.
//!
//! A linear-inversion estimate of a channel is a Hermitian matrix on the
//! doubled space `S ⊗ A` that may fail complete positivity (CP) or trace
//! preservation (TP). A linear-inversion estimate of a detector is a list of
//! Hermitian matrices that may fail positivity or completeness. This crate
//! maps such estimates onto the closest (or nearly closest) valid object in
//! Frobenius norm:
//!
//! - [`projections`]: the elementary convex projections (TP subspace, unit
//!   trace PSD matrices, PSD cone, sum-to-identity subspace) and identity
//!   mixing.
//! - [`cba`]: the analytic congruence corrections that restore TP (or
//!   completeness) while keeping positivity, and the one-shot pipelines
//!   built from them.
//! - [`dykstra`]: two-set Dykstra alternating projections and the composed
//!   Dykstra + correction methods.
//! - [`oracle`]: high-precision reference projections backed by two
//!   independent solvers.
//! - [`experiments`]: benchmark input generation, sweeps and statistics.
//!
//! Tensor ordering is fixed crate-wide: `S` is the leading factor, so the
//! basis ket `|s⟩|a⟩` has row index `s·d + a`.

#![forbid(unsafe_code)]

pub mod cba;
pub mod dykstra;
pub mod error;
pub mod experiments;
pub mod matcore;
pub mod oracle;
pub mod projections;

pub use error::{Error, Result};
pub use matcore::{ChoiCandidate, HermitianMatrix, PovmCandidate, Rng, Spectrum};
