use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every numerical layer of the crate.
///
/// Pole-type errors carry the offending location so callers can re-route a
/// path or pick a different sample point instead of guessing.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("argument {z} is within {guard:e} of a lattice point")]
    PoleAtLatticePoint { z: Complex64, guard: f64 },

    #[error("argument {z} is within {guard:e} of a zero of theta")]
    PoleAtThetaZero { z: Complex64, guard: f64 },

    #[error("series did not reach the requested tolerance within {terms} terms")]
    NonConvergent { terms: usize },

    #[error("finite-difference step underflow: requested tolerance {tolerance:e} is unreachable in double precision")]
    StepUnderflow { tolerance: f64 },

    #[error("iteration failed to converge after {iterations} steps (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("tau is inconsistent with the base point: |lambda(tau) - t| = {mismatch:e}")]
    InconsistentTau { mismatch: f64 },

    #[error("point maps to the section at infinity (z = {z} is on the lattice)")]
    PointAtInfinity { z: Complex64 },

    #[error("sampled function has too few usable samples near the evaluation point ({available} available, {needed} needed)")]
    InsufficientSamples { available: usize, needed: usize },

    #[error("abelian integral jumped by more than half a period between adjacent samples (index {index})")]
    BranchJump { index: usize },

    #[error("state hit a chart singularity at {location}")]
    PoleHit { location: Complex64 },

    #[error("integration aborted: state within pole guard of a chart singularity near base {base} (offending value {location})")]
    PoleApproach { base: Complex64, location: Complex64 },

    #[error("inconsistent conversion context: {0}")]
    InconsistentContext(String),

    #[error("parameter point does not match the required pattern: {0}")]
    PatternMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
