//! Error taxonomy for the numerical model.
//!
//! Every fallible operation returns [`ModelError`]; the variants are grouped by
//! the kind of precondition they protect. Messages carry the offending numbers
//! so that a failing run can be diagnosed from the report alone.

use thiserror::Error;

/// Errors raised by grid construction, operator application, and checks.
#[derive(Debug, Error)]
pub enum ModelError {
    /// Two wave functions live on different grids (or in different pictures)
    /// where a single grid is required.
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    /// A grid parameter is outside its legal range.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A wave function carries non-negligible mass at the edge of the
    /// θ-box or of the λ-band, so the requested operation would alias.
    #[error("probe escapes grid: {0}")]
    ProbeEscapesGrid(String),

    /// A translation/dilation would move support across the box boundary.
    #[error("margin violation: {0}")]
    MarginViolation(String),

    /// An operation that needs a spectral band saw content outside it.
    #[error("band violation: {0}")]
    BandViolation(String),

    /// Spectral interval bounds are not ordered as 0 ≤ a < b.
    #[error("invalid spectral interval: {0}")]
    InvalidInterval(String),

    /// The capped-growth semigroup guard Λ·y ≤ 700 failed.
    #[error("overflow guard: Λ·y = {product:.3e} exceeds 700; largest admissible Λ for y = {y} is {suggested:.6e}")]
    OverflowGuard { product: f64, y: f64, suggested: f64 },

    /// A probe lies (numerically) outside the quadratic-form domain, or the
    /// phase family admits no convergent form for generic probes.
    #[error("form domain guard: {0}")]
    FormDomain(String),

    /// The special-function kernel was requested at an illegal parameter.
    #[error("invalid kernel parameter: {0}")]
    InvalidKernelParameter(String),

    /// Gamma evaluated at or too near a pole (non-positive integers).
    #[error("gamma pole: z = {0:.6e} + {1:.6e}i is within 1e-12 of a pole")]
    GammaPole(f64, f64),

    /// A phase specification string failed to parse; the message names the
    /// offending token.
    #[error("phase parse error: {0}")]
    PhaseParse(String),

    /// A phase value violates a structural invariant (unimodularity,
    /// symmetry, zero-set symmetry, matrix shape).
    #[error("invalid phase: {0}")]
    InvalidPhase(String),

    /// A power-iteration norm estimate failed to converge; callers surface
    /// this as an indeterminate verdict rather than a hard failure.
    #[error("norm estimate did not converge: {0}")]
    NonConvergence(String),

    /// Configuration file or flag errors (unknown key, bad value, bad list).
    #[error("config error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, ModelError>;
