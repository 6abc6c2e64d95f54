//! Numerical model of standard pairs and half-sided modular inclusions on the
//! positive half-line, discretized in the log coordinate θ = ln(spectral
//! variable).
//!
//! The base pair lives on L²(ℝ, dθ): the positive generator acts as
//! multiplication by e^θ, the translation group as multiplication by
//! e^{ise^θ}, the modular group as θ-translation by 2πt, and the modular
//! conjugation as pointwise complex conjugation. Candidate inclusions are
//! parameterized by unimodular symmetric boundary phases; three independent
//! detectors (spectral-subspace defect, direct subspace membership, inner-
//! function leakage) decide inclusion and must agree — that agreement is the
//! central property this crate verifies, together with the commutation
//! relations, the cocycle identity, spectral orthogonality, the semigroup
//! contraction bound, the generator form inequality, and the distributional
//! Fourier kernel of the translation unitaries.
//!
//! Modules:
//! - [`grid`]: the discretization box, Fourier pair, probe families.
//! - [`schrod`]: base-pair operators and subspace membership.
//! - [`special`]: complex gamma and the translation-unitary kernel.
//! - [`phases`]: boundary phases, parsing, inner-function tests, kernels.
//! - [`inclusion`]: standard pairs, detectors, inclusion checks.
//! - [`report`]: machine-readable verification reports.
//! - [`exec`]: parallel/sequential execution policy.

pub mod error;
mod fft;
pub mod grid;
pub mod exec;
pub mod inclusion;
pub mod phases;
pub mod report;
pub mod schrod;
pub mod special;

pub use error::{ModelError, Result};
