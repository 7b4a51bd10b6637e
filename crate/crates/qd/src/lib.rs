//! Exact constructions on quadratic hypersurfaces over Q.
//!
//! The crate classifies rational quadratic forms (rank, kernel, signature,
//! Witt decomposition, canonical reduction), solves the Pell and trinomial
//! equations that seed point constructions, builds sequences of integer
//! points on a quadric whose heights grow with ratio ρ_n (the Pisot root of
//! xⁿ − x^{n−1} − ⋯ − 1), and measures rational-approximation quantities of
//! the resulting limit points with certified interval arithmetic.
//!
//! Entry points:
//! - [`qform::QuadraticForm`] — integer-coefficient forms, evaluation, ψ map,
//!   diagonalization.
//! - [`witt`] — isotropy tests, Hilbert symbols, full Witt decomposition.
//! - [`canonical`] — reduction to the two canonical shapes and automorphisms.
//! - [`pell`], [`extremal`] — seed solvers and the point recurrence.
//! - [`approx`] — D/L measures, scans, exponent estimates.
//! - [`spectral`] — ρ_n, Pisot certification, the transfer operator.
//!
//! Everything is exact: integers are arbitrary precision, real quantities are
//! outward-rounded intervals carrying their working precision.

pub(crate) mod arith;
pub mod approx;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod exact;
pub mod extremal;
pub mod pell;
pub mod qform;
pub mod spectral;
pub mod witt;

pub use error::{QdError, Result};
