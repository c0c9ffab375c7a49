//! Ideal circle patterns on closed oriented surfaces.
//!
//! A weighted cellular decomposition assigns every edge of a surface
//! decomposition an exterior intersection angle in `(0, π)`. This crate
//! decides whether the decomposition is realized by an ideal circle pattern
//! (one circle per vertex, interstices degenerated to points) and computes
//! the pattern when it exists:
//!
//! * [`complex`] — half-edge representation of the decomposition, structural
//!   validation, the per-face weight-sum condition, the star-vertex
//!   triangulation, and per-vertex characters (sums of incident weights).
//! * [`geometry`] — two-circle configuration kernels in Euclidean and
//!   hyperbolic background geometry: edge lengths, inner angles, analytic
//!   angle gradients, cone angles, vertex curvature, and the Gauss–Bonnet
//!   consistency residual.
//! * [`flow`] — the combinatorial Ricci flows on the radius vector,
//!   integrated adaptively in log coordinates, with terminal classification
//!   (converged / collapsed to zero / undetermined), decay-rate fits, and
//!   conservation diagnostics.
//! * [`criteria`] — existence and non-existence verdicts from per-vertex
//!   character thresholds, prescribed-curvature interval tests, and
//!   brute-force subset inequalities at desk scale.
//! * [`samples`] — parametric families of decompositions (sphere, torus,
//!   higher genus) used for experiments and tests.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature instead of `std` to build without the platform math library.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("circleflow-core needs either the `std` or the `libm` feature for f64 math");

pub mod complex;
pub mod criteria;
pub mod flow;
pub mod geometry;
pub mod samples;

mod math;
