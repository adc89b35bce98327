//! Numerical laboratory for the p-Poisson equation `-div(|Du|^{p-2} Du) = f`
//! with low-regularity right-hand sides.
//!
//! The crate is organized around a measurement pipeline:
//!
//! - [`grid`] — lattice discretization of a bounded planar domain, sampled
//!   scalar/vector fields, discrete calculus (gradients, ball averages) and
//!   quadrature with a polar subcell rule for integrable point singularities.
//! - [`spaces`] — estimators for Morrey norms and Stummel–Kato moduli over
//!   sampled fields, embedding checks, and the closed-form predicted gradient
//!   Hölder exponent `alpha(p, lambda, n, gamma)`.
//! - [`solver`] — variational solver for the p-Poisson Dirichlet problem via
//!   energy minimization, the p-harmonic replacement subproblem on balls, and
//!   an exact radial oracle used for verification.
//! - [`analysis`] — Campanato excess profiles with power-law exponent fits,
//!   Fefferman–Phong ratio checks, the duality pairing bound, and the excess
//!   comparison decomposition.
//! - [`bench`] — benchmark problem families (radial power sources and Serrin
//!   functions) with known Morrey exponents and oracle-verified solutions.
//!
//! Everything operates on immutable inputs and returns plain values, so the
//! estimators can run in parallel over balls, centers, and cases.

pub mod analysis;
pub mod bench;
pub mod error;
mod fit;
pub mod grid;
pub mod report;
pub mod solver;
pub mod spaces;
pub mod testfield;

pub use error::{Error, Result};
