//! Construction and numerical certification of isospectral potentials and
//! conformally equivalent isospectral metrics on spheres, balls and compact
//! Lie groups.
//!
//! The library is organized around the pipeline
//!
//! ```text
//! jmaps (linear map families j, j', c, c')
//!   -> geometry (torus actions, admissible 1-forms, metrics g_lambda, potentials)
//!   -> galerkin (exact-moment Rayleigh-Ritz pencils, spectrum comparison)
//!   -> liegroup (left-invariant metrics, per-representation block Laplacians)
//!   -> nonisometry (algebraic necessary conditions, optimization evidence)
//! ```
//!
//! with `numkit` and `liealg` supplying the dense linear algebra and the
//! concrete compact Lie algebra arithmetic underneath. Everything is
//! deterministic: all randomness is seeded explicitly and all reductions use
//! fixed summation order, so identical inputs reproduce bit-identical outputs.

pub mod error;
pub mod galerkin;
pub mod geometry;
pub mod jmaps;
pub mod liealg;
pub mod liegroup;
pub mod nonisometry;
pub mod numkit;
pub mod poly;
pub mod report;
pub mod search;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
