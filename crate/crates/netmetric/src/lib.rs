//! Comparing weighted networks through their interiors.
//!
//! A network here is a finite label set with a symmetric, zero-diagonal,
//! positive off-diagonal dissimilarity matrix. The crate provides
//!
//! * exact comparison distances over correspondences and node maps
//!   ([`exact`]),
//! * the interior of a network — barycentric points with a transport-based
//!   semimetric — and finite samplings of it ([`interior`]),
//! * a scalable approximation pipeline built on Euclidean embeddings and
//!   local search ([`approx`]),
//! * synthetic network generators with deterministic seeding ([`gen`]).
//!
//! ```
//! use netmetric::gen::gen_gamma;
//! use netmetric::exact::embedding_distance;
//!
//! let a = gen_gamma(1.0)?;
//! let b = gen_gamma(3.0)?;
//! assert_eq!(embedding_distance(&a, &b)?, 2.0);
//! # Ok::<(), netmetric::Error>(())
//! ```

pub mod approx;
pub mod error;
pub mod exact;
pub mod gen;
pub mod interior;
pub mod mds;
pub mod network;
pub mod rng;
mod transport;

pub use error::{Error, Result};
pub use network::{Correspondence, Network, NodeMapping};

/// Global comparison tolerance for validation and equality checks.
pub const TOL: f64 = 1e-9;

// Keep the guide's code blocks compiling; each chapter is checked as a
// doctest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/interior.md")]
    mod interior {}
    #[doc = include_str!("../../../book/src/exact-distances.md")]
    mod exact_distances {}
    #[doc = include_str!("../../../book/src/approximation.md")]
    mod approximation {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
