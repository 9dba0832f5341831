//! Numerical laboratory for dispersive equations on compact rank-one
//! symmetric spaces: zonal spherical functions, spectral propagators,
//! maximal functions, the Gauss-sum divergence construction and the
//! arithmetic behind it.

pub mod counterexample;
pub mod error;
pub mod geometry;
pub mod jacobi;
pub mod maximal;
pub mod numtheory;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{make_space, Family, RootData2, SpaceParams};
pub use spectral::{PhaseFunction, SphericalSeries};

/// Crate version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
