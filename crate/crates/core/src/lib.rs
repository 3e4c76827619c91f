//! Feature-learning and fixed-kernel probability metrics on spheres and balls.
//!
//! * [`harmonics`]: Legendre polynomials and harmonics, weighted quadrature,
//!   harmonic dimensions and Funk–Hecke coefficients of ReLU powers.
//! * [`measures`]: exact samplers for the signed-Legendre pair, the Gibbs
//!   family, uniform spheres and anisotropic Gaussians.
//! * [`metrics`]: F1/F2 integral probability metrics and Stein discrepancies,
//!   arc-cosine kernels, sliced and max-sliced 1-Wasserstein distances.
//! * [`experiments`]: the dimension sweeps behind the `sphere-metrics` CLI.

pub mod error;
pub mod experiments;
pub mod harmonics;
pub mod measures;
pub mod metrics;
mod par;
pub mod rng;

pub use error::{Error, Result};
pub use par::with_workers;
pub use rng::RngSeed;

#[cfg(feature = "cli")]
pub use experiments::cli_main;
