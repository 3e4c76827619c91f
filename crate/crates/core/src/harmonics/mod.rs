//! Special functions on the sphere: Legendre polynomials `P_{k,d}`, the
//! axially symmetric Legendre harmonics `L_{k,d}`, harmonic dimensions,
//! weighted quadrature and the Funk–Hecke coefficients of ReLU powers.

mod activation;
mod constants;
mod legendre;
mod quadrature;

pub use activation::ActivationSpec;
pub use constants::{
    harmonic_dimension, lambda_coefficient, log_harmonic_dimension, normalization_gamma, sphere_surface_ratio,
};
pub use legendre::{
    legendre_derivative, legendre_eval, legendre_harmonic_eval, legendre_harmonic_grad, legendre_roots,
};
pub use quadrature::{gauss_jacobi, weighted_integral, weighted_integral_with_breaks, QuadratureRule};

pub(crate) use constants::{abs_legendre_integral, exact_dimension};
pub(crate) use legendre::{harmonic_grad_into, legendre_unchecked};

use crate::error::{Error, Result};

/// Degree `k` and ambient dimension `d` of a Legendre polynomial / harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LegendreIndex {
    k: u32,
    d: u32,
}

impl LegendreIndex {
    pub fn new(k: u32, d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension d = {d} must be at least 2")));
        }
        Ok(LegendreIndex { k, d })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Exponent `(d-3)/2` of the weight `(1-t^2)^{(d-3)/2}`.
    pub fn weight_exponent(&self) -> f64 {
        (self.d as f64 - 3.0) / 2.0
    }
}

impl std::fmt::Display for LegendreIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(k={}, d={})", self.k, self.d)
    }
}
