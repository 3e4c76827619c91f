//! Distribution families on the sphere and in `R^d`: exact samplers, densities
//! and the Gibbs score.

mod density;
mod export;
mod sample_set;
mod sampling;

pub use density::{density_legendre_pair, score_gibbs, sphere_area, stein_operator_trace};
pub use export::write_csv;
pub use sample_set::{Domain, SampleSet};
pub use sampling::{
    sample_gaussian_pair, sample_gibbs, sample_legendre_pair, sample_sphere_t, sample_uniform_sphere,
    DEFAULT_ITERATION_CAP,
};

use crate::error::{Error, Result};
use crate::harmonics::{normalization_gamma, LegendreIndex, QuadratureRule};

/// The signed-Legendre pair: `μ_d ∝ (L_{k,d})_+` and `ν_d ∝ (L_{k,d})_-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendrePairSpec {
    pub k: u32,
    pub d: u32,
    /// `γ_{k,d} = 2 / ∫|L_{k,d}| dτ`.
    pub gamma: f64,
    pub iteration_cap: u64,
}

impl LegendrePairSpec {
    /// Spec with `γ_{k,d}` computed by quadrature.
    pub fn new(k: u32, d: u32, rule: &QuadratureRule) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("the Legendre pair needs k >= 1".into()));
        }
        let gamma = normalization_gamma(LegendreIndex::new(k, d)?, rule)?;
        Ok(LegendrePairSpec { k, d, gamma, iteration_cap: DEFAULT_ITERATION_CAP })
    }

    pub fn index(&self) -> LegendreIndex {
        LegendreIndex::new(self.k, self.d).expect("validated at construction")
    }
}

/// Gibbs measure with density `∝ exp(γ L_{k,d}(x))` against the uniform measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsSpec {
    pub k: u32,
    pub d: u32,
    pub gamma: f64,
    pub iteration_cap: u64,
}

impl GibbsSpec {
    pub fn new(k: u32, d: u32, gamma: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("the Gibbs family needs k >= 1".into()));
        }
        LegendreIndex::new(k, d)?;
        if !(-1.0..=1.0).contains(&gamma) {
            return Err(Error::Domain(format!("gamma = {gamma} must lie in [-1, 1]")));
        }
        Ok(GibbsSpec { k, d, gamma, iteration_cap: DEFAULT_ITERATION_CAP })
    }

    pub fn index(&self) -> LegendreIndex {
        LegendreIndex::new(self.k, self.d).expect("validated at construction")
    }
}

/// `N(0, I_d)` against the Gaussian whose variance along `shrunk_axis` is
/// `shrunk_variance` and 1 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub d: u32,
    pub shrunk_variance: f64,
    pub shrunk_axis: Vec<f64>,
}

impl GaussianSpec {
    /// Default pair: variance 0.1 along `e_d`.
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("Gaussian dimension must be positive".into()));
        }
        let mut axis = vec![0.0; d as usize];
        axis[d as usize - 1] = 1.0;
        Ok(GaussianSpec { d, shrunk_variance: 0.1, shrunk_axis: axis })
    }

    pub fn with_axis(d: u32, shrunk_variance: f64, shrunk_axis: Vec<f64>) -> Result<Self> {
        if shrunk_variance.is_nan() || shrunk_variance <= 0.0 {
            return Err(Error::Domain("shrunk variance must be positive".into()));
        }
        if shrunk_axis.len() != d as usize {
            return Err(Error::DimensionMismatch { expected: d as usize, found: shrunk_axis.len() });
        }
        let norm = shrunk_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(GaussianSpec { d, shrunk_variance, shrunk_axis })
    }
}
