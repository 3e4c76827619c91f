use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harmonics::ActivationSpec;
use crate::metrics::TildeMode;
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    /// F1 vs F2 IPM on the signed-Legendre pair.
    IpmSeparation,
    /// F1 vs F2 Stein discrepancy between the uniform and Gibbs measures.
    SdSeparation,
    /// All metrics on the isotropic vs shrunk Gaussian pair.
    GaussianMetrics,
    /// Closed-form arc-cosine kernels against random-feature estimates.
    KernelCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::IpmSeparation => "ipm-sep",
            ExperimentKind::SdSeparation => "sd-sep",
            ExperimentKind::GaussianMetrics => "gauss",
            ExperimentKind::KernelCheck => "kernel-check",
        }
    }
}

/// Dimensions to sweep: `lo:hi[:stride]` (inclusive) or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimRange(Vec<u32>);

impl DimRange {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Config("empty dimension range".into()));
        }
        Ok(DimRange(dims))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn min(&self) -> u32 {
        *self.0.iter().min().expect("non-empty")
    }
}

impl FromStr for DimRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |p: &str| p.trim().parse::<u32>().map_err(|_| Error::Config(format!("bad dimension '{p}' in '{s}'")));
        if s.contains(',') {
            return DimRange::new(s.split(',').map(num).collect::<Result<_>>()?);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, stride) = match parts.as_slice() {
            [one] => (num(one)?, num(one)?, 1),
            [lo, hi] => (num(lo)?, num(hi)?, 1),
            [lo, hi, st] => (num(lo)?, num(hi)?, num(st)?),
            _ => return Err(Error::Config(format!("dimension range '{s}' is not lo:hi[:stride]"))),
        };
        if stride == 0 || hi < lo {
            return Err(Error::Config(format!("dimension range '{s}' needs lo <= hi and stride >= 1")));
        }
        DimRange::new((lo..=hi).step_by(stride as usize).collect())
    }
}

impl std::fmt::Display for DimRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", v.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub k: u32,
    pub dims: DimRange,
    pub n_samples: usize,
    pub n_features: usize,
    pub n_directions: usize,
    pub grid_size: usize,
    pub repetitions: usize,
    pub alpha: u32,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub seed: RngSeed,
    /// Thread count; 0 uses every available core. Results do not depend on it.
    pub workers: usize,
    pub out_csv: Option<PathBuf>,
    pub out_plot: Option<PathBuf>,
    pub tilde_mode: TildeMode,
    /// Gaussian experiment only: rescale samples into the unit ball with this radius.
    pub clip_to_ball: Option<f64>,
    /// Proposal budget of each rejection-sampling call.
    pub iteration_cap: u64,
}

impl ExperimentConfig {
    /// Desk-scale defaults for `experiment`.
    pub fn new(experiment: ExperimentKind) -> Self {
        let (k, dims) = match experiment {
            ExperimentKind::IpmSeparation => (6, vec![3, 4, 5, 6, 7, 8, 9, 10]),
            ExperimentKind::SdSeparation => (5, vec![3, 4, 5, 6, 7, 8, 9, 10]),
            ExperimentKind::GaussianMetrics => (1, vec![2, 4, 8, 16, 32]),
            ExperimentKind::KernelCheck => (1, vec![2, 5, 10]),
        };
        let (n_samples, n_features) = match experiment {
            ExperimentKind::GaussianMetrics => (100_000, 10_000),
            ExperimentKind::KernelCheck => (50, 1_000_000),
            _ => (1_000_000, 10_000),
        };
        ExperimentConfig {
            experiment,
            k,
            dims: DimRange(dims),
            n_samples,
            n_features,
            n_directions: 1000,
            grid_size: 100_000,
            repetitions: 10,
            alpha: 1,
            a: 1.0,
            b: 0.0,
            gamma: 1.0,
            seed: RngSeed(42),
            workers: 0,
            out_csv: None,
            out_plot: None,
            tilde_mode: TildeMode::Arcsine,
            clip_to_ball: None,
            iteration_cap: crate::measures::DEFAULT_ITERATION_CAP,
        }
    }

    pub fn activation(&self) -> ActivationSpec {
        ActivationSpec::new(self.alpha, self.a, self.b)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.dims.min() < 2 {
            return fail(format!("dimensions must be at least 2 (got {})", self.dims.min()));
        }
        if self.n_samples == 0 || self.n_features == 0 || self.n_directions == 0 {
            return fail("sample, feature and direction counts must be positive".into());
        }
        if !(self.a.is_finite() && self.b.is_finite()) {
            return fail("activation coefficients must be finite".into());
        }
        match self.experiment {
            ExperimentKind::IpmSeparation | ExperimentKind::SdSeparation => {
                if self.k == 0 {
                    return fail("k must be at least 1".into());
                }
                // Derivatives of P_{k,d} are expressed through P_{k-1,d+2}; below d = 3 the
                // pair degenerates to trigonometric polynomials and is not part of the sweep.
                if self.k >= 2 && self.dims.min() < 3 {
                    return fail(format!("k = {} needs dimensions of at least 3", self.k));
                }
            }
            ExperimentKind::KernelCheck => {
                if self.alpha > 1 {
                    return fail("the closed-form kernel covers alpha in {0, 1}".into());
                }
            }
            ExperimentKind::GaussianMetrics => {}
        }
        if self.experiment == ExperimentKind::SdSeparation {
            if !(-1.0..=1.0).contains(&self.gamma) {
                return fail(format!("gamma = {} must lie in [-1, 1]", self.gamma));
            }
            if self.grid_size < crate::metrics::MIN_GRID {
                return fail(format!("grid size must be at least {}", crate::metrics::MIN_GRID));
            }
        }
        if let Some(r) = self.clip_to_ball {
            if !(r > 0.0 && r.is_finite()) {
                return fail(format!("clip radius {r} must be positive"));
            }
        }
        Ok(())
    }
}
