//! Estimators and closed-form values of integral probability metrics, Stein
//! discrepancies and sliced 1-Wasserstein distances.

mod features;
mod ipm;
mod kernel;
mod stein;
mod wasserstein;

pub use features::FeatureBank;
pub use ipm::{
    ipm_f1_known_direction, ipm_f1_optimize, ipm_f1_optimize_with, ipm_f2_features, ipm_f2_tilde, theoretical_f1_ipm,
    theoretical_ratio, tilde_feature_bank, F1Search, TildeMode,
};
pub use kernel::{arccos_kernel_uniform, ipm_f2_kernel, kernel_feature_estimate, mmd2_kernel, KernelVariant};
pub use stein::{
    sd_f1_brute_force, sd_f1_lower_bound, sd_f1_objectives, sd_f2_features, sd_f2_upper_bound, sd_ratio_bound, MIN_GRID,
};
pub use wasserstein::{max_sliced_w1, projected_w1, sliced_w1, wasserstein_1d, MaxSlicedMode};

use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IpmVariant {
    F1KnownDirection,
    F1Optimized,
    F2Features,
    F2KernelPlugin,
    F2KernelUStat,
    F2Tilde,
}

/// Estimate of an integral probability metric. `std_error` is the Monte Carlo
/// standard error of the dominant noise source of the estimator (samples for
/// known-direction F1, features for the F2 variants, directions for sliced
/// distances); zero when the estimator has no randomness of its own.
#[derive(Debug, Clone, PartialEq)]
pub struct IpmEstimate {
    pub value: f64,
    pub std_error: f64,
    pub variant: IpmVariant,
    pub n_samples: usize,
    pub n_features: usize,
    pub seed: RngSeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteinVariant {
    F1BruteForce,
    F1LowerBound,
    F2Features,
    F2UpperBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinEstimate {
    pub value: f64,
    pub std_error: f64,
    pub variant: SteinVariant,
    pub grid_size: usize,
    pub n_features: usize,
    pub n_samples: usize,
}

/// A unit direction and the objective it attains.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionResult {
    pub direction: Vec<f64>,
    pub objective: f64,
}

/// Mean and standard error of the mean.
pub(crate) fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `sqrt(mean(v))` and its delta-method standard error.
pub(crate) fn root_mean_and_se(v: &[f64]) -> (f64, f64) {
    let (m, se) = mean_and_se(v);
    let root = m.max(0.0).sqrt();
    let se_root = if root > 0.0 { se / (2.0 * root) } else { se.sqrt() };
    (root, se_root)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn normalize(v: &mut [f64]) -> bool {
    let n = dot(v, v).sqrt();
    if n > 0.0 && n.is_finite() {
        v.iter_mut().for_each(|x| *x /= n);
        true
    } else {
        false
    }
}
