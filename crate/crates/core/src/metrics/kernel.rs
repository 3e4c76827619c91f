use statrs::function::gamma::ln_gamma;

use super::features::FeatureBank;
use super::{dot, mean_and_se};
use crate::error::{Error, Result};
use crate::harmonics::ActivationSpec;
use crate::measures::SampleSet;
use crate::rng::RngSeed;

/// Closed-form `E_θ[(⟨x,θ⟩)_+^α (⟨y,θ⟩)_+^α]` for `θ` uniform on `S^D`,
/// `D = feature_dim`, with `x, y ∈ R^{D+1}`. This is the arc-cosine kernel
/// `‖x‖^α ‖y‖^α J_α(φ) / (2π)` of Gaussian features divided by the chi moment
/// `E r^{2α} = 2^α Γ((D+1)/2 + α) / Γ((D+1)/2)`.
pub fn arccos_kernel_uniform(x: &[f64], y: &[f64], alpha: u32, feature_dim: usize) -> Result<f64> {
    if x.len() != feature_dim + 1 || y.len() != feature_dim + 1 {
        return Err(Error::DimensionMismatch { expected: feature_dim + 1, found: x.len().min(y.len()) });
    }
    let (nx, ny) = (dot(x, x).sqrt(), dot(y, y).sqrt());
    if nx == 0.0 || ny == 0.0 {
        return Ok(0.0);
    }
    let cos = (dot(x, y) / (nx * ny)).clamp(-1.0, 1.0);
    let phi = cos.acos();
    let pi = std::f64::consts::PI;
    let (j, scale) = match alpha {
        0 => (pi - phi, 1.0),
        1 => (phi.sin() + (pi - phi) * cos, nx * ny),
        _ => {
            return Err(Error::Unsupported(format!(
                "closed-form kernel only for alpha in {{0, 1}} (got {alpha}); use ipm_f2_features"
            )))
        }
    };
    let m = (feature_dim + 1) as f64 / 2.0;
    let a = alpha as f64;
    let chi_moment = (a * std::f64::consts::LN_2 + ln_gamma(m + a) - ln_gamma(m)).exp();
    Ok(scale * j / (2.0 * pi) / chi_moment)
}

/// Feature Monte Carlo estimate of the kernel `E_θ σ(⟨x,θ⟩) σ(⟨y,θ⟩)`, `θ`
/// uniform on the unit sphere of `R^{x.len()}`. Returns mean and standard error.
pub fn kernel_feature_estimate(
    x: &[f64],
    y: &[f64],
    act: &ActivationSpec,
    n_features: usize,
    seed: RngSeed,
) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let bank = FeatureBank::uniform(x.len(), n_features, seed)?;
    let v: Vec<f64> = (0..bank.len()).map(|j| act.eval(dot(x, bank.row(j))) * act.eval(dot(y, bank.row(j)))).collect();
    Ok(mean_and_se(&v))
}

/// Estimator of the squared MMD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// All pairs, diagonal included (V-statistic).
    Plugin,
    /// Same-sample diagonal terms excluded; unbiased, may be negative.
    UStat,
}

fn block_sum(a: &SampleSet, b: &SampleSet, alpha: u32, feature_dim: usize, skip_diagonal: bool) -> Result<f64> {
    let mut s = 0.0;
    for (i, x) in a.rows().enumerate() {
        for (j, y) in b.rows().enumerate() {
            if skip_diagonal && i == j {
                continue;
            }
            s += arccos_kernel_uniform(x, y, alpha, feature_dim)?;
        }
    }
    Ok(s)
}

/// Squared F2 IPM (an MMD) between two sample sets with the closed-form
/// kernel of `(x)_+^α`, features uniform on the unit sphere of the sample space.
pub fn mmd2_kernel(mu: &SampleSet, nu: &SampleSet, alpha: u32, variant: KernelVariant) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), found: nu.dim() });
    }
    let fd = mu.dim() - 1;
    let (n, m) = (mu.len() as f64, nu.len() as f64);
    let cross = block_sum(mu, nu, alpha, fd, false)? / (n * m);
    Ok(match variant {
        KernelVariant::Plugin => {
            block_sum(mu, mu, alpha, fd, false)? / (n * n) + block_sum(nu, nu, alpha, fd, false)? / (m * m)
                - 2.0 * cross
        }
        KernelVariant::UStat => {
            if mu.len() < 2 || nu.len() < 2 {
                return Err(Error::Domain("the U-statistic needs at least two samples per set".into()));
            }
            block_sum(mu, mu, alpha, fd, true)? / (n * (n - 1.0))
                + block_sum(nu, nu, alpha, fd, true)? / (m * (m - 1.0))
                - 2.0 * cross
        }
    })
}

/// Kernel F2 IPM. `Plugin` returns `sqrt(max(MMD², 0))`; `UStat` returns the
/// signed unbiased MMD² itself.
pub fn ipm_f2_kernel(mu: &SampleSet, nu: &SampleSet, alpha: u32, variant: KernelVariant) -> Result<f64> {
    let v = mmd2_kernel(mu, nu, alpha, variant)?;
    Ok(match variant {
        KernelVariant::Plugin => v.max(0.0).sqrt(),
        KernelVariant::UStat => v,
    })
}
