//! Stein discrepancies between the uniform measure `τ` on `S^{d-1}` and the
//! Gibbs measure `∝ exp(γ L_{k,d})`.
//!
//! For a neuron `σ(⟨θ, ·⟩)` the Funk–Hecke formula turns the `i`-th component
//! of `E_τ[∇L(x) σ(⟨θ,x⟩)]` into `A ∇̂_i L(θ) + B L(θ) θ_i` with
//! `A = λ^{(α)}_{k-1,d} - k λ^{(α+1)}_{k,d} / (α+1)` and
//! `B = -k (α+1-k) λ^{(α+1)}_{k,d} / (α+1)` (ReLU-power part; the mirrored part
//! contributes the factor `|a + (-1)^{k+1} b|`). Maximizing each component over
//! `θ` reduces to one-dimensional problems in `t = θ_d`.

use super::features::{feature_moments, FeatureBank, Weights};
use super::{root_mean_and_se, SteinEstimate, SteinVariant};
use crate::error::{Error, Result};
use crate::harmonics::{
    harmonic_grad_into, lambda_coefficient, legendre_unchecked, log_harmonic_dimension, ActivationSpec, LegendreIndex,
};
use crate::measures::{sample_uniform_sphere, GibbsSpec};
use crate::rng::RngSeed;

/// Smallest accepted grid for the one-dimensional suprema.
pub const MIN_GRID: usize = 100;

struct Coefficients {
    a: f64,
    b: f64,
    /// `k(k+d-2)/(d-1)`, the factor linking `P'_{k,d}` to `P_{k-1,d+2}`.
    c: f64,
}

fn coefficients(k: u32, d: u32, alpha: u32) -> Coefficients {
    let idx = |k| LegendreIndex::new(k, d).expect("d >= 2");
    let kf = k as f64;
    let a1 = alpha as f64 + 1.0;
    let lam = lambda_coefficient(idx(k), alpha + 1);
    let lam_prev = lambda_coefficient(idx(k - 1), alpha);
    Coefficients {
        a: lam_prev - kf / a1 * lam,
        b: -kf * (a1 - kf) / a1 * lam,
        c: kf * (kf + d as f64 - 2.0) / (d as f64 - 1.0),
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// `max_{t ∈ [-1,1]} |f(t)|` over a uniform grid including both endpoints,
/// refined by golden section around the best grid point.
fn grid_sup<F: Fn(f64) -> f64>(f: F, grid: usize) -> f64 {
    let h = 2.0 / (grid - 1) as f64;
    let at = |i: usize| if i + 1 == grid { 1.0 } else { -1.0 + i as f64 * h };
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..grid {
        let v = f(at(i)).abs();
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = at(best_i.saturating_sub(1));
    let hi = at((best_i + 1).min(grid - 1));
    best.max(golden_max(|t| f(t).abs(), lo, hi))
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < MIN_GRID {
        return Err(Error::Config(format!("grid size {grid_size} is below the minimum of {MIN_GRID}")));
    }
    Ok(())
}

/// Suprema over `t` of the off-axis and on-axis component objectives
/// (without the `|γ|` and activation-parity factors).
pub fn sd_f1_objectives(spec: &GibbsSpec, act: &ActivationSpec, grid_size: usize) -> Result<(f64, f64)> {
    check_grid(grid_size)?;
    let (k, d) = (spec.k, spec.d);
    let co = coefficients(k, d, act.alpha);
    let kf = k as f64;
    let off = |t: f64| {
        let s = (1.0 - t * t).max(0.0).sqrt();
        s * (-co.a * co.c * t * legendre_unchecked(k - 1, d + 2, t) + (co.a * kf + co.b) * legendre_unchecked(k, d, t))
    };
    let axis = |t: f64| {
        let p = legendre_unchecked(k, d, t);
        co.a * (co.c * legendre_unchecked(k - 1, d + 2, t) * (1.0 - t * t) + kf * p * t) + co.b * p * t
    };
    Ok((grid_sup(off, grid_size), grid_sup(axis, grid_size)))
}

/// F1 Stein discrepancy: the per-component suprema are one-dimensional and are
/// solved by brute force on a grid of `grid_size` points.
pub fn sd_f1_brute_force(spec: &GibbsSpec, act: &ActivationSpec, grid_size: usize) -> Result<SteinEstimate> {
    let value = if spec.gamma == 0.0 {
        check_grid(grid_size)?;
        0.0
    } else {
        let (off, axis) = sd_f1_objectives(spec, act, grid_size)?;
        let d1 = spec.d as f64 - 1.0;
        spec.gamma.abs() * act.stein_factor(spec.k) * (d1 * off * off + axis * axis).sqrt()
    };
    Ok(SteinEstimate {
        value,
        std_error: 0.0,
        variant: SteinVariant::F1BruteForce,
        grid_size,
        n_features: 0,
        n_samples: 0,
    })
}

/// `|a + (-1)^{k+1} b| |γ| |λ^{(α+1)}_{k,d}| k (d+k-3) / (α+1)`: the on-axis
/// component at `θ = e_d`.
pub fn sd_f1_lower_bound(spec: &GibbsSpec, act: &ActivationSpec) -> SteinEstimate {
    let (k, d) = (spec.k as f64, spec.d as f64);
    let lam = lambda_coefficient(spec.index(), act.alpha + 1).abs();
    let value = spec.gamma.abs() * act.stein_factor(spec.k) * lam * k * (d + k - 3.0) / (act.alpha as f64 + 1.0);
    SteinEstimate {
        value,
        std_error: 0.0,
        variant: SteinVariant::F1LowerBound,
        grid_size: 0,
        n_features: 0,
        n_samples: 0,
    }
}

fn upper_root(k: f64, d: f64, a1: f64, log_n: f64) -> f64 {
    let t1 = k * (k + d - 2.0) * ((d + a1 - 3.0) / a1).powi(2);
    let t2 = (k * (d + k - 3.0) / a1).powi(2);
    (2.0 * (-log_n).exp() * (t1 + t2)).sqrt()
}

/// Upper bound on the F2 Stein discrepancy:
/// `|a + (-1)^{k+1} b| |γ| |λ^{(α+1)}| sqrt((2/N)(k(k+d-2)((d+α-2)/(α+1))² + (k(d+k-3)/(α+1))²))`.
pub fn sd_f2_upper_bound(spec: &GibbsSpec, act: &ActivationSpec) -> SteinEstimate {
    let (k, d, a1) = (spec.k as f64, spec.d as f64, act.alpha as f64 + 1.0);
    let lam = lambda_coefficient(spec.index(), act.alpha + 1).abs();
    let root = upper_root(k, d, a1, log_harmonic_dimension(spec.index()));
    let value = spec.gamma.abs() * act.stein_factor(spec.k) * lam * root;
    SteinEstimate {
        value,
        std_error: 0.0,
        variant: SteinVariant::F2UpperBound,
        grid_size: 0,
        n_features: 0,
        n_samples: 0,
    }
}

/// Lower bound on `SD_F1 / SD_F2`: the ratio of the two bounds above, in
/// which `γ`, `λ` and the parity factor cancel.
pub fn sd_ratio_bound(spec: &GibbsSpec, act: &ActivationSpec) -> f64 {
    let (k, d, a1) = (spec.k as f64, spec.d as f64, act.alpha as f64 + 1.0);
    k * (d + k - 3.0) / a1 / upper_root(k, d, a1, log_harmonic_dimension(spec.index()))
}

/// F2 Stein discrepancy by nested Monte Carlo:
/// `|γ| sqrt(Σ_i (1/N) Σ_j ((1/M) Σ_l ∇_i L(x_l) σ(⟨x_l, θ_j⟩))²)` with `x_l`
/// and `θ_j` uniform on `S^{d-1}` and `∇` the Riemannian gradient.
pub fn sd_f2_features(
    spec: &GibbsSpec,
    act: &ActivationSpec,
    n_features: usize,
    n_samples: usize,
    seed: RngSeed,
) -> Result<SteinEstimate> {
    if n_features == 0 || n_samples == 0 {
        return Err(Error::Config("F2 Stein estimate needs features and samples".into()));
    }
    let mk = |value, std_error| SteinEstimate {
        value,
        std_error,
        variant: SteinVariant::F2Features,
        grid_size: 0,
        n_features,
        n_samples,
    };
    if spec.gamma == 0.0 {
        return Ok(mk(0.0, 0.0));
    }
    let d = spec.d as usize;
    let xs = sample_uniform_sphere(spec.d, n_samples, seed.derive(1))?;
    let mut grads = vec![0.0; n_samples * d];
    let mut euclid = vec![0.0; d];
    for (x, g) in xs.rows().zip(grads.chunks_exact_mut(d)) {
        harmonic_grad_into(spec.k, spec.d, x, &mut euclid, g);
    }
    let bank = FeatureBank::uniform(d, n_features, seed.derive(2))?;
    let m = feature_moments(xs.points(), d, Some(Weights { values: &grads, width: d }), &bank, act)?;
    let per_feature: Vec<f64> = (0..n_features).map(|j| (0..d).map(|i| m[i * n_features + j].powi(2)).sum()).collect();
    let (root, se) = root_mean_and_se(&per_feature);
    let g = spec.gamma.abs();
    Ok(mk(g * root, g * se))
}
