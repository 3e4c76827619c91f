use rand::Rng;

use super::features::{moment_differences, FeatureBank};
use super::{dot, normalize, root_mean_and_se, DirectionResult, IpmEstimate, IpmVariant};
use crate::error::{Error, Result};
use crate::harmonics::{
    abs_legendre_integral, exact_dimension, legendre_unchecked, log_harmonic_dimension, weighted_integral_with_breaks,
    ActivationSpec, LegendreIndex, QuadratureRule,
};
use crate::measures::{sample_uniform_sphere, SampleSet};
use crate::rng::RngSeed;

fn same_dim(mu: &SampleSet, nu: &SampleSet) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), found: nu.dim() });
    }
    Ok(())
}

fn check_direction(theta: &[f64], dim: usize) -> Result<()> {
    if theta.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: theta.len() });
    }
    let n = dot(theta, theta).sqrt();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm: n });
    }
    Ok(())
}

fn feature_stats(set: &SampleSet, act: &ActivationSpec, theta: &[f64]) -> (f64, f64) {
    let n = set.len() as f64;
    let vals: Vec<f64> = set.rows().map(|x| act.eval(dot(x, theta))).collect();
    let mean = vals.iter().sum::<f64>() / n;
    let var = if set.len() > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// `|E_μ σ(⟨x, θ⟩) - E_ν σ(⟨x, θ⟩)|` for a fixed unit `θ`: a lower bound on
/// the F1 IPM, equal to it when `θ` is a maximizer.
pub fn ipm_f1_known_direction(
    mu: &SampleSet,
    nu: &SampleSet,
    act: &ActivationSpec,
    theta: &[f64],
) -> Result<IpmEstimate> {
    same_dim(mu, nu)?;
    check_direction(theta, mu.dim())?;
    let (ma, va) = feature_stats(mu, act, theta);
    let (mb, vb) = feature_stats(nu, act, theta);
    Ok(IpmEstimate {
        value: (ma - mb).abs(),
        std_error: (va / mu.len() as f64 + vb / nu.len() as f64).sqrt(),
        variant: IpmVariant::F1KnownDirection,
        n_samples: mu.len(),
        n_features: 1,
        seed: RngSeed::default(),
    })
}

/// Search settings for [`ipm_f1_optimize_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct F1Search {
    /// Random starting directions, each refined by projected gradient ascent.
    pub restarts: usize,
    /// Ascent iterations per start.
    pub steps: usize,
    /// Extra directions to evaluate; the best of them is refined too.
    pub candidates: Vec<Vec<f64>>,
    /// Also try the coordinate axes `±e_i`.
    pub canonical: bool,
}

impl F1Search {
    pub fn new(restarts: usize, steps: usize) -> Self {
        F1Search { restarts, steps, candidates: Vec::new(), canonical: true }
    }
}

/// Signed moment difference and its gradient in `θ`.
fn value_grad(mu: &SampleSet, nu: &SampleSet, act: &ActivationSpec, theta: &[f64], grad: &mut [f64]) -> f64 {
    // Each set is averaged on its own so identical inputs cancel exactly.
    let mut means = [0.0; 2];
    let mut grads = [vec![0.0; grad.len()], vec![0.0; grad.len()]];
    for (s, set) in [mu, nu].into_iter().enumerate() {
        let w = 1.0 / set.len() as f64;
        for x in set.rows() {
            let z = dot(x, theta);
            means[s] += act.eval(z);
            let ds = act.derivative(z);
            if ds != 0.0 {
                grads[s].iter_mut().zip(x).for_each(|(g, xi)| *g += ds * xi);
            }
        }
        means[s] *= w;
        grads[s].iter_mut().for_each(|g| *g *= w);
    }
    grad.iter_mut().zip(grads[0].iter().zip(&grads[1])).for_each(|(g, (a, b))| *g = a - b);
    means[0] - means[1]
}

fn refine(mu: &SampleSet, nu: &SampleSet, act: &ActivationSpec, start: &[f64], steps: usize) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut theta = start.to_vec();
    let mut grad = vec![0.0; dim];
    let mut trial_grad = vec![0.0; dim];
    let mut f = value_grad(mu, nu, act, &theta, &mut grad);
    let mut eta = 0.5;
    for _ in 0..steps {
        let s = if f < 0.0 { -1.0 } else { 1.0 };
        let radial = dot(&grad, &theta);
        let mut trial: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t + eta * s * (g - radial * t)).collect();
        if !normalize(&mut trial) {
            break;
        }
        let ft = value_grad(mu, nu, act, &trial, &mut trial_grad);
        if ft.abs() > f.abs() {
            theta = trial;
            f = ft;
            std::mem::swap(&mut grad, &mut trial_grad);
            eta *= 1.5;
        } else {
            eta *= 0.5;
            if eta < 1e-9 {
                break;
            }
        }
    }
    (theta, f.abs())
}

/// Best direction for the F1 IPM over random restarts refined by projected
/// gradient ascent, plus the coordinate axes. The objective is always attained
/// by the returned direction, so it is a lower bound on the true supremum.
pub fn ipm_f1_optimize(
    mu: &SampleSet,
    nu: &SampleSet,
    act: &ActivationSpec,
    restarts: usize,
    steps: usize,
    seed: RngSeed,
) -> Result<DirectionResult> {
    ipm_f1_optimize_with(mu, nu, act, &F1Search::new(restarts, steps), seed)
}

pub fn ipm_f1_optimize_with(
    mu: &SampleSet,
    nu: &SampleSet,
    act: &ActivationSpec,
    search: &F1Search,
    seed: RngSeed,
) -> Result<DirectionResult> {
    same_dim(mu, nu)?;
    let dim = mu.dim();
    let mut fixed: Vec<Vec<f64>> = Vec::new();
    if search.canonical {
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[i] = s;
                fixed.push(e);
            }
        }
    }
    for c in &search.candidates {
        check_direction(c, dim)?;
        fixed.push(c.clone());
    }
    if fixed.is_empty() && search.restarts == 0 {
        return Err(Error::Config("F1 search needs restarts or candidate directions".into()));
    }
    let mut scratch = vec![0.0; dim];
    let mut best = DirectionResult { direction: Vec::new(), objective: -1.0 };
    let consider = |theta: Vec<f64>, value: f64, best: &mut DirectionResult| {
        if value > best.objective {
            *best = DirectionResult { direction: theta, objective: value };
        }
    };
    for c in &fixed {
        let v = value_grad(mu, nu, act, c, &mut scratch).abs();
        consider(c.clone(), v, &mut best);
    }
    if !fixed.is_empty() {
        let start = best.direction.clone();
        let (t, v) = refine(mu, nu, act, &start, search.steps);
        consider(t, v, &mut best);
    }
    if search.restarts > 0 {
        let starts = sample_uniform_sphere(dim as u32, search.restarts, seed)?;
        for s in starts.rows() {
            let (t, v) = refine(mu, nu, act, s, search.steps);
            consider(t, v, &mut best);
        }
    }
    Ok(best)
}

/// F2 IPM `sqrt(E_θ (E_μ σ(⟨x,θ⟩) - E_ν σ(⟨x,θ⟩))²)` with `θ` uniform on the
/// unit sphere of the sample space, estimated with `n_features` directions.
pub fn ipm_f2_features(
    mu: &SampleSet,
    nu: &SampleSet,
    act: &ActivationSpec,
    n_features: usize,
    seed: RngSeed,
) -> Result<IpmEstimate> {
    same_dim(mu, nu)?;
    let bank = FeatureBank::uniform(mu.dim(), n_features, seed)?;
    estimate_with_bank(mu, nu, act, &bank, IpmVariant::F2Features, seed)
}

fn estimate_with_bank(
    mu: &SampleSet,
    nu: &SampleSet,
    act: &ActivationSpec,
    bank: &FeatureBank,
    variant: IpmVariant,
    seed: RngSeed,
) -> Result<IpmEstimate> {
    let diffs = moment_differences(mu, nu, bank, act)?;
    let sq: Vec<f64> = diffs.iter().map(|v| v * v).collect();
    let (value, std_error) = root_mean_and_se(&sq);
    Ok(IpmEstimate { value, std_error, variant, n_samples: mu.len(), n_features: bank.len(), seed })
}

/// Distribution of the last coordinate `t` of F̃2 features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TildeMode {
    /// `t = sin γ`, `γ` uniform on `[-π/2, π/2]`: arcsine law, the exact feature measure.
    #[default]
    Arcsine,
    /// `t` uniform on `[-1, 1]`.
    Uniform,
}

impl std::str::FromStr for TildeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arcsine" => Ok(TildeMode::Arcsine),
            "uniform" => Ok(TildeMode::Uniform),
            other => Err(Error::Config(format!("unknown tilde-t mode '{other}' (expected arcsine or uniform)"))),
        }
    }
}

/// Features `(√(1-t²) ξ, t)` in `R^{base_dim+1}` with `ξ` uniform on `S^{base_dim-1}`.
pub fn tilde_feature_bank(base_dim: usize, n: usize, mode: TildeMode, seed: RngSeed) -> Result<FeatureBank> {
    let xi = sample_uniform_sphere(base_dim as u32, n, seed.derive(1))?;
    let mut rng = seed.derive(2).rng(0);
    let mut thetas = Vec::with_capacity(n * (base_dim + 1));
    for x in xi.rows() {
        let t = match mode {
            TildeMode::Arcsine => (std::f64::consts::PI * (rng.random::<f64>() - 0.5)).sin(),
            TildeMode::Uniform => 2.0 * rng.random::<f64>() - 1.0,
        };
        let r = (1.0 - t * t).max(0.0).sqrt();
        thetas.extend(x.iter().map(|v| r * v));
        thetas.push(t);
    }
    FeatureBank::from_rows(thetas, base_dim + 1)
}

/// F̃2 IPM on lifted samples `(x, 1)`, with the arcsine-weighted feature measure.
pub fn ipm_f2_tilde(
    mu: &SampleSet,
    nu: &SampleSet,
    act: &ActivationSpec,
    n_features: usize,
    mode: TildeMode,
    seed: RngSeed,
) -> Result<IpmEstimate> {
    same_dim(mu, nu)?;
    if !mu.domain().is_lifted() || !nu.domain().is_lifted() {
        return Err(Error::Domain("the F̃2 IPM is defined on lifted samples (x, 1)".into()));
    }
    let bank = tilde_feature_bank(mu.base_dim(), n_features, mode, seed)?;
    estimate_with_bank(mu, nu, act, &bank, IpmVariant::F2Tilde, seed)
}

/// Exact F1 IPM between the signed-Legendre pair:
/// `2|∫ P_{k,d} σ w dt| / ∫ |P_{k,d}| w dt` with `w = (1-t²)^{(d-3)/2}`.
pub fn theoretical_f1_ipm(idx: LegendreIndex, act: &ActivationSpec, rule: &QuadratureRule) -> Result<f64> {
    if idx.k() == 0 {
        return Err(Error::Domain("the Legendre pair needs k >= 1".into()));
    }
    let (k, d) = (idx.k(), idx.d());
    let den = abs_legendre_integral(idx, rule)?;
    if den.is_nan() || den <= f64::MIN_POSITIVE {
        return Err(Error::Degenerate(format!("∫|P| w dt underflowed for {idx}")));
    }
    let num = weighted_integral_with_breaks(|t| legendre_unchecked(k, d, t) * act.eval(t), d, &[0.0], rule);
    Ok(2.0 * num.abs() / den)
}

/// `√N_{k,d}`, the exact ratio between the F1 and F2 IPMs on the Legendre pair.
pub fn theoretical_ratio(idx: LegendreIndex) -> f64 {
    match exact_dimension(idx) {
        Some(n) => n.sqrt(),
        None => (0.5 * log_harmonic_dimension(idx)).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Domain;
    use approx::assert_relative_eq;

    #[test]
    fn point_masses() {
        let mu = SampleSet::new(vec![0.0, 0.0, 1.0], 3, Domain::Sphere).unwrap();
        let nu = SampleSet::new(vec![0.0, 0.0, -1.0], 3, Domain::Sphere).unwrap();
        let v = ipm_f1_known_direction(&mu, &nu, &ActivationSpec::relu(), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(v.value, 1.0);
        let same = ipm_f1_known_direction(&mu, &mu, &ActivationSpec::relu(), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(same.value, 0.0);
    }

    #[test]
    fn theoretical_values() {
        let rule = QuadratureRule::default();
        let idx = LegendreIndex::new(1, 3).unwrap();
        assert_relative_eq!(
            theoretical_f1_ipm(idx, &ActivationSpec::relu(), &rule).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-12
        );
        for (k, d) in [(2, 3), (4, 6), (5, 9)] {
            let idx = LegendreIndex::new(k, d).unwrap();
            for act in [ActivationSpec::relu(), ActivationSpec::new(0, 1.0, -0.5)] {
                assert!(theoretical_f1_ipm(idx, &act, &rule).unwrap() <= 2.0 * act.sup_on_unit_interval() + 1e-12);
            }
        }
        assert_eq!(theoretical_ratio(LegendreIndex::new(0, 7).unwrap()), 1.0);
        assert_relative_eq!(theoretical_ratio(LegendreIndex::new(2, 3).unwrap()), 5f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(
            theoretical_ratio(LegendreIndex::new(6, 10).unwrap()),
            4290f64.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn identical_sets_give_zero() {
        let s = sample_uniform_sphere(4, 500, RngSeed(3)).unwrap();
        let act = ActivationSpec::relu();
        assert_eq!(ipm_f2_features(&s, &s, &act, 100, RngSeed(1)).unwrap().value, 0.0);
        let r = ipm_f1_optimize(&s, &s, &act, 3, 10, RngSeed(2)).unwrap();
        assert!(r.objective.abs() < 1e-12);
        let l = s.lift().unwrap();
        assert_eq!(ipm_f2_tilde(&l, &l, &act, 100, TildeMode::Arcsine, RngSeed(1)).unwrap().value, 0.0);
        assert!(ipm_f2_tilde(&s, &s, &act, 10, TildeMode::Arcsine, RngSeed(1)).is_err());
    }

    #[test]
    fn optimizer_beats_grid_for_two_point_masses() {
        // δ_a vs δ_b on the lifted disk: brute force over 10⁴ directions of S².
        let a = [0.3, -0.4];
        let b = [-0.5, 0.6];
        let mu = SampleSet::new(vec![a[0], a[1], 1.0], 3, Domain::BallLift).unwrap();
        let nu = SampleSet::new(vec![b[0], b[1], 1.0], 3, Domain::BallLift).unwrap();
        let act = ActivationSpec::relu();
        let grid = sample_uniform_sphere(3, 10_000, RngSeed(8)).unwrap();
        let brute = grid
            .rows()
            .map(|t| (act.eval(t[0] * a[0] + t[1] * a[1] + t[2]) - act.eval(t[0] * b[0] + t[1] * b[1] + t[2])).abs())
            .fold(0.0, f64::max);
        let r = ipm_f1_optimize(&mu, &nu, &act, 8, 100, RngSeed(4)).unwrap();
        assert!(r.objective >= brute - 1e-6, "{} < {}", r.objective, brute);
        assert!((dot(&r.direction, &r.direction) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tilde_features_are_unit_and_arcsine() {
        let bank = tilde_feature_bank(3, 20_000, TildeMode::Arcsine, RngSeed(5)).unwrap();
        assert_eq!(bank.dim(), 4);
        let mut below = 0;
        for j in 0..bank.len() {
            let r = bank.row(j);
            assert!((dot(r, r) - 1.0).abs() < 1e-12);
            // arcsine law: P(|t| < sin(π/12)) = 1/6
            if r[3].abs() < (std::f64::consts::PI / 12.0).sin() {
                below += 1;
            }
        }
        let frac = below as f64 / bank.len() as f64;
        assert!((frac - 1.0 / 6.0).abs() < 0.015, "{frac}");
    }
}
