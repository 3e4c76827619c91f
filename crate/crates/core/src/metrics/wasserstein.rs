//! 1-Wasserstein distances between equal-size empirical measures and their
//! sliced variants. On lifted sets `(x, 1)` only the base coordinates `x` are
//! projected.

use super::{dot, mean_and_se, DirectionResult, IpmEstimate, IpmVariant};
use crate::error::{Error, Result};
use crate::measures::{sample_uniform_sphere, SampleSet};
use crate::par::map_indexed;
use crate::rng::RngSeed;

/// `(1/n) Σ |x_(i) - y_(i)|` over order statistics. Inputs that are not
/// sorted are sorted on a copy.
pub fn wasserstein_1d(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    let sorted = |v: &[f64]| {
        if v.is_sorted() {
            v.to_vec()
        } else {
            let mut c = v.to_vec();
            c.sort_unstable_by(f64::total_cmp);
            c
        }
    };
    Ok(sorted_w1(sorted(xs), sorted(ys)))
}

fn sorted_w1(xs: Vec<f64>, ys: Vec<f64>) -> f64 {
    xs.iter().zip(&ys).map(|(a, b)| (a - b).abs()).sum::<f64>() / xs.len() as f64
}

fn base_projection(set: &SampleSet, u: &[f64]) -> Vec<f64> {
    let bd = set.base_dim();
    let mut p: Vec<f64> = set.rows().map(|r| dot(&r[..bd], u)).collect();
    p.sort_unstable_by(f64::total_cmp);
    p
}

fn check_pair(mu: &SampleSet, nu: &SampleSet) -> Result<usize> {
    if mu.dim() != nu.dim() || mu.domain().is_lifted() != nu.domain().is_lifted() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), found: nu.dim() });
    }
    if mu.len() != nu.len() {
        return Err(Error::Domain(format!("sample counts differ ({} vs {})", mu.len(), nu.len())));
    }
    Ok(mu.base_dim())
}

/// W1 between the projections of `mu` and `nu` on the unit direction `u`
/// (a vector of the base space).
pub fn projected_w1(mu: &SampleSet, nu: &SampleSet, u: &[f64]) -> Result<f64> {
    let bd = check_pair(mu, nu)?;
    if u.len() != bd {
        return Err(Error::DimensionMismatch { expected: bd, found: u.len() });
    }
    Ok(sorted_w1(base_projection(mu, u), base_projection(nu, u)))
}

/// Sliced W1: the mean of projected W1 over `n_directions` uniform directions.
/// `std_error` is the direction Monte Carlo error.
pub fn sliced_w1(mu: &SampleSet, nu: &SampleSet, n_directions: usize, seed: RngSeed) -> Result<IpmEstimate> {
    let bd = check_pair(mu, nu)?;
    let dirs = sample_uniform_sphere(bd as u32, n_directions, seed)?;
    let vals = map_indexed(n_directions, |j| {
        let u = dirs.row(j);
        sorted_w1(base_projection(mu, u), base_projection(nu, u))
    });
    let (value, std_error) = mean_and_se(&vals);
    Ok(IpmEstimate {
        value,
        std_error,
        variant: IpmVariant::F1KnownDirection,
        n_samples: mu.len(),
        n_features: n_directions,
        seed,
    })
}

/// How [`max_sliced_w1`] searches for the worst direction.
#[derive(Debug, Clone, PartialEq)]
pub enum MaxSlicedMode {
    /// Project on a given unit direction.
    KnownAxis(Vec<f64>),
    /// Best of `n_candidates` uniform directions and the coordinate axes.
    GridOptimize { n_candidates: usize, seed: RngSeed },
    /// Best of the given unit directions.
    Candidates(Vec<Vec<f64>>),
}

/// Max-sliced W1 over a set of directions; a lower bound on the true maximum
/// unless the maximizer is among them.
pub fn max_sliced_w1(mu: &SampleSet, nu: &SampleSet, mode: &MaxSlicedMode) -> Result<DirectionResult> {
    let bd = check_pair(mu, nu)?;
    let dirs: Vec<Vec<f64>> = match mode {
        MaxSlicedMode::KnownAxis(u) => vec![u.clone()],
        MaxSlicedMode::GridOptimize { n_candidates, seed } => {
            let mut v: Vec<Vec<f64>> = (0..bd)
                .map(|i| {
                    let mut e = vec![0.0; bd];
                    e[i] = 1.0;
                    e
                })
                .collect();
            if *n_candidates > 0 {
                v.extend(sample_uniform_sphere(bd as u32, *n_candidates, *seed)?.rows().map(<[f64]>::to_vec));
            }
            v
        }
        MaxSlicedMode::Candidates(c) => c.clone(),
    };
    if dirs.is_empty() {
        return Err(Error::Config("max-sliced search needs at least one direction".into()));
    }
    for u in &dirs {
        if u.len() != bd {
            return Err(Error::DimensionMismatch { expected: bd, found: u.len() });
        }
        let n = dot(u, u).sqrt();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm: n });
        }
    }
    let vals = map_indexed(dirs.len(), |j| sorted_w1(base_projection(mu, &dirs[j]), base_projection(nu, &dirs[j])));
    let (best, objective) =
        vals.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(DirectionResult { direction: dirs[best].clone(), objective })
}
