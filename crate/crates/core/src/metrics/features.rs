//! Random-feature moments `(1/n) Σ_l w_l σ(⟨x_l, θ_j⟩)` for a bank of
//! directions `θ_j`. Plain means transpose samples into column-major tiles and
//! sweep groups of features over them; weighted moments process features in
//! column-major blocks. Either way every sum runs in a fixed order.

use crate::error::{Error, Result};
use crate::harmonics::ActivationSpec;
use crate::measures::{sample_uniform_sphere, SampleSet};
use crate::par::map_indexed;
use crate::rng::RngSeed;

const BLOCK: usize = 32;

/// Feature directions, one unit vector per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBank {
    dim: usize,
    thetas: Vec<f64>,
}

impl FeatureBank {
    /// `n` i.i.d. directions uniform on `S^{dim-1}`.
    pub fn uniform(dim: usize, n: usize, seed: RngSeed) -> Result<Self> {
        let s = sample_uniform_sphere(dim as u32, n, seed)?;
        Ok(FeatureBank { dim, thetas: s.points().to_vec() })
    }

    pub fn from_rows(thetas: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || !thetas.len().is_multiple_of(dim) || thetas.is_empty() {
            return Err(Error::Domain("feature bank needs a positive number of full rows".into()));
        }
        Ok(FeatureBank { dim, thetas })
    }

    pub fn len(&self) -> usize {
        self.thetas.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.thetas[j * self.dim..(j + 1) * self.dim]
    }

    /// Column-major copy of features `[start, start + BLOCK)`, zero padded.
    fn block(&self, start: usize) -> Vec<f64> {
        let mut tb = vec![0.0; self.dim * BLOCK];
        for j in 0..BLOCK.min(self.len() - start) {
            for (c, v) in self.row(start + j).iter().enumerate() {
                tb[c * BLOCK + j] = *v;
            }
        }
        tb
    }
}

/// Per-sample weight vectors, `width` values per sample, row-major.
#[derive(Clone, Copy)]
pub(crate) struct Weights<'a> {
    pub values: &'a [f64],
    pub width: usize,
}

#[inline(always)]
fn block_moments<S: Fn(f64) -> f64>(
    points: &[f64],
    dim: usize,
    weights: Option<Weights<'_>>,
    tb: &[f64],
    sigma: S,
) -> Vec<f64> {
    let width = weights.map_or(1, |w| w.width);
    let mut acc = vec![0.0; width * BLOCK];
    for (l, x) in points.chunks_exact(dim).enumerate() {
        let mut z = [0.0f64; BLOCK];
        for (c, &xc) in x.iter().enumerate() {
            let col: &[f64; BLOCK] = tb[c * BLOCK..(c + 1) * BLOCK].try_into().expect("block width");
            for j in 0..BLOCK {
                z[j] += xc * col[j];
            }
        }
        let s = z.map(&sigma);
        match weights {
            None => {
                let a: &mut [f64; BLOCK] = (&mut acc[..BLOCK]).try_into().expect("block width");
                for j in 0..BLOCK {
                    a[j] += s[j];
                }
            }
            Some(w) => {
                let g = &w.values[l * width..(l + 1) * width];
                for (wi, &gw) in g.iter().enumerate() {
                    let a: &mut [f64; BLOCK] =
                        (&mut acc[wi * BLOCK..(wi + 1) * BLOCK]).try_into().expect("block width");
                    for j in 0..BLOCK {
                        a[j] += gw * s[j];
                    }
                }
            }
        }
    }
    acc
}

fn dispatch(points: &[f64], dim: usize, weights: Option<Weights<'_>>, tb: &[f64], act: &ActivationSpec) -> Vec<f64> {
    let (a, b) = (act.a, act.b);
    match act.alpha {
        1 if b == 0.0 => block_moments(points, dim, weights, tb, move |z: f64| a * z.max(0.0)),
        1 => block_moments(points, dim, weights, tb, move |z: f64| if z > 0.0 { a * z } else { -b * z }),
        0 => block_moments(points, dim, weights, tb, move |z: f64| {
            (if z > 0.0 { a } else { 0.0 }) + (if z < 0.0 { b } else { 0.0 })
        }),
        _ => {
            let act = *act;
            block_moments(points, dim, weights, tb, move |z: f64| act.eval(z))
        }
    }
}

const LANES: usize = 4;
const GROUP: usize = 8;
const TILE: usize = 1024;
const TASK: usize = 1 << 15;

/// Adds `Σ_s σ(⟨x_s, θ_j⟩)` over one tile to `out[j]`. The tile stores
/// `LANES` samples at a time column-major (`[block][coordinate][lane]`), and
/// each group of `GROUP` features is stored `[coordinate][feature]`.
#[inline(always)]
fn tile_sums<S: Fn(f64) -> f64>(tile: &[f64], dim: usize, groups: &[f64], out: &mut [f64], sigma: &S) {
    for (g, th) in groups.chunks_exact(GROUP * dim).enumerate() {
        let mut acc = [[0.0f64; LANES]; GROUP];
        for xb in tile.chunks_exact(LANES * dim) {
            let mut z = [[0.0f64; LANES]; GROUP];
            for (col, tc) in xb.chunks_exact(LANES).zip(th.chunks_exact(GROUP)) {
                let col: &[f64; LANES] = col.try_into().expect("lane width");
                let tc: &[f64; GROUP] = tc.try_into().expect("group width");
                for f in 0..GROUP {
                    let t = tc[f];
                    for i in 0..LANES {
                        z[f][i] = col[i].mul_add(t, z[f][i]);
                    }
                }
            }
            for f in 0..GROUP {
                for i in 0..LANES {
                    acc[f][i] += sigma(z[f][i]);
                }
            }
        }
        for f in 0..GROUP {
            out[g * GROUP + f] += acc[f].iter().sum::<f64>();
        }
    }
}

#[inline(always)]
fn task_sums<S: Fn(f64) -> f64>(points: &[f64], dim: usize, groups: &[f64], sigma: S) -> Vec<f64> {
    let nf = groups.len() / dim;
    let mut out = vec![0.0; nf];
    let mut tile = vec![0.0; dim * TILE];
    for chunk in points.chunks(dim * TILE) {
        let full = chunk.len() / dim / LANES * LANES;
        for (s, x) in chunk.chunks_exact(dim).take(full).enumerate() {
            let base = (s / LANES) * LANES * dim + s % LANES;
            for (c, &v) in x.iter().enumerate() {
                tile[base + c * LANES] = v;
            }
        }
        tile_sums(&tile[..full * dim], dim, groups, &mut out, &sigma);
        for x in chunk.chunks_exact(dim).skip(full) {
            for (g, th) in groups.chunks_exact(GROUP * dim).enumerate() {
                for f in 0..GROUP {
                    let z: f64 = x.iter().enumerate().map(|(c, v)| v * th[c * GROUP + f]).sum();
                    out[g * GROUP + f] += sigma(z);
                }
            }
        }
    }
    out
}

fn dispatch_sums(points: &[f64], dim: usize, thetas: &[f64], act: &ActivationSpec) -> Vec<f64> {
    let (a, b) = (act.a, act.b);
    match act.alpha {
        1 if b == 0.0 => task_sums(points, dim, thetas, move |z: f64| if z > 0.0 { a * z } else { 0.0 }),
        1 => task_sums(points, dim, thetas, move |z: f64| if z > 0.0 { a * z } else { -b * z }),
        // Two independent selects vectorize; the nested branch does not.
        0 => task_sums(points, dim, thetas, move |z: f64| {
            (if z > 0.0 { a } else { 0.0 }) + (if z < 0.0 { b } else { 0.0 })
        }),
        _ => {
            let act = *act;
            task_sums(points, dim, thetas, move |z: f64| act.eval(z))
        }
    }
}

/// Plain feature means. Samples are split into fixed tasks whose partial sums
/// are added in task order, so the result does not depend on the thread count.
fn unweighted_moments(points: &[f64], dim: usize, bank: &FeatureBank, act: &ActivationSpec) -> Vec<f64> {
    let nf = bank.len();
    let mut thetas = vec![0.0; nf.div_ceil(GROUP) * GROUP * dim];
    for j in 0..nf {
        let (g, f) = (j / GROUP, j % GROUP);
        for (c, &v) in bank.row(j).iter().enumerate() {
            thetas[g * GROUP * dim + c * GROUP + f] = v;
        }
    }
    let n = points.len() / dim;
    let partials = map_indexed(n.div_ceil(TASK), |ti| {
        let end = ((ti + 1) * TASK).min(n);
        dispatch_sums(&points[ti * TASK * dim..end * dim], dim, &thetas, act)
    });
    let mut out = vec![0.0; nf];
    for p in &partials {
        let p = &p[..nf];
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    let inv = 1.0 / n as f64;
    out.iter_mut().for_each(|o| *o *= inv);
    out
}

/// `out[w * n_features + j] = (1/n) Σ_l weights[l][w] σ(⟨x_l, θ_j⟩)`; without
/// weights the single row holds plain feature means.
pub(crate) fn feature_moments(
    points: &[f64],
    dim: usize,
    weights: Option<Weights<'_>>,
    bank: &FeatureBank,
    act: &ActivationSpec,
) -> Result<Vec<f64>> {
    if bank.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: bank.dim() });
    }
    let n = points.len() / dim;
    if n == 0 {
        return Err(Error::Domain("feature moments need at least one sample".into()));
    }
    let Some(w) = weights else {
        return Ok(unweighted_moments(points, dim, bank, act));
    };
    let width = w.width;
    if w.values.len() != n * width {
        return Err(Error::DimensionMismatch { expected: n * width, found: w.values.len() });
    }
    let nf = bank.len();
    let blocks = map_indexed(nf.div_ceil(BLOCK), |bi| dispatch(points, dim, Some(w), &bank.block(bi * BLOCK), act));
    let inv = 1.0 / n as f64;
    let mut out = vec![0.0; width * nf];
    for (bi, acc) in blocks.iter().enumerate() {
        let start = bi * BLOCK;
        let len = BLOCK.min(nf - start);
        for wi in 0..width {
            for j in 0..len {
                out[wi * nf + start + j] = acc[wi * BLOCK + j] * inv;
            }
        }
    }
    Ok(out)
}

/// Differences of feature means between two sample sets.
pub(crate) fn moment_differences(
    mu: &SampleSet,
    nu: &SampleSet,
    bank: &FeatureBank,
    act: &ActivationSpec,
) -> Result<Vec<f64>> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), found: nu.dim() });
    }
    let a = feature_moments(mu.points(), mu.dim(), None, bank, act)?;
    let b = feature_moments(nu.points(), nu.dim(), None, bank, act)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}
