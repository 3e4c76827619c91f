//! Exact samplers. A point on `S^{d-1}` is written `x = (√(1-t²) ξ, t)` with
//! `t = ⟨e_d, x⟩` and `ξ` uniform on `S^{d-2}`; under the uniform measure `t`
//! has density `∝ (1-t²)^{(d-3)/2}`, i.e. `(t+1)/2 ~ Beta((d-1)/2, (d-1)/2)`.
//! Axially symmetric targets are then sampled by rejection on `t` alone.
//!
//! Work is cut into fixed chunks of output rows, each with its own ChaCha
//! stream, so the result is the same for any thread count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use super::{Domain, GaussianSpec, GibbsSpec, LegendrePairSpec, SampleSet};
use crate::error::{Error, Result};
use crate::harmonics::legendre_unchecked;
use crate::par::map_indexed;
use crate::rng::RngSeed;

/// Maximum number of proposals a rejection sampler may spend on one call.
pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000_000;

const CHUNK: usize = 1 << 16;

const STREAM_UNIFORM: u64 = 1;
const STREAM_MU: u64 = 2;
const STREAM_NU: u64 = 3;
const STREAM_GIBBS: u64 = 4;
const STREAM_GAUSS_STD: u64 = 5;
const STREAM_GAUSS_SHRUNK: u64 = 6;

fn chunks(n: usize) -> usize {
    n.div_ceil(CHUNK)
}

fn chunk_len(n: usize, c: usize) -> usize {
    CHUNK.min(n - c * CHUNK)
}

fn fill_unit_vector(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            s += *v * *v;
        }
        if s > 0.0 {
            let inv = 1.0 / s.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Draws the polar coordinate `t = ⟨e_d, x⟩` of a uniform point on `S^{d-1}`.
struct PolarSampler(Beta<f64>);

impl PolarSampler {
    fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("sphere sampling in d = {d} needs d >= 2")));
        }
        let shape = (d as f64 - 1.0) / 2.0;
        let beta = Beta::new(shape, shape).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(PolarSampler(beta))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let b = self.0.sample(rng);
        (2.0 * b - 1.0).clamp(-1.0, 1.0)
    }
}

fn assemble(t: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let (xi, last) = out.split_at_mut(out.len() - 1);
    fill_unit_vector(rng, xi);
    let r = (1.0 - t * t).max(0.0).sqrt();
    xi.iter_mut().for_each(|v| *v *= r);
    last[0] = t;
}

/// Source of polar proposals together with their acceptance probability.
trait Proposal: Sync {
    fn propose(&self, rng: &mut ChaCha8Rng) -> (f64, f64);
}

/// Uniform-sphere polar proposals, kept with probability `accept(t) ∈ [0, 1]`.
struct UniformProposal<A> {
    polar: PolarSampler,
    accept: A,
}

impl<A: Fn(f64) -> f64 + Sync> Proposal for UniformProposal<A> {
    fn propose(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let t = self.polar.sample(rng);
        (t, (self.accept)(t))
    }
}

const ENVELOPE_BINS: usize = 512;

/// Piecewise-constant envelope for the polar density `f(t) (1-t²)^e`, `e ≥ 0`,
/// where `f ≤ 1` is Lipschitz with constant `lipschitz`. On each bin the bound
/// `min(1, max(f(a), f(b)) + L(b-a)/2)` dominates `f`, and the weight factor is
/// bounded by its value at the point of the bin closest to 0.
struct BinnedProposal<F> {
    f: F,
    exponent: f64,
    edges: Vec<f64>,
    bounds: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> BinnedProposal<F> {
    fn new(f: F, exponent: f64, lipschitz: f64) -> Self {
        let edges: Vec<f64> = (0..=ENVELOPE_BINS).map(|i| -1.0 + 2.0 * i as f64 / ENVELOPE_BINS as f64).collect();
        let weight = |t: f64| (1.0 - t * t).max(0.0).powf(exponent);
        let mut bounds = Vec::with_capacity(ENVELOPE_BINS);
        let mut cumulative = Vec::with_capacity(ENVELOPE_BINS);
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let fb = (f(a).max(f(b)) + lipschitz * (b - a) / 2.0).min(1.0);
            let near = if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
            let bound = fb * weight(near);
            bounds.push(bound);
            total += bound * (b - a);
            cumulative.push(total);
        }
        BinnedProposal { f, exponent, edges, bounds, cumulative }
    }
}

impl<F: Fn(f64) -> f64 + Sync> Proposal for BinnedProposal<F> {
    fn propose(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let total = *self.cumulative.last().expect("bins");
        let r: f64 = rng.random::<f64>() * total;
        let bin = self.cumulative.partition_point(|&c| c <= r).min(ENVELOPE_BINS - 1);
        let (a, b) = (self.edges[bin], self.edges[bin + 1]);
        let t = a + (b - a) * rng.random::<f64>();
        let target = (self.f)(t) * (1.0 - t * t).max(0.0).powf(self.exponent);
        (t, target / self.bounds[bin])
    }
}

/// Rejection on the polar coordinate: proposals are kept with the probability
/// returned alongside them.
fn polar_rejection<P: Proposal>(
    d: u32,
    n: usize,
    seed: RngSeed,
    stream: u64,
    cap: u64,
    proposal: &P,
) -> Result<SampleSet> {
    let dim = d as usize;
    let base = seed.derive(stream);
    // Each chunk gets a share of the cap proportional to its size.
    let per_row_cap = cap as f64 / n.max(1) as f64;
    let parts = map_indexed(chunks(n), |c| -> Result<Vec<f64>> {
        let len = chunk_len(n, c);
        let budget = (per_row_cap * len as f64).ceil() as u64;
        let mut rng = base.rng(c as u64);
        let mut out = vec![0.0; len * dim];
        let mut filled = 0;
        let mut proposals = 0u64;
        while filled < len {
            if proposals >= budget {
                return Err(Error::IterationCap { cap, accepted: c * CHUNK + filled, requested: n });
            }
            proposals += 1;
            let (t, accept) = proposal.propose(&mut rng);
            let u: f64 = rng.random();
            if u < accept {
                assemble(t, &mut rng, &mut out[filled * dim..(filled + 1) * dim]);
                filled += 1;
            }
        }
        Ok(out)
    });
    let mut points = Vec::with_capacity(n * dim);
    for p in parts {
        points.extend(p?);
    }
    Ok(SampleSet::from_raw(points, dim, Domain::Sphere))
}

/// Draws `t = ⟨e_d, x⟩` for `n` uniform points of `S^{d-1}` without building the points.
pub fn sample_sphere_t(d: u32, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    let polar = PolarSampler::new(d)?;
    let mut rng = seed.derive(STREAM_UNIFORM).rng(0);
    Ok((0..n).map(|_| polar.sample(&mut rng)).collect())
}

/// `n` i.i.d. uniform points on `S^{d-1}` (normalized standard Gaussians).
pub fn sample_uniform_sphere(d: u32, n: usize, seed: RngSeed) -> Result<SampleSet> {
    if d == 0 || n == 0 {
        return Err(Error::Domain("uniform sphere sampling needs d >= 1 and n >= 1".into()));
    }
    let dim = d as usize;
    let base = seed.derive(STREAM_UNIFORM);
    let parts = map_indexed(chunks(n), |c| {
        let len = chunk_len(n, c);
        let mut rng = base.rng(c as u64);
        let mut out = vec![0.0; len * dim];
        for row in out.chunks_exact_mut(dim) {
            fill_unit_vector(&mut rng, row);
        }
        out
    });
    Ok(SampleSet::from_raw(parts.concat(), dim, Domain::Sphere))
}

/// `n` samples from each of `μ_d ∝ (L_{k,d})_+` and `ν_d ∝ (L_{k,d})_-`.
///
/// The polar density of `μ_d` is `∝ (P_{k,d}(t))_+ (1-t²)^{(d-3)/2}`. For
/// `d ≥ 3` it is sampled by rejection from a piecewise-constant envelope, using
/// `|P'_{k,d}| ≤ P'_{k,d}(1) = k(k+d-2)/(d-1)`; for `d = 2` proposals are
/// uniform on the circle and kept with probability `(P_{k,2}(t))_+`.
pub fn sample_legendre_pair(spec: &LegendrePairSpec, n: usize, seed: RngSeed) -> Result<(SampleSet, SampleSet)> {
    if n == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let (k, d) = (spec.k, spec.d);
    let pos = move |t: f64| legendre_unchecked(k, d, t).max(0.0);
    let neg = move |t: f64| (-legendre_unchecked(k, d, t)).max(0.0);
    let cap = spec.iteration_cap;
    if d == 2 {
        let mu = polar_rejection(
            d,
            n,
            seed,
            STREAM_MU,
            cap,
            &UniformProposal { polar: PolarSampler::new(d)?, accept: pos },
        )?;
        let nu = polar_rejection(
            d,
            n,
            seed,
            STREAM_NU,
            cap,
            &UniformProposal { polar: PolarSampler::new(d)?, accept: neg },
        )?;
        return Ok((mu, nu));
    }
    let exponent = (d as f64 - 3.0) / 2.0;
    let lipschitz = (k * (k + d - 2)) as f64 / (d - 1) as f64;
    let mu = polar_rejection(d, n, seed, STREAM_MU, cap, &BinnedProposal::new(pos, exponent, lipschitz))?;
    let nu = polar_rejection(d, n, seed, STREAM_NU, cap, &BinnedProposal::new(neg, exponent, lipschitz))?;
    Ok((mu, nu))
}

/// `n` samples from the Gibbs density `∝ exp(γ L_{k,d})`. Since `|P| ≤ 1` the
/// acceptance `exp(γ(P - 1))` (`γ ≥ 0`) or `exp(γ(P + 1))` (`γ < 0`) is at
/// most 1 and at least `exp(-2|γ|)`.
pub fn sample_gibbs(spec: &GibbsSpec, n: usize, seed: RngSeed) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let (k, d, g) = (spec.k, spec.d, spec.gamma);
    let shift = if g >= 0.0 { -1.0 } else { 1.0 };
    let proposal = UniformProposal {
        polar: PolarSampler::new(d)?,
        accept: move |t| (g * (legendre_unchecked(k, d, t) + shift)).exp(),
    };
    polar_rejection(d, n, seed, STREAM_GIBBS, spec.iteration_cap, &proposal)
}

/// `n` draws from `N(0, I_d)` and `n` independent draws from the shrunk Gaussian,
/// obtained as `z + (√v - 1)⟨z, a⟩ a`.
pub fn sample_gaussian_pair(spec: &GaussianSpec, n: usize, seed: RngSeed) -> Result<(SampleSet, SampleSet)> {
    if n == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let dim = spec.d as usize;
    let scale = spec.shrunk_variance.sqrt() - 1.0;
    let draw = |stream: u64, shrink: bool| {
        let base = seed.derive(stream);
        let parts = map_indexed(chunks(n), |c| {
            let len = chunk_len(n, c);
            let mut rng = base.rng(c as u64);
            let mut out = vec![0.0; len * dim];
            for row in out.chunks_exact_mut(dim) {
                row.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                if shrink {
                    let p: f64 = row.iter().zip(&spec.shrunk_axis).map(|(a, b)| a * b).sum();
                    row.iter_mut().zip(&spec.shrunk_axis).for_each(|(v, a)| *v += scale * p * a);
                }
            }
            out
        });
        SampleSet::from_raw(parts.concat(), dim, Domain::Euclidean)
    };
    Ok((draw(STREAM_GAUSS_STD, false), draw(STREAM_GAUSS_SHRUNK, true)))
}
