//! Oracles shared by the integration tests and the acceptance harness. They
//! are computed from first principles (quadrature, Monte Carlo, sorting)
//! rather than from the closed forms under test.
#![allow(dead_code)]

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use sphere_metrics::harmonics::{
    gauss_jacobi, legendre_eval, legendre_harmonic_grad, legendre_roots, ActivationSpec, LegendreIndex, QuadratureRule,
};
use sphere_metrics::measures::{
    sample_gaussian_pair, sample_legendre_pair, sample_uniform_sphere, score_gibbs, stein_operator_trace, GaussianSpec,
    GibbsSpec, LegendrePairSpec, SampleSet,
};
use sphere_metrics::metrics::{
    ipm_f1_known_direction, ipm_f1_optimize, ipm_f1_optimize_with, ipm_f2_features, ipm_f2_kernel, ipm_f2_tilde,
    max_sliced_w1, mmd2_kernel, sd_f1_brute_force, sd_f1_lower_bound, sd_f2_features, sd_f2_upper_bound, sliced_w1,
    wasserstein_1d, F1Search, KernelVariant, MaxSlicedMode, TildeMode,
};
use sphere_metrics::RngSeed;

/// `∫_a^b f(t) (1-t²)^{(d-3)/2} dt` by composite Gauss–Legendre in the angle
/// `t = sin φ` (which makes the weight `cos^{d-2} φ` smooth), with panels split
/// at `breaks`.
pub fn panel_integral<F: Fn(f64) -> f64>(f: &F, d: u32, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let (nodes, weights) = gauss_jacobi(48, 0.0, 0.0).unwrap();
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&t| t > a && t < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0].asin(), w[1].asin());
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        for (x, wt) in nodes.iter().zip(&weights) {
            let phi = mid + half * x;
            total += half * wt * f(phi.sin()) * phi.cos().powi(d as i32 - 2);
        }
    }
    total
}

/// Pearson χ² test of polar samples against the unnormalized polar density
/// `f(t)(1-t²)^{(d-3)/2}` on `bins` equal-width bins. Bins of zero expected
/// mass must be empty. Returns `(statistic, dof, p-value, empty_bins_ok)`.
pub fn chi_square_polar<F: Fn(f64) -> f64>(
    ts: &[f64],
    f: F,
    d: u32,
    bins: usize,
    breaks: &[f64],
) -> (f64, usize, f64, bool) {
    let edges: Vec<f64> = (0..=bins).map(|i| -1.0 + 2.0 * i as f64 / bins as f64).collect();
    let mass: Vec<f64> = edges.windows(2).map(|w| panel_integral(&f, d, w[0], w[1], breaks)).collect();
    let total: f64 = mass.iter().sum();
    let mut counts = vec![0usize; bins];
    for &t in ts {
        let b = (((t + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = ts.len() as f64;
    let mut stat = 0.0;
    let mut used = 0;
    let mut empty_ok = true;
    for (m, &c) in mass.iter().zip(&counts) {
        let expected = n * m / total;
        if expected < 1e-9 {
            empty_ok &= c == 0;
            continue;
        }
        stat += (c as f64 - expected).powi(2) / expected;
        used += 1;
    }
    let dof = used - 1;
    let p = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat);
    (stat, dof, p, empty_ok)
}

/// Last coordinates of a sample set.
pub fn polar(set: &SampleSet) -> Vec<f64> {
    set.rows().map(|r| r[r.len() - 1]).collect()
}

pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Monte Carlo `E‖∇_S L_{k,d}‖²` under the uniform measure.
pub fn gradient_energy_mc(k: u32, d: u32, n: usize, seed: RngSeed) -> (f64, f64) {
    let idx = LegendreIndex::new(k, d).unwrap();
    let xs = sample_uniform_sphere(d, n, seed).unwrap();
    let v: Vec<f64> = xs
        .rows()
        .map(|x| {
            let (_, riem) = legendre_harmonic_grad(idx, x).unwrap();
            riem.iter().map(|g| g * g).sum()
        })
        .collect();
    mean_se(&v)
}

/// A smooth test field `h(x) = (tanh(⟨b, x⟩) + x_d² + x_d³) a + M x` with its Jacobian.
pub struct TestField {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub m: Vec<f64>,
}

impl TestField {
    pub fn new(d: usize) -> Self {
        let a = (0..d).map(|i| 0.3 + 0.1 * i as f64).collect();
        let b = (0..d).map(|i| if i % 2 == 0 { 0.8 } else { -0.5 }).collect();
        let m = (0..d * d).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.2).collect();
        TestField { a, b, m }
    }

    pub fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = x.len();
        let s: f64 = self.b.iter().zip(x).map(|(b, x)| b * x).sum();
        let th = s.tanh();
        let sech2 = 1.0 - th * th;
        let t = x[d - 1];
        let poly = t * t + t * t * t;
        let dpoly = 2.0 * t + 3.0 * t * t;
        let mut h = vec![0.0; d];
        let mut jac = vec![0.0; d * d];
        for i in 0..d {
            h[i] = (th + poly) * self.a[i] + (0..d).map(|j| self.m[i * d + j] * x[j]).sum::<f64>();
            for j in 0..d {
                jac[i * d + j] = sech2 * self.a[i] * self.b[j] + self.m[i * d + j];
            }
            jac[i * d + d - 1] += dpoly * self.a[i];
        }
        (h, jac)
    }
}

/// Stein identity residual `E_ν[A_ν h]` over samples of the Gibbs measure.
pub fn stein_identity_mc(spec: &GibbsSpec, xs: &SampleSet) -> (f64, f64) {
    let field = TestField::new(spec.d as usize);
    let v: Vec<f64> = xs
        .rows()
        .map(|x| {
            let s = score_gibbs(spec, x).unwrap();
            let (h, jac) = field.eval(x);
            stein_operator_trace(&s, x, &h, &jac).unwrap()
        })
        .collect();
    mean_se(&v)
}

/// Funk–Hecke coefficient of `σ` on degree `k` by quadrature:
/// `(|S^{d-2}|/|S^{d-1}|) ∫ P_{k,d}(t) σ(t) (1-t²)^{(d-3)/2} dt`.
pub fn lambda_by_quadrature(k: u32, d: u32, sigma: &ActivationSpec) -> f64 {
    let idx = LegendreIndex::new(k, d).unwrap();
    let mut breaks = vec![0.0];
    if k > 0 {
        breaks.extend(legendre_roots(idx).unwrap());
    }
    let f = |t: f64| legendre_eval(idx, t).unwrap() * sigma.eval(t);
    let mass = panel_integral(&|_| 1.0, d, -1.0, 1.0, &[0.0]);
    panel_integral(&f, d, -1.0, 1.0, &breaks) / mass
}

pub fn harmonic_dimension_oracle(k: u32, d: u32) -> f64 {
    // Dimension of degree-k homogeneous polynomials in d variables minus degree k-2.
    let c = |n: u128, r: u128| -> u128 { (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1)) };
    let (k, d) = (k as u128, d as u128);
    (c(k + d - 1, d - 1) - if k >= 2 { c(k + d - 3, d - 1) } else { 0 }) as f64
}

/// Exact F2 Stein discrepancy for the ReLU power `(x)_+^α` with `γ`:
/// `|γ| sqrt((A² k(k+d-2) + (Ak+B)²) / N_{k,d})`, with the Funk–Hecke
/// coefficients taken from quadrature.
pub fn exact_f2_sd(k: u32, d: u32, alpha: u32, gamma: f64) -> f64 {
    let kf = k as f64;
    let a1 = alpha as f64 + 1.0;
    let lam = lambda_by_quadrature(k, d, &ActivationSpec::relu_power(alpha + 1));
    let lam_prev = lambda_by_quadrature(k - 1, d, &ActivationSpec::relu_power(alpha));
    let a = lam_prev - kf / a1 * lam;
    let b = -kf * (a1 - kf) / a1 * lam;
    let n = harmonic_dimension_oracle(k, d);
    gamma.abs() * ((a * a * kf * (kf + d as f64 - 2.0) + (a * kf + b).powi(2)) / n).sqrt()
}

/// Random points in the unit ball of `R^d`: uniform direction, radius `r^{1/d}`
/// rescaled by `scale`, shifted by `shift` and clipped back into the ball.
pub fn ball_points(d: usize, n: usize, scale: f64, shift: &[f64], seed: RngSeed) -> SampleSet {
    let dirs = sample_uniform_sphere(d as u32, n, seed).unwrap();
    let mut rng = seed.derive(1).rng(0);
    let mut rows = Vec::with_capacity(n);
    for u in dirs.rows() {
        let rad = rng.random::<f64>().powf(1.0 / d as f64) * scale;
        let mut x: Vec<f64> = u.iter().zip(shift).map(|(u, s)| u * rad + s).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1.0 {
            x.iter_mut().for_each(|v| *v /= norm);
        }
        rows.push(x);
    }
    SampleSet::from_rows(&rows, sphere_metrics::measures::Domain::Euclidean).unwrap()
}

/// Lifted pairs of random unit-ball samples of varying shape.
pub fn ball_pairs(count: usize, n: usize) -> Vec<(SampleSet, SampleSet)> {
    (0..count)
        .map(|i| {
            let d = 2 + i % 4;
            let seed = RngSeed(1000 + i as u64);
            let mut shift = vec![0.0; d];
            shift[i % d] = 0.1 * (i % 3) as f64;
            let a = ball_points(d, n, 1.0, &vec![0.0; d], seed);
            let b = ball_points(d, n, 0.5 + 0.05 * i as f64 % 0.5, &shift, seed.derive(7));
            (a.lift().unwrap(), b.lift().unwrap())
        })
        .collect()
}

/// Clipped and lifted isotropic vs shrunk Gaussian pair in `R^4`.
pub fn clipped_gaussian_pair(n: usize, seed: RngSeed) -> (SampleSet, SampleSet) {
    let spec = GaussianSpec::new(4).unwrap();
    let (a, b) = sample_gaussian_pair(&spec, n, seed).unwrap();
    let r = 4.0;
    (a.clip_to_ball(r).unwrap().lift().unwrap(), b.clip_to_ball(r).unwrap().lift().unwrap())
}

/// Both sides of `π F̃2² ≤ SW` and of `F1 ≤ max-sliced` on one lifted pair.
#[derive(Debug)]
pub struct BallInequalities {
    pub pi_tilde_sq: f64,
    pub sliced: f64,
    pub combined_se: f64,
    pub f1: f64,
    pub max_sliced: f64,
}

impl BallInequalities {
    pub fn tilde_holds(&self) -> bool {
        self.pi_tilde_sq <= self.sliced + 3.0 * self.combined_se
    }

    pub fn max_sliced_holds(&self) -> bool {
        self.max_sliced >= self.f1 * (1.0 - 1e-12)
    }
}

pub fn ball_inequalities(mu: &SampleSet, nu: &SampleSet, seed: RngSeed) -> BallInequalities {
    let act = ActivationSpec::relu();
    let tilde = ipm_f2_tilde(mu, nu, &act, 4000, TildeMode::Arcsine, seed).unwrap();
    let sw = sliced_w1(mu, nu, 1000, seed.derive(1)).unwrap();
    let pi_tilde_sq = std::f64::consts::PI * tilde.value * tilde.value;
    let combined_se =
        ((2.0 * std::f64::consts::PI * tilde.value * tilde.std_error).powi(2) + sw.std_error.powi(2)).sqrt();

    let base = mu.base_dim();
    let candidates = sample_uniform_sphere(base as u32 + 1, 64, seed.derive(2)).unwrap();
    let search = F1Search {
        restarts: 3,
        steps: 25,
        candidates: candidates.rows().map(<[f64]>::to_vec).collect(),
        canonical: true,
    };
    let f1 = ipm_f1_optimize_with(mu, nu, &act, &search, seed.derive(3)).unwrap();
    // The max-sliced search shares the base parts of the F1 candidates and of the F1 optimum.
    let mut dirs: Vec<Vec<f64>> =
        search.candidates.iter().chain(std::iter::once(&f1.direction)).filter_map(|c| unit_base(c, base)).collect();
    dirs.extend((0..base).map(|i| {
        let mut e = vec![0.0; base];
        e[i] = 1.0;
        e
    }));
    let ms = max_sliced_w1(mu, nu, &MaxSlicedMode::Candidates(dirs)).unwrap();
    BallInequalities { pi_tilde_sq, sliced: sw.value, combined_se, f1: f1.objective, max_sliced: ms.objective }
}

fn unit_base(theta: &[f64], base: usize) -> Option<Vec<f64>> {
    let w = &theta[..base];
    let n = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    (n > 1e-12).then(|| w.iter().map(|v| v / n).collect())
}

/// Every metric evaluated on identical inputs, with the rounding slack it is allowed.
pub fn zero_law_values() -> Vec<(&'static str, f64, f64)> {
    let act = ActivationSpec::relu();
    let spec = LegendrePairSpec::new(2, 4, &QuadratureRule::default()).unwrap();
    let (mu, _) = sample_legendre_pair(&spec, 2000, RngSeed(1)).unwrap();
    let axis = [0.0, 0.0, 0.0, 1.0];
    let lifted = mu.lift().unwrap();
    let ts: Vec<f64> = mu.rows().map(|r| r[0]).collect();
    let flat = GibbsSpec::new(3, 5, 0.0).unwrap();
    let grid = MaxSlicedMode::GridOptimize { n_candidates: 20, seed: RngSeed(5) };
    vec![
        ("f1_known_direction", ipm_f1_known_direction(&mu, &mu, &act, &axis).unwrap().value, 0.0),
        ("f1_optimize", ipm_f1_optimize(&mu, &mu, &act, 2, 5, RngSeed(2)).unwrap().objective, 0.0),
        ("f2_features", ipm_f2_features(&mu, &mu, &act, 100, RngSeed(3)).unwrap().value, 0.0),
        ("sliced_w1", sliced_w1(&mu, &mu, 50, RngSeed(4)).unwrap().value, 0.0),
        ("max_sliced_w1", max_sliced_w1(&mu, &mu, &grid).unwrap().objective, 0.0),
        ("f2_tilde", ipm_f2_tilde(&lifted, &lifted, &act, 100, TildeMode::Uniform, RngSeed(6)).unwrap().value, 0.0),
        ("f2_kernel", ipm_f2_kernel(&mu, &mu, 1, KernelVariant::Plugin).unwrap(), 0.0),
        ("mmd2_plugin", mmd2_kernel(&mu, &mu, 1, KernelVariant::Plugin).unwrap().abs(), 1e-15),
        ("wasserstein_1d", wasserstein_1d(&ts, &ts).unwrap(), 0.0),
        ("sd_f1_brute_force", sd_f1_brute_force(&flat, &act, 200).unwrap().value, 0.0),
        ("sd_f1_lower_bound", sd_f1_lower_bound(&flat, &act).value, 0.0),
        ("sd_f2_upper_bound", sd_f2_upper_bound(&flat, &act).value, 0.0),
        ("sd_f2_features", sd_f2_features(&flat, &act, 50, 500, RngSeed(7)).unwrap().value, 0.0),
    ]
}
