//! Gauss–Jacobi rules (Golub–Welsch) and the weighted integrals
//! `∫_{-1}^{1} f(t) (1-t^2)^{(d-3)/2} dt` used by every sphere formula.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Number of nodes per panel unless stated otherwise.
pub const DEFAULT_ORDER: usize = 256;

/// Gauss–Legendre rule on `[-1, 1]`: integrates polynomials up to degree
/// `2 * order - 1` exactly against `dt`. Its `order` also sets the size of the
/// Gauss–Jacobi panels built by [`weighted_integral`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn new(order: usize) -> Result<Self> {
        let (nodes, weights) = gauss_jacobi(order, 0.0, 0.0)?;
        Ok(QuadratureRule { nodes, weights, order })
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::new(DEFAULT_ORDER).expect("default quadrature order is valid")
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalized eigenvector (implicit QL with Wilkinson shifts).
/// `off[i]` couples rows `i` and `i + 1`.
fn tridiagonal_eigen(diag: &mut [f64], off: &mut [f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut z = vec![0.0; n];
    if n == 0 {
        return Ok(z);
    }
    z[0] = 1.0;
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Degenerate("tridiagonal QL iteration did not converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(z)
}

/// Nodes and weights of the `n`-point Gauss–Jacobi rule for the weight
/// `(1-t)^a (1+t)^b` on `[-1, 1]`, nodes in increasing order.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Domain("quadrature order must be positive".into()));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Domain(format!("Jacobi exponents ({a}, {b}) must exceed -1")));
    }
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (i, dv) in diag.iter_mut().enumerate() {
        let k = i as f64;
        *dv = if i == 0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0)) };
    }
    for (i, ov) in off.iter_mut().enumerate().take(n - 1) {
        let k = (i + 1) as f64;
        let s = 2.0 * k + ab;
        // The k = 1 term has a removable 0/0 when a + b = -1.
        let beta = if i == 0 {
            4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))
        } else {
            4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        *ov = beta.sqrt();
    }
    let z = tridiagonal_eigen(&mut diag, &mut off)?;
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0)).exp();
    let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(z).map(|(x, v)| (x, mu0 * v * v)).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

/// `∫_{lo}^{1} g(t) (1-t)^beta (1+t)^beta dt` for `lo > -1`: the endpoint
/// singularity is absorbed by a Jacobi rule, the `(1+t)^beta` factor is smooth.
fn upper_end_panel<F: Fn(f64) -> f64>(g: F, lo: f64, beta: f64, jac: &(Vec<f64>, Vec<f64>)) -> f64 {
    let half = (1.0 - lo) / 2.0;
    let scale = half.powf(beta + 1.0);
    let sum: f64 = jac
        .0
        .iter()
        .zip(&jac.1)
        .map(|(&u, &w)| {
            let t = lo + half * (1.0 + u);
            w * g(t) * (1.0 + t).powf(beta)
        })
        .sum();
    scale * sum
}

fn interior_panel<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, beta: f64, leg: &QuadratureRule) -> f64 {
    let half = (hi - lo) / 2.0;
    let mid = (hi + lo) / 2.0;
    half * leg
        .nodes
        .iter()
        .zip(&leg.weights)
        .map(|(&u, &w)| {
            let t = mid + half * u;
            w * g(t) * (1.0 - t * t).powf(beta)
        })
        .sum::<f64>()
}

/// Approximates `∫_{-1}^{1} f(t) (1-t^2)^{(d-3)/2} dt`, splitting at `t = 0`
/// so that integrands with a kink at the origin such as `(t)_+^alpha` keep
/// spectral accuracy.
pub fn weighted_integral<F: Fn(f64) -> f64>(f: F, d: u32, rule: &QuadratureRule) -> f64 {
    weighted_integral_with_breaks(f, d, &[0.0], rule)
}

/// As [`weighted_integral`], with extra panel boundaries at `breaks` (kinks of
/// `f`, e.g. roots of `P_{k,d}` for `|P_{k,d}|`). Breaks outside `(-1, 1)` are
/// ignored.
pub fn weighted_integral_with_breaks<F: Fn(f64) -> f64>(f: F, d: u32, breaks: &[f64], rule: &QuadratureRule) -> f64 {
    assert!(d >= 2, "weighted_integral requires d >= 2");
    let beta = (d as f64 - 3.0) / 2.0;
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|t| t.abs() < 1.0).collect();
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let jac = gauss_jacobi(rule.order, beta, 0.0).expect("valid Jacobi exponents for d >= 2");
    let first = cuts[0];
    let last = *cuts.last().unwrap();
    // [-1, first]: mirror onto [-first, 1].
    let mut total = upper_end_panel(|s| f(-s), -first, beta, &jac);
    for w in cuts.windows(2) {
        total += interior_panel(&f, w[0], w[1], beta, rule);
    }
    total + upper_end_panel(&f, last, beta, &jac)
}
