use statrs::function::gamma::ln_gamma;

use super::quadrature::gauss_jacobi;
use super::LegendreIndex;
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// `P_{k,d}(t)` by the normalized three-term recurrence
/// `(j + d - 2) P_{j+1} = (2j + d - 2) t P_j - j P_{j-1}`, `P_0 = 1`, `P_1 = t`.
#[inline]
pub(crate) fn legendre_unchecked(k: u32, d: u32, t: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => t,
        _ => {
            let dd = d as f64;
            let (mut prev, mut cur) = (1.0, t);
            for j in 1..k {
                let jf = j as f64;
                let next = ((2.0 * jf + dd - 2.0) * t * cur - jf * prev) / (jf + dd - 2.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

fn check_t(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + UNIT_TOL {
        return Err(Error::Domain(format!("t = {t} lies outside [-1, 1]")));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Legendre polynomial `P_{k,d}(t)`, normalized so that `P_{k,d}(1) = 1`.
pub fn legendre_eval(idx: LegendreIndex, t: f64) -> Result<f64> {
    let t = check_t(t)?;
    Ok(legendre_unchecked(idx.k(), idx.d(), t))
}

/// Log of the factor linking `P_{k,d}^{(j)}` to `P_{k-j,d+2j}`.
fn derivative_log_prefactor(k: u32, d: u32, j: u32) -> f64 {
    let (k, d, j) = (k as f64, d as f64, j as f64);
    ln_gamma(k + 1.0) - ln_gamma(k - j + 1.0) + ln_gamma(k + j + d - 2.0) - ln_gamma(k + d - 2.0)
        + ln_gamma((d - 1.0) / 2.0)
        - j * std::f64::consts::LN_2
        - ln_gamma(j + (d - 1.0) / 2.0)
}

/// `j`-th derivative of `P_{k,d}` at `t`, through
/// `P^{(j)}_{k,d} = c_{k,d,j} P_{k-j,d+2j}`. Exactly zero when `k < j`.
pub fn legendre_derivative(idx: LegendreIndex, t: f64, j: u32) -> Result<f64> {
    let t = check_t(t)?;
    let (k, d) = (idx.k(), idx.d());
    if k < j {
        return Ok(0.0);
    }
    if j == 0 {
        return Ok(legendre_unchecked(k, d, t));
    }
    Ok(derivative_log_prefactor(k, d, j).exp() * legendre_unchecked(k - j, d + 2 * j, t))
}

/// Roots of `P_{k,d}` in increasing order (the Gauss–Gegenbauer nodes).
pub fn legendre_roots(idx: LegendreIndex) -> Result<Vec<f64>> {
    if idx.k() == 0 {
        return Ok(Vec::new());
    }
    let beta = idx.weight_exponent();
    Ok(gauss_jacobi(idx.k() as usize, beta, beta)?.0)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Legendre harmonic `L_{k,d}(x) = |x|^k P_{k,d}(x_d / |x|)`, with `e_d` the
/// last coordinate axis.
pub fn legendre_harmonic_eval(idx: LegendreIndex, x: &[f64]) -> Result<f64> {
    let d = idx.d() as usize;
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len() });
    }
    let r = norm(x);
    if r == 0.0 {
        return Ok(if idx.k() == 0 { 1.0 } else { 0.0 });
    }
    let t = (x[d - 1] / r).clamp(-1.0, 1.0);
    Ok(super::activation::powi_nonneg(r, idx.k()) * legendre_unchecked(idx.k(), idx.d(), t))
}

/// Euclidean and Riemannian gradients of `L_{k,d}` at a unit vector `x`,
/// written into the two output slices. No validation.
#[inline]
pub(crate) fn harmonic_grad_into(k: u32, d: u32, x: &[f64], euclid: &mut [f64], riem: &mut [f64]) {
    let n = x.len();
    if k == 0 {
        euclid.fill(0.0);
        riem.fill(0.0);
        return;
    }
    let t = x[n - 1].clamp(-1.0, 1.0);
    let kf = k as f64;
    let df = d as f64;
    let slope = kf * (kf + df - 2.0) / (df - 1.0) * legendre_unchecked(k - 1, d + 2, t);
    let p = legendre_unchecked(k, d, t);
    for i in 0..n {
        let axis = if i == n - 1 { 1.0 } else { 0.0 };
        euclid[i] = slope * (axis - t * x[i]) + kf * p * x[i];
        // Riemannian part: subtract the radial component k L(x) x.
        riem[i] = euclid[i] - kf * p * x[i];
    }
}

/// Gradients of `L_{k,d}` at `theta` on the unit sphere: the Euclidean gradient
/// of the homogeneous extension and its tangential (Riemannian) projection.
pub fn legendre_harmonic_grad(idx: LegendreIndex, theta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = idx.d() as usize;
    if theta.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: theta.len() });
    }
    let r = norm(theta);
    if (r - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotNormalized { norm: r });
    }
    let mut euclid = vec![0.0; d];
    let mut riem = vec![0.0; d];
    harmonic_grad_into(idx.k(), idx.d(), theta, &mut euclid, &mut riem);
    Ok((euclid, riem))
}
