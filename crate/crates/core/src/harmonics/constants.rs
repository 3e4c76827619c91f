use statrs::function::gamma::ln_gamma;

use super::legendre::{legendre_roots, legendre_unchecked};
use super::quadrature::{weighted_integral_with_breaks, QuadratureRule};
use super::LegendreIndex;
use crate::error::{Error, Result};

fn binomial(n: i64, r: i64) -> Result<u128> {
    if r < 0 || n < 0 || r > n {
        return Ok(0);
    }
    let r = r.min(n - r) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul(n - i).ok_or(Error::Overflow("harmonic dimension"))? / (i + 1);
    }
    Ok(acc)
}

/// `N_{k,d}`, the dimension of degree-`k` spherical harmonics on `S^{d-1}`,
/// computed exactly as `C(k+d-1, d-1) - C(k+d-3, d-1)`.
pub fn harmonic_dimension(idx: LegendreIndex) -> Result<u64> {
    let (k, d) = (idx.k() as i64, idx.d() as i64);
    let n = binomial(k + d - 1, d - 1)? - binomial(k + d - 3, d - 1)?;
    u64::try_from(n).map_err(|_| Error::Overflow("harmonic dimension"))
}

/// `log N_{k,d}`: exact when `N_{k,d}` is an exactly representable float,
/// otherwise `log(2k+d-2) + log Γ(k+d-2) - log Γ(k+1) - log Γ(d-1)`.
pub fn log_harmonic_dimension(idx: LegendreIndex) -> f64 {
    match exact_dimension(idx) {
        Some(n) => n.ln(),
        None => {
            let (k, d) = (idx.k() as f64, idx.d() as f64);
            (2.0 * k + d - 2.0).ln() + ln_gamma(k + d - 2.0) - ln_gamma(k + 1.0) - ln_gamma(d - 1.0)
        }
    }
}

/// `N_{k,d}` as a float when it is below `2^53`.
pub(crate) fn exact_dimension(idx: LegendreIndex) -> Option<f64> {
    harmonic_dimension(idx).ok().filter(|&n| n < 1 << 53).map(|n| n as f64)
}

/// `|S^{d-2}| / |S^{d-1}| = Γ(d/2) / (√π Γ((d-1)/2))`.
pub fn sphere_surface_ratio(d: u32) -> f64 {
    assert!(d >= 2, "sphere_surface_ratio requires d >= 2");
    let d = d as f64;
    (ln_gamma(d / 2.0) - ln_gamma((d - 1.0) / 2.0) - 0.5 * std::f64::consts::PI.ln()).exp()
}

/// `∫ |P_{k,d}(t)| (1-t^2)^{(d-3)/2} dt`, with panels split at the roots of `P_{k,d}`.
pub(crate) fn abs_legendre_integral(idx: LegendreIndex, rule: &QuadratureRule) -> Result<f64> {
    let mut breaks = legendre_roots(idx)?;
    breaks.push(0.0);
    let (k, d) = (idx.k(), idx.d());
    Ok(weighted_integral_with_breaks(|t| legendre_unchecked(k, d, t).abs(), d, &breaks, rule))
}

/// `γ_{k,d} = 2 / ∫ |L_{k,d}| dτ`, the constant making the signed-Legendre
/// pair `μ_d, ν_d` probability measures.
pub fn normalization_gamma(idx: LegendreIndex, rule: &QuadratureRule) -> Result<f64> {
    if idx.k() == 0 {
        return Err(Error::Domain("normalization constant needs k >= 1".into()));
    }
    let mass = sphere_surface_ratio(idx.d()) * abs_legendre_integral(idx, rule)?;
    if !mass.is_finite() || mass <= f64::MIN_POSITIVE {
        return Err(Error::Degenerate(format!("∫|L| dτ underflowed for {idx}")));
    }
    Ok(2.0 / mass)
}

/// Monomial coefficients of `P_{k,d}` (index = power), from the recurrence.
fn legendre_coefficients(k: u32, d: u32) -> Vec<f64> {
    let dd = d as f64;
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for j in 1..k {
        let jf = j as f64;
        let mut next = vec![0.0; cur.len() + 1];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] += (2.0 * jf + dd - 2.0) * c;
        }
        for (p, c) in prev.iter().enumerate() {
            next[p] -= jf * c;
        }
        for v in next.iter_mut() {
            *v /= jf + dd - 2.0;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `λ_{k,d}^{(α)} = (|S^{d-2}|/|S^{d-1}|) ∫ P_{k,d}(t) (t)_+^α (1-t^2)^{(d-3)/2} dt`,
/// the Funk–Hecke eigenvalue of `(x)_+^α` on degree-`k` harmonics.
///
/// Closed form: zero when `k ≡ α (mod 2)` and `k > α`; for `k ≥ α + 1` of
/// opposite parity a ratio of Gamma functions with sign `(-1)^{(k-1-α)/2}`.
/// The remaining low-degree cases `k ≤ α` are integrated term by term from
/// the monomial expansion of `P_{k,d}` with Beta integrals.
pub fn lambda_coefficient(idx: LegendreIndex, alpha: u32) -> f64 {
    let (k, d) = (idx.k(), idx.d());
    let ratio_ln = ln_gamma(d as f64 / 2.0) - ln_gamma((d as f64 - 1.0) / 2.0) - 0.5 * std::f64::consts::PI.ln();
    if k > alpha && (k - alpha).is_multiple_of(2) {
        return 0.0;
    }
    if k > alpha {
        let (kf, df, af) = (k as f64, d as f64, alpha as f64);
        let log_mag = ratio_ln + ln_gamma(af + 1.0) - kf * std::f64::consts::LN_2
            + ln_gamma((df - 1.0) / 2.0)
            + ln_gamma(kf - af)
            - ln_gamma((kf - af + 1.0) / 2.0)
            - ln_gamma((kf + df + af) / 2.0);
        let sign = if ((k - 1 - alpha) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * log_mag.exp();
    }
    // k ≤ α: ∫_0^1 t^m (1-t^2)^β dt = B((m+1)/2, β+1) / 2.
    let beta = (d as f64 - 3.0) / 2.0;
    let half_beta = |m: f64| {
        let a = (m + 1.0) / 2.0;
        0.5 * (ln_gamma(a) + ln_gamma(beta + 1.0) - ln_gamma(a + beta + 1.0)).exp()
    };
    let total: f64 = legendre_coefficients(k, d)
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(p, c)| c * half_beta((p as u32 + alpha) as f64))
        .sum();
    ratio_ln.exp() * total
}
