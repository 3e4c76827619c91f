use statrs::function::gamma::ln_gamma;

use super::{GibbsSpec, LegendrePairSpec};
use crate::error::{Error, Result};
use crate::harmonics::{harmonic_grad_into, legendre_harmonic_eval};

/// Surface area `|S^{d-1}| = 2π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    (std::f64::consts::LN_2 + h * std::f64::consts::PI.ln() - ln_gamma(h)).exp()
}

fn check_unit(x: &[f64], tol: f64) -> Result<()> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > tol {
        return Err(Error::NotNormalized { norm: n });
    }
    Ok(())
}

/// Densities of `μ_d` and `ν_d` at `x` with respect to surface measure.
/// A point with `L_{k,d}(x) = 0` belongs to the `ν_d` branch (density 0 there).
pub fn density_legendre_pair(spec: &LegendrePairSpec, x: &[f64]) -> Result<(f64, f64)> {
    if x.len() != spec.d as usize {
        return Err(Error::DimensionMismatch { expected: spec.d as usize, found: x.len() });
    }
    check_unit(x, 1e-10)?;
    let l = legendre_harmonic_eval(spec.index(), x)?;
    let c = spec.gamma / sphere_area(spec.d);
    Ok(if l > 0.0 { (c * l, 0.0) } else { (0.0, -c * l) })
}

/// Score `∇_S log(dν/dτ)(x) = γ ∇_S L_{k,d}(x)` of the Gibbs measure.
pub fn score_gibbs(spec: &GibbsSpec, x: &[f64]) -> Result<Vec<f64>> {
    let d = spec.d as usize;
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len() });
    }
    check_unit(x, 1e-12)?;
    let mut euclid = vec![0.0; d];
    let mut riem = vec![0.0; d];
    harmonic_grad_into(spec.k, spec.d, x, &mut euclid, &mut riem);
    riem.iter_mut().for_each(|v| *v *= spec.gamma);
    Ok(riem)
}

/// Trace of the sphere Stein operator applied to a vector field `h` at `x`:
/// `(s - (d-1)x)ᵀ h + div h - xᵀ (Dh) x`, where `jacobian[i*d + j] = ∂h_i/∂x_j`
/// is the Euclidean Jacobian of any smooth extension of `h`. Its expectation
/// under the measure with score `s` vanishes.
pub fn stein_operator_trace(score: &[f64], x: &[f64], h: &[f64], jacobian: &[f64]) -> Result<f64> {
    let d = x.len();
    if score.len() != d || h.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: score.len().min(h.len()) });
    }
    if jacobian.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: jacobian.len() });
    }
    let dm1 = d as f64 - 1.0;
    let mut v = 0.0;
    for i in 0..d {
        v += (score[i] - dm1 * x[i]) * h[i] + jacobian[i * d + i];
        let row: f64 = (0..d).map(|j| jacobian[i * d + j] * x[j]).sum();
        v -= x[i] * row;
    }
    Ok(v)
}
