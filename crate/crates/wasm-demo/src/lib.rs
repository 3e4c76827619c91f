use sphere_metrics::harmonics::{
    harmonic_dimension, legendre_eval, legendre_roots, weighted_integral_with_breaks, ActivationSpec, LegendreIndex,
    QuadratureRule,
};
use sphere_metrics::measures::{sample_legendre_pair, LegendrePairSpec};
use sphere_metrics::metrics::{theoretical_f1_ipm, theoretical_ratio};
use sphere_metrics::RngSeed;
use wasm_bindgen::prelude::*;

fn js(e: sphere_metrics::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `P_{k,d}` on `points` equally spaced nodes of `[-1, 1]`.
#[wasm_bindgen]
pub fn legendre_curve(k: u32, d: u32, points: usize) -> Result<Vec<f64>, JsError> {
    let idx = LegendreIndex::new(k, d).map_err(js)?;
    let points = points.max(2);
    (0..points).map(|i| legendre_eval(idx, -1.0 + 2.0 * i as f64 / (points - 1) as f64).map_err(js)).collect()
}

/// Rows of `[d, N_{k,d}, F1, F2, F1/F2]` for the Legendre pair, flattened.
#[wasm_bindgen]
pub fn separation_table(k: u32, d_lo: u32, d_hi: u32, alpha: u32) -> Result<Vec<f64>, JsError> {
    if d_hi < d_lo || d_hi - d_lo > 200 {
        return Err(JsError::new("choose a dimension range of at most 200 values"));
    }
    let rule = QuadratureRule::default();
    let act = ActivationSpec::relu_power(alpha);
    let mut out = Vec::with_capacity(5 * (d_hi - d_lo + 1) as usize);
    for d in d_lo..=d_hi {
        let idx = LegendreIndex::new(k, d).map_err(js)?;
        let f1 = theoretical_f1_ipm(idx, &act, &rule).map_err(js)?;
        let ratio = theoretical_ratio(idx);
        let n = harmonic_dimension(idx).map(|n| n as f64).unwrap_or(ratio * ratio);
        out.extend([d as f64, n, f1, f1 / ratio, ratio]);
    }
    Ok(out)
}

/// Histograms of the last coordinate under `μ_d` and `ν_d`, followed by the
/// exact bin probabilities of `μ_d`: `3 * bins` values in total.
#[wasm_bindgen]
pub fn polar_histograms(k: u32, d: u32, n: usize, bins: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    if bins == 0 || n == 0 || n > 2_000_000 {
        return Err(JsError::new("need at least one bin and between 1 and 2e6 samples"));
    }
    let rule = QuadratureRule::default();
    let spec = LegendrePairSpec::new(k, d, &rule).map_err(js)?;
    let (mu, nu) = sample_legendre_pair(&spec, n, RngSeed(seed)).map_err(js)?;
    let mut out = vec![0.0; 3 * bins];
    let bin = |t: f64| (((t + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
    let last = d as usize - 1;
    for r in mu.rows() {
        out[bin(r[last])] += 1.0 / n as f64;
    }
    for r in nu.rows() {
        out[bins + bin(r[last])] += 1.0 / n as f64;
    }

    let idx = spec.index();
    let roots = legendre_roots(idx).map_err(js)?;
    let positive = |t: f64| legendre_eval(idx, t).map_or(0.0, |p| p.max(0.0));
    let edges: Vec<f64> = (0..=bins).map(|i| -1.0 + 2.0 * i as f64 / bins as f64).collect();
    let total = weighted_integral_with_breaks(positive, d, &roots, &rule);
    for (i, w) in edges.windows(2).enumerate() {
        let inside = |t: f64| if t >= w[0] && t < w[1] { positive(t) } else { 0.0 };
        let mut breaks = roots.clone();
        breaks.extend_from_slice(w);
        out[2 * bins + i] = weighted_integral_with_breaks(inside, d, &breaks, &rule) / total;
    }
    Ok(out)
}
