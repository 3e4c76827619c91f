use rand_distr::{Distribution, StandardNormal};

use super::config::{ExperimentConfig, ExperimentKind};
use super::rows::{summarize, ExperimentRow, RowStatus};
use crate::error::{Error, Result};
use crate::harmonics::{ActivationSpec, LegendreIndex, QuadratureRule};
use crate::measures::{
    sample_gaussian_pair, sample_legendre_pair, GaussianSpec, GibbsSpec, LegendrePairSpec, SampleSet,
};
use crate::metrics::{
    arccos_kernel_uniform, ipm_f1_known_direction, ipm_f1_optimize_with, ipm_f2_features, ipm_f2_tilde,
    kernel_feature_estimate, max_sliced_w1, sd_f1_brute_force, sd_f1_lower_bound, sd_f2_features, sd_f2_upper_bound,
    sd_ratio_bound, sliced_w1, theoretical_f1_ipm, theoretical_ratio, F1Search, MaxSlicedMode,
};
use crate::rng::RngSeed;

/// Metric rows produced per dimension, in output order.
pub fn metric_names(config: &ExperimentConfig) -> Vec<String> {
    match config.experiment {
        ExperimentKind::IpmSeparation => vec!["f1_ipm".into(), "f2_ipm".into(), "ratio".into()],
        ExperimentKind::SdSeparation => vec!["f1_sd".into(), "f2_sd".into(), "ratio".into()],
        ExperimentKind::GaussianMetrics => {
            let base = ["f1_ipm_grid", "f1_ipm_axis", "f2_ipm", "f2_tilde_ipm", "sliced_w1", "max_sliced_w1"];
            base.iter().map(|m| m.to_string()).chain(base.iter().map(|m| format!("{m}_baseline"))).collect()
        }
        ExperimentKind::KernelCheck => vec![format!("kernel_alpha{}_abs_z", config.alpha)],
    }
}

/// Rows of a sweep together with the error behind each failed dimension.
#[derive(Debug)]
pub struct RunReport {
    pub rows: Vec<ExperimentRow>,
    pub failures: Vec<(u32, Error)>,
}

impl RunReport {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| r.status == RowStatus::Failed)
    }
}

/// Runs the configured sweep. Dimensions that fail produce `failed` rows and do
/// not stop the remaining ones.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    run_report(config).map(|r| r.rows)
}

pub fn run_report(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let mut failures = Vec::new();
    let rule = QuadratureRule::default();
    let mut rows = Vec::new();
    for &d in config.dims.values() {
        let ctx = Ctx { cfg: config, d };
        let result = match config.experiment {
            ExperimentKind::IpmSeparation => ipm_dimension(&ctx, &rule),
            ExperimentKind::SdSeparation => sd_dimension(&ctx),
            ExperimentKind::GaussianMetrics => gauss_dimension(&ctx),
            ExperimentKind::KernelCheck => kernel_dimension(&ctx),
        };
        match result {
            Ok(r) => rows.extend(r),
            Err(e) => {
                rows.extend(metric_names(config).into_iter().map(|m| ctx.failed(m)));
                failures.push((d, e));
            }
        }
    }
    Ok(RunReport { rows, failures })
}

pub fn run_ipm_separation(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(config, ExperimentKind::IpmSeparation)?;
    run_experiment(config)
}

pub fn run_sd_separation(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(config, ExperimentKind::SdSeparation)?;
    run_experiment(config)
}

pub fn run_gaussian_metrics(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(config, ExperimentKind::GaussianMetrics)?;
    run_experiment(config)
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if config.experiment != kind {
        return Err(Error::Config(format!(
            "expected a {} configuration, got {}",
            kind.name(),
            config.experiment.name()
        )));
    }
    Ok(())
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    d: u32,
}

impl Ctx<'_> {
    fn rep_seed(&self, rep: usize) -> RngSeed {
        self.cfg.seed.derive(self.d as u64).derive(rep as u64)
    }

    fn base(&self, metric: String, n_features: usize) -> ExperimentRow {
        ExperimentRow {
            experiment: self.cfg.experiment.name(),
            dimension: self.d,
            k: self.cfg.k,
            metric_name: metric,
            mean: f64::NAN,
            min: f64::NAN,
            max: f64::NAN,
            theory_value: None,
            n_samples: self.cfg.n_samples,
            n_features,
            repetitions: self.cfg.repetitions,
            seed: self.cfg.seed,
            status: RowStatus::Ok,
        }
    }

    fn row(&self, metric: &str, values: &[f64], theory: Option<f64>, n_features: usize) -> ExperimentRow {
        let (mean, min, max) = summarize(values);
        ExperimentRow { mean, min, max, theory_value: theory, ..self.base(metric.to_string(), n_features) }
    }

    /// Ratio of two repeated quantities; the bars divide extremes as `min/max` and `max/min`.
    fn ratio_row(
        &self,
        metric: &str,
        num: &[f64],
        den: &[f64],
        theory: Option<f64>,
        n_features: usize,
    ) -> ExperimentRow {
        let (nm, nlo, nhi) = summarize(num);
        let (dm, dlo, dhi) = summarize(den);
        let mut row = ExperimentRow { theory_value: theory, ..self.base(metric.to_string(), n_features) };
        if dlo > 0.0 && nlo >= 0.0 {
            row.mean = nm / dm;
            row.min = nlo / dhi;
            row.max = nhi / dlo;
        } else {
            row.status = RowStatus::Undefined;
        }
        row
    }

    fn failed(&self, metric: String) -> ExperimentRow {
        ExperimentRow { status: RowStatus::Failed, ..self.base(metric, self.cfg.n_features) }
    }
}

fn unit_axis(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

fn ipm_dimension(ctx: &Ctx<'_>, rule: &QuadratureRule) -> Result<Vec<ExperimentRow>> {
    let cfg = ctx.cfg;
    let act = cfg.activation();
    let mut spec = LegendrePairSpec::new(cfg.k, ctx.d, rule)?;
    spec.iteration_cap = cfg.iteration_cap;
    let idx = LegendreIndex::new(cfg.k, ctx.d)?;
    let f1_theory = theoretical_f1_ipm(idx, &act, rule)?;
    let ratio_theory = theoretical_ratio(idx);
    let axis = unit_axis(ctx.d as usize, ctx.d as usize - 1);
    let mut f1 = Vec::with_capacity(cfg.repetitions);
    let mut f2 = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let seed = ctx.rep_seed(rep);
        let (mu, nu) = sample_legendre_pair(&spec, cfg.n_samples, seed.derive(1))?;
        f1.push(ipm_f1_known_direction(&mu, &nu, &act, &axis)?.value);
        f2.push(ipm_f2_features(&mu, &nu, &act, cfg.n_features, seed.derive(2))?.value);
    }
    Ok(vec![
        ctx.row("f1_ipm", &f1, Some(f1_theory), 1),
        ctx.row("f2_ipm", &f2, Some(f1_theory / ratio_theory), cfg.n_features),
        ctx.ratio_row("ratio", &f1, &f2, Some(ratio_theory), cfg.n_features),
    ])
}

fn sd_dimension(ctx: &Ctx<'_>) -> Result<Vec<ExperimentRow>> {
    let cfg = ctx.cfg;
    let act = cfg.activation();
    let spec = GibbsSpec::new(cfg.k, ctx.d, cfg.gamma)?;
    let f1 = sd_f1_brute_force(&spec, &act, cfg.grid_size)?.value;
    let mut f2 = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        f2.push(sd_f2_features(&spec, &act, cfg.n_features, cfg.n_samples, ctx.rep_seed(rep))?.value);
    }
    let mut f1_row = ctx.row("f1_sd", &[f1], Some(sd_f1_lower_bound(&spec, &act).value), cfg.grid_size);
    f1_row.n_samples = 0;
    Ok(vec![
        f1_row,
        ctx.row("f2_sd", &f2, Some(sd_f2_upper_bound(&spec, &act).value), cfg.n_features),
        ctx.ratio_row("ratio", &[f1], &f2, Some(sd_ratio_bound(&spec, &act)), cfg.n_features),
    ])
}

/// Best F1 objective over directions `(cos φ e_d, sin φ)` of the lifted space.
fn f1_axis_plane(mu: &SampleSet, nu: &SampleSet, act: &ActivationSpec, angles: usize) -> f64 {
    let last = mu.base_dim() - 1;
    let xs: Vec<f64> = mu.rows().map(|r| r[last]).collect();
    let ys: Vec<f64> = nu.rows().map(|r| r[last]).collect();
    let mean = |v: &[f64], c: f64, s: f64| v.iter().map(|&x| act.eval(c * x + s)).sum::<f64>() / v.len() as f64;
    (0..angles)
        .map(|i| {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / angles as f64;
            let (s, c) = phi.sin_cos();
            (mean(&xs, c, s) - mean(&ys, c, s)).abs()
        })
        .fold(0.0, f64::max)
}

const AXIS_ANGLES: usize = 360;
const F1_GRID_CANDIDATES: usize = 256;
const F1_RESTARTS: usize = 4;
const F1_STEPS: usize = 30;

fn gauss_dimension(ctx: &Ctx<'_>) -> Result<Vec<ExperimentRow>> {
    let cfg = ctx.cfg;
    let act = cfg.activation();
    let spec = GaussianSpec::new(ctx.d)?;
    let d = ctx.d as usize;
    let names = metric_names(cfg);
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.repetitions); names.len()];
    let prepare = |s: SampleSet| -> Result<SampleSet> {
        match cfg.clip_to_ball {
            Some(r) => s.clip_to_ball(r)?.lift(),
            None => s.lift(),
        }
    };
    for rep in 0..cfg.repetitions {
        let seed = ctx.rep_seed(rep);
        let (a, b) = sample_gaussian_pair(&spec, cfg.n_samples, seed.derive(1))?;
        let (a2, _) = sample_gaussian_pair(&spec, cfg.n_samples, seed.derive(3))?;
        let (a, b, a2) = (prepare(a)?, prepare(b)?, prepare(a2)?);
        let grid = crate::measures::sample_uniform_sphere(
            d as u32 + 1,
            F1_GRID_CANDIDATES.min(cfg.n_directions),
            seed.derive(4),
        )?;
        let search = F1Search {
            restarts: F1_RESTARTS,
            steps: F1_STEPS,
            candidates: grid.rows().map(<[f64]>::to_vec).collect(),
            canonical: true,
        };
        for (half, (x, y)) in [(&a, &b), (&a, &a2)].into_iter().enumerate() {
            let off = half * 6;
            values[off].push(ipm_f1_optimize_with(x, y, &act, &search, seed.derive(5))?.objective);
            values[off + 1].push(f1_axis_plane(x, y, &act, AXIS_ANGLES));
            values[off + 2].push(ipm_f2_features(x, y, &act, cfg.n_features, seed.derive(6))?.value);
            values[off + 3].push(ipm_f2_tilde(x, y, &act, cfg.n_features, cfg.tilde_mode, seed.derive(7))?.value);
            values[off + 4].push(sliced_w1(x, y, cfg.n_directions, seed.derive(8))?.value);
            values[off + 5].push(max_sliced_w1(x, y, &MaxSlicedMode::KnownAxis(unit_axis(d, d - 1)))?.objective);
        }
    }
    let w1_theory =
        (cfg.clip_to_ball.is_none()).then(|| (1.0 - spec.shrunk_variance.sqrt()) * (2.0 / std::f64::consts::PI).sqrt());
    let counts =
        [F1_GRID_CANDIDATES.min(cfg.n_directions), AXIS_ANGLES, cfg.n_features, cfg.n_features, cfg.n_directions, 1];
    Ok(names
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (name, v))| {
            let theory = if i == 5 { w1_theory } else { None };
            ctx.row(name, v, theory, counts[i % 6])
        })
        .collect())
}

fn kernel_dimension(ctx: &Ctx<'_>) -> Result<Vec<ExperimentRow>> {
    let cfg = ctx.cfg;
    let d = ctx.d as usize;
    let act = ActivationSpec::relu_power(cfg.alpha);
    let mut z = Vec::with_capacity(cfg.n_samples);
    for pair in 0..cfg.n_samples {
        let seed = ctx.rep_seed(pair);
        let mut rng = seed.rng(0);
        let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let exact = arccos_kernel_uniform(&x, &y, cfg.alpha, d - 1)?;
        let (mc, se) = kernel_feature_estimate(&x, &y, &act, cfg.n_features, seed.derive(1))?;
        z.push(if se > 0.0 { ((mc - exact) / se).abs() } else { 0.0 });
    }
    let mut row = ctx.row(&metric_names(cfg)[0], &z, None, cfg.n_features);
    row.repetitions = 1;
    Ok(vec![row])
}
