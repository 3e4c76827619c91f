use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::config::{DimRange, ExperimentConfig, ExperimentKind};
use super::plot::write_svg;
use super::rows::write_rows;
use super::runners::run_report;
use crate::error::{Error, Result};
use crate::harmonics::QuadratureRule;
use crate::measures::{
    sample_gaussian_pair, sample_gibbs, sample_legendre_pair, sample_uniform_sphere, write_csv, GaussianSpec,
    GibbsSpec, LegendrePairSpec, SampleSet,
};
use crate::metrics::TildeMode;
use crate::par::with_workers;
use crate::rng::RngSeed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ALL_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sphere-metrics",
    version,
    about = "F1/F2 metrics and Stein discrepancies on spheres: dimension sweeps and samplers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// F1 vs F2 IPM on the signed-Legendre pair across dimensions.
    IpmSep(RunArgs),
    /// F1 vs F2 Stein discrepancy between the uniform and Gibbs measures.
    SdSep(RunArgs),
    /// Every metric on the isotropic vs shrunk Gaussian pair, with a noise baseline.
    Gauss(RunArgs),
    /// Arc-cosine closed forms against random-feature Monte Carlo (|z| scores).
    KernelCheck(RunArgs),
    /// Draw samples from one of the built-in measures and write them as CSV.
    Sample(SampleArgs),
}

/// Flags shared by the sweeps. Anything omitted keeps the experiment's default.
#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    k: Option<u32>,
    /// `lo:hi[:stride]` (inclusive) or a comma-separated list.
    #[arg(long)]
    dims: Option<DimRange>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    alpha: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores. Output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart destination.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_enum)]
    tilde_t_mode: Option<TildeArg>,
    /// Rescale Gaussian samples into the unit ball with this radius.
    #[arg(long)]
    clip_to_ball: Option<f64>,
    /// Proposal budget of each rejection-sampling call.
    #[arg(long)]
    iteration_cap: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TildeArg {
    Arcsine,
    Uniform,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MeasureArg {
    Uniform,
    LegendreMu,
    LegendreNu,
    Gibbs,
    GaussIso,
    GaussShrunk,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long)]
    d: u32,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Append the lifting coordinate 1 to every point.
    #[arg(long)]
    lift: bool,
    /// Write a header row `x0,x1,...`.
    #[arg(long)]
    header: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind);
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(if let Some(v) = self.$flag { c.$field = v; })*};
        }
        set!(k => k, dims => dims, samples => n_samples, features => n_features, directions => n_directions,
             grid => grid_size, reps => repetitions, alpha => alpha, a => a, b => b, gamma => gamma,
             workers => workers, iteration_cap => iteration_cap);
        if let Some(s) = self.seed {
            c.seed = RngSeed(s);
        }
        if let Some(m) = self.tilde_t_mode {
            c.tilde_mode = match m {
                TildeArg::Arcsine => TildeMode::Arcsine,
                TildeArg::Uniform => TildeMode::Uniform,
            };
        }
        c.out_csv = self.out;
        c.out_plot = self.plot;
        c.clip_to_ball = self.clip_to_ball;
        c
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Unsupported(_) => EXIT_CONFIG,
        _ => EXIT_ALL_FAILED,
    }
}

fn run_sweep(config: ExperimentConfig) -> i32 {
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    let opened = output(config.out_csv.as_deref())
        .and_then(|csv| Ok((csv, config.out_plot.as_deref().map(create).transpose()?)));
    let (csv, plot) = match opened {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = match with_workers(config.workers, || run_report(&config)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    for (d, e) in &report.failures {
        eprintln!("dimension {d} failed: {e}");
    }
    let written = write_rows(&report.rows, csv).and_then(|()| match plot {
        Some(p) => {
            let title = format!("{} (k = {}, {} repetitions)", config.experiment.name(), config.k, config.repetitions);
            write_svg(&report.rows, &title, p)
        }
        None => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_ALL_FAILED;
    }
    if report.all_failed() {
        EXIT_ALL_FAILED
    } else {
        EXIT_OK
    }
}

fn draw(args: &SampleArgs) -> Result<SampleSet> {
    let seed = RngSeed(args.seed);
    let set = match args.measure {
        MeasureArg::Uniform => sample_uniform_sphere(args.d, args.n, seed)?,
        MeasureArg::LegendreMu | MeasureArg::LegendreNu => {
            let spec = LegendrePairSpec::new(args.k, args.d, &QuadratureRule::default())?;
            let (mu, nu) = sample_legendre_pair(&spec, args.n, seed)?;
            if args.measure == MeasureArg::LegendreMu {
                mu
            } else {
                nu
            }
        }
        MeasureArg::Gibbs => sample_gibbs(&GibbsSpec::new(args.k, args.d, args.gamma)?, args.n, seed)?,
        MeasureArg::GaussIso | MeasureArg::GaussShrunk => {
            let (iso, shrunk) = sample_gaussian_pair(&GaussianSpec::new(args.d)?, args.n, seed)?;
            if args.measure == MeasureArg::GaussIso {
                iso
            } else {
                shrunk
            }
        }
    };
    if args.lift {
        set.lift()
    } else {
        Ok(set)
    }
}

fn run_sample(args: SampleArgs) -> i32 {
    let out = match output(args.out.as_deref()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let set = match with_workers(args.workers.unwrap_or(0), || draw(&args)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match write_csv(&set, out, args.header) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ALL_FAILED
        }
    }
}

/// Entry point of the `sphere-metrics` binary. `argv` includes the program name.
/// Returns the process exit code: 0 on success, 2 for configuration errors
/// (including unwritable output paths), 3 when every row of a sweep failed.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::IpmSep(a) => run_sweep(a.into_config(ExperimentKind::IpmSeparation)),
        Command::SdSep(a) => run_sweep(a.into_config(ExperimentKind::SdSeparation)),
        Command::Gauss(a) => run_sweep(a.into_config(ExperimentKind::GaussianMetrics)),
        Command::KernelCheck(a) => run_sweep(a.into_config(ExperimentKind::KernelCheck)),
        Command::Sample(a) => run_sample(a),
    }
}
