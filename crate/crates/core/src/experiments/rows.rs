use std::io::Write;

use crate::error::Result;
use crate::rng::RngSeed;

pub const CSV_HEADER: &str =
    "experiment,dimension,k,metric,mean,min,max,theory,n_samples,n_features,repetitions,seed,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The dimension could not be computed (for instance a sampler hit its cap).
    Failed,
    /// The quantity is not defined for this input (a ratio with zero denominator).
    Undefined,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Failed => "failed",
            RowStatus::Undefined => "undefined",
        }
    }
}

/// One aggregated `(dimension, metric)` cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub experiment: &'static str,
    pub dimension: u32,
    pub k: u32,
    pub metric_name: String,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub theory_value: Option<f64>,
    pub n_samples: usize,
    pub n_features: usize,
    pub repetitions: usize,
    pub seed: RngSeed,
    pub status: RowStatus,
}

/// Mean, min and max of repeated values.
pub(crate) fn summarize(v: &[f64]) -> (f64, f64, f64) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Guard against the mean landing a rounding error outside [min, max].
    (mean.clamp(min, max), min, max)
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_rows<W: Write>(rows: &[ExperimentRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.dimension,
            r.k,
            r.metric_name,
            real(r.mean),
            real(r.min),
            real(r.max),
            r.theory_value.map(real).unwrap_or_default(),
            r.n_samples,
            r.n_features,
            r.repetitions,
            r.seed,
            r.status.as_str()
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_format() {
        let row = ExperimentRow {
            experiment: "ipm-sep",
            dimension: 3,
            k: 2,
            metric_name: "ratio".into(),
            mean: 2.0,
            min: 1.5,
            max: 2.5,
            theory_value: None,
            n_samples: 10,
            n_features: 5,
            repetitions: 2,
            seed: RngSeed(7),
            status: RowStatus::Ok,
        };
        let mut buf = Vec::new();
        write_rows(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(
            line,
            "ipm-sep,3,2,ratio,2.0000000000000000e0,1.5000000000000000e0,2.5000000000000000e0,,10,5,2,7,ok"
        );
        assert_eq!(summarize(&[1.0, 3.0, 2.0]), (2.0, 1.0, 3.0));
    }
}
