use crate::error::{Error, Result};

/// Where the rows of a [`SampleSet`] live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Unit sphere `S^{dim-1}`.
    Sphere,
    /// Unconstrained `R^dim`.
    Euclidean,
    /// `B^{dim-1} × {1}`: base point in the closed unit ball, last coordinate 1.
    BallLift,
    /// `R^{dim-1} × {1}` with no norm constraint on the base point.
    Lifted,
}

impl Domain {
    pub fn is_lifted(self) -> bool {
        matches!(self, Domain::BallLift | Domain::Lifted)
    }
}

const SPHERE_TOL: f64 = 1e-10;

/// `n` points of `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<f64>,
    dim: usize,
    domain: Domain,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl SampleSet {
    /// Validates the domain invariants before wrapping `points`.
    pub fn new(points: Vec<f64>, dim: usize, domain: Domain) -> Result<Self> {
        if dim == 0 || !points.len().is_multiple_of(dim) {
            return Err(Error::Domain(format!("{} values do not form rows of length {dim}", points.len())));
        }
        for row in points.chunks_exact(dim) {
            check_row(row, domain)?;
        }
        Ok(SampleSet { points, dim, domain })
    }

    pub(crate) fn from_raw(points: Vec<f64>, dim: usize, domain: Domain) -> Self {
        debug_assert!(dim > 0 && points.len().is_multiple_of(dim));
        SampleSet { points, dim, domain }
    }

    pub fn from_rows(rows: &[Vec<f64>], domain: Domain) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        SampleSet::new(rows.concat(), dim, domain)
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.points.chunks_exact(self.dim)
    }

    /// Dimension of the base point (excludes the constant coordinate of lifted sets).
    pub fn base_dim(&self) -> usize {
        if self.domain.is_lifted() {
            self.dim - 1
        } else {
            self.dim
        }
    }

    /// Appends the constant coordinate 1. The result is `BallLift` when every
    /// row has norm at most 1, `Lifted` otherwise.
    pub fn lift(&self) -> Result<SampleSet> {
        if self.domain.is_lifted() {
            return Err(Error::Domain("sample set is already lifted".into()));
        }
        let in_ball = self.rows().all(|r| norm(r) <= 1.0 + SPHERE_TOL);
        let mut points = Vec::with_capacity(self.len() * (self.dim + 1));
        for r in self.rows() {
            points.extend_from_slice(r);
            points.push(1.0);
        }
        let domain = if in_ball { Domain::BallLift } else { Domain::Lifted };
        Ok(SampleSet { points, dim: self.dim + 1, domain })
    }

    /// Maps every row to `x / max(1, |x| / radius) / radius`, so the result lies
    /// in the closed unit ball. Points within `radius` are only rescaled.
    pub fn clip_to_ball(&self, radius: f64) -> Result<SampleSet> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::Domain(format!("clip radius {radius} must be positive")));
        }
        if self.domain.is_lifted() {
            return Err(Error::Domain("clip before lifting".into()));
        }
        let mut points = self.points.clone();
        for r in points.chunks_exact_mut(self.dim) {
            let s = 1.0 / (norm(r) / radius).max(1.0) / radius;
            r.iter_mut().for_each(|v| *v *= s);
        }
        Ok(SampleSet { points, dim: self.dim, domain: Domain::Euclidean })
    }

    /// Projections `⟨x, θ⟩` of every row.
    pub fn project(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: theta.len() });
        }
        Ok(self.rows().map(|r| r.iter().zip(theta).map(|(a, b)| a * b).sum()).collect())
    }

    /// Applies the linear map `x ↦ M x` (`m` row-major, `dim × dim`) to every row.
    pub fn transform(&self, m: &[f64]) -> Result<SampleSet> {
        let d = self.dim;
        if m.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: m.len() });
        }
        let mut points = vec![0.0; self.points.len()];
        for (out, r) in points.chunks_exact_mut(d).zip(self.rows()) {
            for (i, o) in out.iter_mut().enumerate() {
                *o = m[i * d..(i + 1) * d].iter().zip(r).map(|(a, b)| a * b).sum();
            }
        }
        Ok(SampleSet { points, dim: d, domain: self.domain })
    }
}

fn check_row(row: &[f64], domain: Domain) -> Result<()> {
    if row.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("sample contains a non-finite coordinate".into()));
    }
    match domain {
        Domain::Sphere => {
            let n = norm(row);
            if (n - 1.0).abs() > SPHERE_TOL {
                return Err(Error::NotNormalized { norm: n });
            }
        }
        Domain::Euclidean => {}
        Domain::BallLift | Domain::Lifted => {
            let (base, last) = row.split_at(row.len() - 1);
            if last[0] != 1.0 {
                return Err(Error::Domain(format!("lift coordinate is {} instead of 1", last[0])));
            }
            if domain == Domain::BallLift && norm(base) > 1.0 + SPHERE_TOL {
                return Err(Error::Domain(format!("base point of norm {} is outside the unit ball", norm(base))));
            }
        }
    }
    Ok(())
}
