//! Randomised zero testing of expressions over a sampling box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::ScalarExpr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("sample box has no variables")]
    EmptyBox,
    #[error("interval for variable {index} is empty: [{low}, {high}]")]
    EmptyInterval { index: usize, low: f64, high: f64 },
    #[error("sample count must be positive")]
    NoSamples,
    #[error("box has {got} variables but the expression context has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("inconclusive: all {samples} sample points were excluded or singular")]
    Inconclusive { samples: usize },
}

/// Axis-aligned box with a reproducible pseudo-random sampling plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    bounds: Vec<(f64, f64)>,
    samples: usize,
    seed: u64,
}

impl SampleBox {
    pub fn new(bounds: Vec<(f64, f64)>, samples: usize, seed: u64) -> Result<Self, SampleError> {
        if bounds.is_empty() {
            return Err(SampleError::EmptyBox);
        }
        if samples == 0 {
            return Err(SampleError::NoSamples);
        }
        for (index, &(low, high)) in bounds.iter().enumerate() {
            if !(low < high) {
                return Err(SampleError::EmptyInterval { index, low, high });
            }
        }
        Ok(SampleBox { bounds, samples, seed })
    }

    /// The same interval on every axis.
    pub fn cube(dim: usize, low: f64, high: f64, samples: usize, seed: u64) -> Result<Self, SampleError> {
        Self::new(vec![(low, high); dim], samples, seed)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_samples(&self, samples: usize) -> Self {
        SampleBox { samples: samples.max(1), ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SampleBox { seed, ..self.clone() }
    }

    /// Deterministic sample points; identical for identical (bounds, count, seed).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.samples)
            .map(|_| self.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect())
            .collect()
    }
}

/// Region skipped during sampling: points where `|expr| <= min_magnitude`
/// or where `expr` cannot be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub expr: ScalarExpr,
    pub min_magnitude: f64,
}

impl Exclusion {
    pub fn excludes(&self, point: &[f64]) -> bool {
        match self.expr.eval(point) {
            Ok(v) => !(v.abs() > self.min_magnitude),
            Err(_) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TolerancePolicy {
    pub abs: f64,
    pub rel: f64,
    pub exclusion: Option<Exclusion>,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { abs: 1e-9, rel: 1e-9, exclusion: None }
    }
}

impl TolerancePolicy {
    pub fn new(abs: f64, rel: f64) -> Self {
        assert!(abs > 0.0, "absolute tolerance must be positive");
        assert!(rel >= 0.0, "relative tolerance must be non-negative");
        TolerancePolicy { abs, rel, exclusion: None }
    }

    pub fn excluding(mut self, expr: ScalarExpr, min_magnitude: f64) -> Self {
        self.exclusion = Some(Exclusion { expr, min_magnitude });
        self
    }

    pub fn is_excluded(&self, point: &[f64]) -> bool {
        self.exclusion.as_ref().is_some_and(|e| e.excludes(point))
    }

    /// Whether a value with the given subterm scale counts as zero.
    pub fn accepts(&self, value: f64, scale: f64) -> bool {
        value.abs() <= self.abs + self.rel * scale
    }

    /// Sample points of `bx` that survive the exclusion predicate.
    pub fn admitted_points(&self, bx: &SampleBox) -> Vec<Vec<f64>> {
        bx.points().into_iter().filter(|p| !self.is_excluded(p)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    IdenticallyZeroOnBox,
    NonZero(Witness),
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::IdenticallyZeroOnBox)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ZeroVerdict::NonZero(w) => Some(w),
            ZeroVerdict::IdenticallyZeroOnBox => None,
        }
    }
}

/// Decides whether `e` vanishes on the box, up to the tolerance policy.
///
/// Points that are excluded, or at which `e` cannot be evaluated, are
/// skipped. If every sampled point is skipped the result is
/// [`SampleError::Inconclusive`].
pub fn is_zero(e: &ScalarExpr, bx: &SampleBox, pol: &TolerancePolicy) -> Result<ZeroVerdict, SampleError> {
    check_dim(e, bx)?;
    all_zero(std::slice::from_ref(e), bx, pol)
}

pub(crate) fn check_dim(e: &ScalarExpr, bx: &SampleBox) -> Result<(), SampleError> {
    match e.max_var() {
        Some(i) if i >= bx.dim() => Err(SampleError::DimensionMismatch { expected: i + 1, got: bx.dim() }),
        _ => Ok(()),
    }
}

/// Joint zero test of several expressions on one sample plan. A point counts
/// as admitted only if every expression evaluates there.
pub(crate) fn all_zero(exprs: &[ScalarExpr], bx: &SampleBox, pol: &TolerancePolicy) -> Result<ZeroVerdict, SampleError> {
    let mut admitted = 0usize;
    let mut values = Vec::with_capacity(exprs.len());
    'points: for point in bx.points() {
        if pol.is_excluded(&point) {
            continue;
        }
        values.clear();
        for e in exprs {
            match e.eval_with_scale(&point) {
                Ok(vs) => values.push(vs),
                Err(_) => continue 'points,
            }
        }
        admitted += 1;
        if let Some(&(value, _)) = values.iter().find(|&&(v, s)| !pol.accepts(v, s)) {
            return Ok(ZeroVerdict::NonZero(Witness { point, value }));
        }
    }
    if admitted == 0 {
        return Err(SampleError::Inconclusive { samples: bx.samples() });
    }
    Ok(ZeroVerdict::IdenticallyZeroOnBox)
}
