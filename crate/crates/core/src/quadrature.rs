//! Composite rules over one period with optional Richardson refinement.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Trapezoid,
    Simpson,
}

impl Rule {
    /// Algebraic order used for Richardson extrapolation.
    pub fn order(self) -> i32 {
        match self {
            Rule::Trapezoid => 2,
            Rule::Simpson => 4,
        }
    }
}

pub const MIN_PANELS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("closed-curve rules need at least {MIN_PANELS} panels, got {0}")]
    TooFewPanels(usize),
    #[error("convergence tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("too many refinement levels ({0})")]
    TooManyLevels(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub panels: usize,
    pub refinements: u32,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rule: Rule::Simpson, panels: 64, refinements: 1, tol: 1e-8 }
    }
}

impl QuadratureSpec {
    pub fn new(rule: Rule, panels: usize, refinements: u32, tol: f64) -> Result<Self, QuadratureError> {
        let spec = QuadratureSpec { rule, panels, refinements, tol };
        spec.validate()?;
        Ok(spec)
    }

    pub fn simpson(panels: usize) -> Self {
        QuadratureSpec { rule: Rule::Simpson, panels, refinements: 0, tol: 1e-8 }
    }

    pub fn trapezoid(panels: usize) -> Self {
        QuadratureSpec { rule: Rule::Trapezoid, panels, refinements: 0, tol: 1e-8 }
    }

    pub fn with_refinements(mut self, refinements: u32) -> Self {
        self.refinements = refinements;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.panels < MIN_PANELS {
            return Err(QuadratureError::TooFewPanels(self.panels));
        }
        if !(self.tol > 0.0) {
            return Err(QuadratureError::BadTolerance(self.tol));
        }
        if self.refinements > 16 || self.panels.checked_shl(self.refinements).is_none() {
            return Err(QuadratureError::TooManyLevels(self.refinements));
        }
        Ok(())
    }

    /// Panel counts per level, coarsest first.
    pub fn levels(&self) -> Vec<usize> {
        (0..=self.refinements).map(|k| self.panels << k).collect()
    }
}

/// Nodes and weights of `rule` with `panels` panels over a full period of
/// length `period`. The endpoint is identified with the start, so the
/// trapezoid rule has `panels` nodes and Simpson adds one midpoint per panel.
pub fn periodic_nodes(rule: Rule, panels: usize, period: f64) -> Vec<(f64, f64)> {
    let h = period / panels as f64;
    match rule {
        Rule::Trapezoid => (0..panels).map(|i| (i as f64 * h, h)).collect(),
        Rule::Simpson => {
            let mut nodes = Vec::with_capacity(2 * panels);
            for i in 0..panels {
                nodes.push((i as f64 * h, h / 3.0));
                nodes.push(((i as f64 + 0.5) * h, 2.0 * h / 3.0));
            }
            nodes
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub panels: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Difference between the two finest levels; absent without refinement.
    pub error_estimate: Option<f64>,
    pub converged: bool,
    pub table: Vec<Level>,
}

/// Runs `eval` at each level of `spec` and extrapolates the last two values.
pub fn refine<E>(spec: &QuadratureSpec, mut eval: impl FnMut(usize) -> Result<f64, E>) -> Result<QuadratureResult, E>
where
    E: From<QuadratureError>,
{
    spec.validate()?;
    let mut table = Vec::new();
    for panels in spec.levels() {
        table.push(Level { panels, value: eval(panels)? });
    }
    let last = table[table.len() - 1].value;
    let (value, error_estimate) = if table.len() >= 2 {
        let prev = table[table.len() - 2].value;
        let factor = 2f64.powi(spec.rule.order()) - 1.0;
        (last + (last - prev) / factor, Some((last - prev).abs()))
    } else {
        (last, None)
    };
    let converged = error_estimate.map_or(true, |e| e <= spec.tol);
    Ok(QuadratureResult { value, error_estimate, converged, table })
}
