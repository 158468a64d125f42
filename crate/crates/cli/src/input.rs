//! TOML input files. Every subcommand reads the same document shape and uses
//! the sections it needs; expressions are strings in the expression grammar.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use cartan_core::{
    parse_expr, ClosedCurve, Context, DifferentialForm, EMPotentials, FluidState, QuadratureSpec, Rule, SampleBox,
    ScalarExpr, SignatureSpec, TolerancePolicy, Vec3,
};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

const DEFAULT_SAMPLES: usize = 64;
const DEFAULT_SEED: u64 = 0;
const DEFAULT_EXCLUSION_MIN: f64 = 1e-6;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub variables: Option<Vec<String>>,
    pub one_form: Option<BTreeMap<String, Spanned<String>>>,
    pub phi: Option<Spanned<String>>,
    #[serde(rename = "box")]
    pub sample_box: Option<BTreeMap<String, [f64; 2]>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tolerances: Option<Tolerances>,
    pub exclusion: Option<Spanned<String>>,
    pub exclusion_min: Option<f64>,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
    pub quadrature: Option<QuadratureInput>,
    pub signature: Option<SignatureInput>,
    pub constants: Option<Constants>,
    pub topology: Option<TopologyInput>,
    pub physics: Option<PhysicsInput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Period {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default = "default_parameter")]
    pub parameter: String,
    pub period: Option<Period>,
    pub components: Vec<Spanned<String>>,
}

fn default_parameter() -> String {
    "t".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureInput {
    pub rule: Option<String>,
    pub panels: Option<usize>,
    pub refinements: Option<u32>,
    pub tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureInput {
    pub signs: Vec<f64>,
    #[serde(default = "default_p")]
    pub p: f64,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(rename = "E_over_c")]
    pub e_over_c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyInput {
    pub points: Option<usize>,
    #[serde(default)]
    pub maps: Vec<Vec<usize>>,
}

// Internally tagged enums buffer their content, which loses span
// information, so physics expressions carry only their in-expression offset.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PhysicsInput {
    Fluid {
        v: [String; 3],
        psi: Option<String>,
        #[serde(default)]
        nu: f64,
        theta: Option<String>,
    },
    Em {
        a: [String; 3],
        phi: Option<String>,
        velocity: Option<[String; 3]>,
    },
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol_abs: Option<f64>,
    pub tol_rel: Option<f64>,
    pub panels: Option<usize>,
    pub refine: Option<u32>,
}

/// A parsed file together with its source text, for error positions.
pub struct Input {
    pub file: InputFile,
    source: String,
    name: String,
    overrides: Overrides,
}

pub enum Physics {
    Fluid { state: FluidState, theta: Option<ScalarExpr> },
    Em { potentials: EMPotentials, velocity: Option<Vec3> },
}

impl Input {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self, CliError> {
        let source = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::from_source(source, path.display().to_string(), overrides)
    }

    pub fn from_source(source: String, name: String, overrides: Overrides) -> Result<Self, CliError> {
        let file: InputFile = toml::from_str(&source).map_err(|e| CliError::Input(format!("{name}: {e}")))?;
        Ok(Input { file, source, name, overrides })
    }

    fn line_col(&self, offset: usize) -> (usize, usize) {
        let before = &self.source[..offset.min(self.source.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (line, col)
    }

    fn invalid(&self, field: &str, message: impl std::fmt::Display) -> CliError {
        CliError::Input(format!("{}: {field}: {message}", self.name))
    }

    fn expr(&self, text: &Spanned<String>, ctx: &Context, field: &str) -> Result<ScalarExpr, CliError> {
        parse_expr(text.get_ref(), ctx).map_err(|e| {
            // +1 skips the opening quote of the TOML string
            let (line, col) = self.line_col(text.span().start + 1 + e.offset());
            CliError::Input(format!("{}:{line}:{col}: {field}: {e}", self.name))
        })
    }

    fn unspanned(&self, text: &str, ctx: &Context, field: &str) -> Result<ScalarExpr, CliError> {
        parse_expr(text, ctx).map_err(|e| self.invalid(field, e))
    }

    pub fn context(&self) -> Result<Context, CliError> {
        let names = self.file.variables.as_ref().ok_or_else(|| self.invalid("variables", "missing"))?;
        if names.is_empty() {
            return Err(self.invalid("variables", "empty list"));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(self.invalid("variables", format!("duplicate name `{n}`")));
            }
        }
        Ok(Context::new(names.iter().cloned()))
    }

    fn spacetime(&self) -> Result<Context, CliError> {
        match &self.file.variables {
            None => Ok(Context::new(["x", "y", "z", "t"])),
            Some(_) => {
                let ctx = self.context()?;
                if ctx.len() != 4 {
                    return Err(self.invalid("variables", "physics needs exactly four variables (x, y, z, t order)"));
                }
                Ok(ctx)
            }
        }
    }

    /// The 1-form from `one_form`, with `phi` supplying `−φ dt` when given.
    pub fn one_form(&self) -> Result<DifferentialForm, CliError> {
        let ctx = self.context()?;
        let terms = self.file.one_form.as_ref().ok_or_else(|| self.invalid("one_form", "missing"))?;
        let mut coeffs = vec![ScalarExpr::zero(); ctx.len()];
        for (key, text) in terms {
            let index = key
                .strip_prefix('d')
                .and_then(|v| ctx.index_of(v))
                .ok_or_else(|| self.invalid("one_form", format!("key `{key}` is not d<variable>")))?;
            coeffs[index] = self.expr(text, &ctx, &format!("one_form.{key}"))?;
        }
        if let Some(phi) = &self.file.phi {
            if ctx.len() != 4 {
                return Err(self.invalid("phi", "needs four variables with time last"));
            }
            if terms.contains_key(&format!("d{}", ctx.name(3))) {
                return Err(self.invalid("phi", "cannot be combined with an explicit time coefficient"));
            }
            coeffs[3] = -self.expr(phi, &ctx, "phi")?;
        }
        DifferentialForm::one_form(&ctx, coeffs).map_err(|e| self.invalid("one_form", e))
    }

    pub fn sample_box(&self, ctx: &Context) -> Result<SampleBox, CliError> {
        let samples = self.overrides.samples.or(self.file.samples).unwrap_or(DEFAULT_SAMPLES);
        let seed = self.overrides.seed.or(self.file.seed).unwrap_or(DEFAULT_SEED);
        let bounds = match &self.file.sample_box {
            None => vec![(-1.0, 1.0); ctx.len()],
            Some(map) => {
                if let Some(extra) = map.keys().find(|k| ctx.index_of(k).is_none()) {
                    return Err(self.invalid("box", format!("unknown variable `{extra}`")));
                }
                ctx.names()
                    .iter()
                    .map(|n| map.get(n).map(|[lo, hi]| (*lo, *hi)).ok_or_else(|| self.invalid("box", format!("no interval for `{n}`"))))
                    .collect::<Result<_, _>>()?
            }
        };
        SampleBox::new(bounds, samples, seed).map_err(|e| self.invalid("box", e))
    }

    pub fn policy(&self, ctx: &Context) -> Result<TolerancePolicy, CliError> {
        let file = self.file.tolerances.as_ref();
        let abs = self.overrides.tol_abs.or(file.and_then(|t| t.abs)).unwrap_or(1e-9);
        let rel = self.overrides.tol_rel.or(file.and_then(|t| t.rel)).unwrap_or(1e-9);
        if !(abs > 0.0 && abs.is_finite()) {
            return Err(self.invalid("tolerances.abs", format!("must be positive, got {abs}")));
        }
        if !(rel >= 0.0 && rel.is_finite()) {
            return Err(self.invalid("tolerances.rel", format!("must be non-negative, got {rel}")));
        }
        let mut pol = TolerancePolicy::new(abs, rel);
        if let Some(text) = &self.file.exclusion {
            let min = self.file.exclusion_min.unwrap_or(DEFAULT_EXCLUSION_MIN);
            pol = pol.excluding(self.expr(text, ctx, "exclusion")?, min);
        }
        Ok(pol)
    }

    pub fn curves(&self, ambient: usize, needed: usize) -> Result<Vec<ClosedCurve>, CliError> {
        if self.file.curves.len() < needed {
            return Err(self.invalid("curves", format!("need {needed}, found {}", self.file.curves.len())));
        }
        self.file.curves[..needed]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let field = format!("curves[{i}]");
                if c.components.len() != ambient {
                    return Err(self.invalid(&field, format!("{} components for {ambient} ambient variables", c.components.len())));
                }
                let param = Context::new([c.parameter.clone()]);
                let period = match &c.period {
                    None => 2.0 * PI,
                    Some(Period::Number(p)) => *p,
                    Some(Period::Text(s)) => parse_expr(s, &Context::new(Vec::<String>::new()))
                        .map_err(|e| self.invalid(&format!("{field}.period"), e))?
                        .eval(&[])
                        .map_err(|e| self.invalid(&format!("{field}.period"), e))?,
                };
                let comps = c
                    .components
                    .iter()
                    .enumerate()
                    .map(|(k, s)| self.expr(s, &param, &format!("{field}.components[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                ClosedCurve::new(&c.parameter, period, comps).map_err(|e| self.invalid(&field, e))
            })
            .collect()
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let q = self.file.quadrature.as_ref();
        let mut spec = QuadratureSpec::default();
        if let Some(rule) = q.and_then(|q| q.rule.as_deref()) {
            spec.rule = match rule {
                "simpson" => Rule::Simpson,
                "trapezoid" => Rule::Trapezoid,
                other => return Err(self.invalid("quadrature.rule", format!("unknown rule `{other}`"))),
            };
        }
        if let Some(p) = self.overrides.panels.or(q.and_then(|q| q.panels)) {
            spec.panels = p;
        }
        if let Some(r) = self.overrides.refine.or(q.and_then(|q| q.refinements)) {
            spec.refinements = r;
        }
        if let Some(t) = q.and_then(|q| q.tol) {
            spec.tol = t;
        }
        spec.validate().map_err(|e| self.invalid("quadrature", e))?;
        Ok(spec)
    }

    pub fn signature(&self, dim: usize) -> Result<SignatureSpec, CliError> {
        match &self.file.signature {
            None => Ok(SignatureSpec::euclidean(dim)),
            Some(s) => {
                if s.signs.len() != dim {
                    return Err(self.invalid("signature.signs", format!("expected {dim} signs, got {}", s.signs.len())));
                }
                SignatureSpec::new(s.signs.clone(), s.p).map_err(|e| self.invalid("signature", e))
            }
        }
    }

    pub fn e_over_c(&self) -> f64 {
        self.file.constants.as_ref().and_then(|c| c.e_over_c).unwrap_or(1.0)
    }

    pub fn physics(&self) -> Result<(Context, Physics), CliError> {
        let ctx = self.spacetime()?;
        let block = self.file.physics.as_ref().ok_or_else(|| self.invalid("physics", "missing"))?;
        let vec3 = |v: &[String; 3], field: &str| -> Result<Vec3, CliError> {
            let [a, b, c] = v;
            Ok(Vec3::new([
                self.unspanned(a, &ctx, &format!("{field}[0]"))?,
                self.unspanned(b, &ctx, &format!("{field}[1]"))?,
                self.unspanned(c, &ctx, &format!("{field}[2]"))?,
            ]))
        };
        let opt = |s: &Option<String>, field: &str| s.as_ref().map(|s| self.unspanned(s, &ctx, field)).transpose();
        let physics = match block {
            PhysicsInput::Fluid { v, psi, nu, theta } => {
                let psi = opt(psi, "physics.psi")?.unwrap_or_else(ScalarExpr::zero);
                let state = FluidState::new(&ctx, vec3(v, "physics.v")?, psi, *nu).map_err(|e| self.invalid("physics", e))?;
                Physics::Fluid { state, theta: opt(theta, "physics.theta")? }
            }
            PhysicsInput::Em { a, phi, velocity } => {
                let phi = opt(phi, "physics.phi")?.unwrap_or_else(ScalarExpr::zero);
                let potentials = EMPotentials::new(&ctx, vec3(a, "physics.a")?, phi).map_err(|e| self.invalid("physics", e))?;
                let velocity = velocity.as_ref().map(|v| vec3(v, "physics.velocity")).transpose()?;
                Physics::Em { potentials, velocity }
            }
        };
        Ok((ctx, physics))
    }
}
