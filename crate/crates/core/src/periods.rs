//! Period integrals over closed parametric chains and the closed currents
//! built from signed Hölder norms.

use std::f64::consts::PI;

use thiserror::Error;

use crate::expr::{Context, EvalError, Exponent, ScalarExpr};
use crate::forms::{DifferentialForm, FormError, SmoothMap, VectorField};
use crate::parse::{parse_expr, ParseError};
use crate::quadrature::{periodic_nodes, refine, QuadratureError, QuadratureResult, QuadratureSpec};

/// Largest allowed gap between a curve's endpoints.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Smallest allowed distance between two curves on the node grid.
pub const MIN_SEPARATION: f64 = 1e-6;
/// Smallest allowed `|λ|` in the braid integrand.
pub const MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeriodError {
    #[error("curve does not close: endpoints differ by {gap:e}")]
    NotClosed { gap: f64 },
    #[error("period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("curve expressions may only use the parameter")]
    ForeignVariable,
    #[error("cannot evaluate curve at parameter {parameter}: {source}")]
    CurveEval { parameter: f64, source: EvalError },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integrand is singular at parameter {parameters:?}")]
    Singularity { parameters: Vec<f64> },
    #[error("curves come within {min_distance:e} of each other (parameters {parameters:?})")]
    NearSingularity { min_distance: f64, parameters: Vec<f64> },
    #[error("invalid signature: {0}")]
    BadSignature(String),
    #[error("the norm function λ is identically zero")]
    LambdaIdenticallyZero,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A closed curve `t ↦ (c_1(t), …, c_n(t))`, `t ∈ [0, L]`.
#[derive(Debug, Clone)]
pub struct ClosedCurve {
    param: Context,
    period: f64,
    components: Vec<ScalarExpr>,
    derivatives: Vec<ScalarExpr>,
}

impl ClosedCurve {
    /// Components are expressions in the single variable `param`; velocities
    /// are obtained symbolically.
    pub fn new(param: &str, period: f64, components: Vec<ScalarExpr>) -> Result<Self, PeriodError> {
        let derivatives = components.iter().map(|c| c.partial(0)).collect();
        ClosedCurve::with_derivatives(param, period, components, derivatives)
    }

    pub fn with_derivatives(
        param: &str,
        period: f64,
        components: Vec<ScalarExpr>,
        derivatives: Vec<ScalarExpr>,
    ) -> Result<Self, PeriodError> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(PeriodError::BadPeriod(period));
        }
        if derivatives.len() != components.len() {
            return Err(PeriodError::DimensionMismatch { expected: components.len(), got: derivatives.len() });
        }
        if components.iter().chain(&derivatives).any(|c| c.max_var().is_some_and(|v| v > 0)) {
            return Err(PeriodError::ForeignVariable);
        }
        let curve = ClosedCurve { param: Context::new([param]), period, components, derivatives };
        let start = curve.point(0.0)?;
        let end = curve.point(period)?;
        let gap = start.iter().zip(&end).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if !(gap <= CLOSURE_TOL) {
            return Err(PeriodError::NotClosed { gap });
        }
        Ok(curve)
    }

    /// Parses component texts over the parameter name.
    pub fn parse(param: &str, period: f64, components: &[&str]) -> Result<Self, PeriodError> {
        let ctx = Context::new([param]);
        let exprs = components.iter().map(|s| parse_expr(s, &ctx)).collect::<Result<Vec<_>, _>>()?;
        ClosedCurve::new(param, period, exprs)
    }

    pub fn param(&self) -> &str {
        self.param.name(0)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn derivatives(&self) -> &[ScalarExpr] {
        &self.derivatives
    }

    fn eval_all(exprs: &[ScalarExpr], t: f64) -> Result<Vec<f64>, PeriodError> {
        exprs
            .iter()
            .map(|c| c.eval(&[t]).map_err(|source| PeriodError::CurveEval { parameter: t, source }))
            .collect()
    }

    pub fn point(&self, t: f64) -> Result<Vec<f64>, PeriodError> {
        Self::eval_all(&self.components, t)
    }

    pub fn velocity(&self, t: f64) -> Result<Vec<f64>, PeriodError> {
        Self::eval_all(&self.derivatives, t)
    }

    /// Same trace traversed backwards.
    pub fn reversed(&self) -> Self {
        let s = ScalarExpr::constant(self.period) - ScalarExpr::var(0);
        self.reparameterized(&s).expect("reversal keeps the curve closed")
    }

    /// `t ↦ c(g(t))` for a map `g` of `[0, L]` onto itself (or onto a shifted
    /// period).
    pub fn reparameterized(&self, g: &ScalarExpr) -> Result<Self, PeriodError> {
        let comps = self.components.iter().map(|c| c.substitute(std::slice::from_ref(g))).collect();
        ClosedCurve::new(self.param(), self.period, comps)
    }

    /// `R c(t) + shift` for a 3×3 matrix `R` (rows) on a curve in three
    /// variables.
    pub fn transformed(&self, rotation: [[f64; 3]; 3], shift: [f64; 3]) -> Result<Self, PeriodError> {
        if self.dim() != 3 {
            return Err(PeriodError::DimensionMismatch { expected: 3, got: self.dim() });
        }
        let comps = (0..3)
            .map(|i| {
                let mut acc = ScalarExpr::constant(shift[i]);
                for j in 0..3 {
                    acc = acc + ScalarExpr::constant(rotation[i][j]) * self.components[j].clone();
                }
                acc
            })
            .collect();
        ClosedCurve::new(self.param(), self.period, comps)
    }

    /// Points and velocities at the nodes of one quadrature level.
    fn sample(&self, spec: &QuadratureSpec, panels: usize) -> Result<Vec<Node1>, PeriodError> {
        periodic_nodes(spec.rule, panels, self.period)
            .into_iter()
            .map(|(t, w)| Ok(Node1 { t, w, x: self.point(t)?, v: self.velocity(t)? }))
            .collect()
    }
}

struct Node1 {
    t: f64,
    w: f64,
    x: Vec<f64>,
    v: Vec<f64>,
}

/// Signs and exponent of `λ = (Σ s_i |u_i|^p)^{n/p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSpec {
    signs: Vec<f64>,
    p: f64,
}

impl SignatureSpec {
    pub fn new(signs: Vec<f64>, p: f64) -> Result<Self, PeriodError> {
        if signs.iter().any(|s| *s != 1.0 && *s != -1.0) {
            return Err(PeriodError::BadSignature("signs must be +1 or -1".into()));
        }
        if !signs.iter().any(|s| *s > 0.0) {
            return Err(PeriodError::BadSignature("at least one sign must be positive".into()));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(PeriodError::BadSignature(format!("exponent must be at least 1, got {p}")));
        }
        Ok(SignatureSpec { signs, p })
    }

    /// All signs positive, `p = 2`.
    pub fn euclidean(n: usize) -> Self {
        SignatureSpec { signs: vec![1.0; n], p: 2.0 }
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn check_len(&self, n: usize) -> Result<(), PeriodError> {
        if self.signs.len() == n {
            Ok(())
        } else {
            Err(PeriodError::DimensionMismatch { expected: n, got: self.signs.len() })
        }
    }

    fn even_integer_p(&self) -> Option<i32> {
        (self.p.fract() == 0.0 && self.p % 2.0 == 0.0 && self.p <= 64.0).then_some(self.p as i32)
    }

    /// `Σ s_i |u_i|^p`.
    pub fn base(&self, u: &[f64]) -> f64 {
        self.signs.iter().zip(u).map(|(s, x)| s * x.abs().powf(self.p)).sum()
    }

    /// `(Σ s_i |u_i|^p)^{n/p}`; NaN where the base is negative and the power
    /// is fractional.
    pub fn lambda(&self, u: &[f64], n: f64) -> f64 {
        let power = n / self.p;
        let b = self.base(u);
        if power.fract() == 0.0 {
            b.powi(power as i32)
        } else {
            b.powf(power)
        }
    }

    /// Symbolic `Σ s_i |u_i|^p`, with `|u|^p` written as `u^p` for even
    /// integer `p`.
    pub fn base_expr(&self, u: &[ScalarExpr]) -> ScalarExpr {
        let mut acc = ScalarExpr::zero();
        for (s, x) in self.signs.iter().zip(u) {
            let term = match self.even_integer_p() {
                Some(k) => x.powi(k),
                None => x.powi(2).powf(self.p / 2.0),
            };
            acc = if *s > 0.0 { acc + term } else { acc - term };
        }
        acc
    }

    pub fn lambda_expr(&self, u: &[ScalarExpr], n: f64) -> ScalarExpr {
        ScalarExpr::pow(self.base_expr(u), Exponent::from_f64(n / self.p))
    }
}

/// `Γ = ∮ A` over one period of `c`.
pub fn circulate(a: &DifferentialForm, c: &ClosedCurve, q: &QuadratureSpec) -> Result<QuadratureResult, PeriodError> {
    if a.degree() != 1 {
        return Err(FormError::WrongDegree { expected: 1, got: a.degree() }.into());
    }
    if a.dim() != c.dim() {
        return Err(PeriodError::DimensionMismatch { expected: a.dim(), got: c.dim() });
    }
    let coeffs: Vec<ScalarExpr> = (0..a.dim()).map(|i| a.coefficient(&[i])).collect();
    refine(q, |panels| {
        let mut sum = 0.0;
        for node in c.sample(q, panels)? {
            let mut g = 0.0;
            for (coef, v) in coeffs.iter().zip(&node.v) {
                if *v != 0.0 || !coef.is_literal_zero() {
                    g += coef.eval(&node.x).unwrap_or(f64::NAN) * v;
                }
            }
            if !g.is_finite() {
                return Err(PeriodError::Singularity { parameters: vec![node.t] });
            }
            sum += node.w * g;
        }
        Ok(sum)
    })
}

/// `(Φ dΨ − Ψ dΦ) / (s_1 |Φ|^p + s_2 |Ψ|^p)^{2/p}`.
pub fn clebsch_form(ctx: &Context, phi: &ScalarExpr, psi: &ScalarExpr, sig: &SignatureSpec) -> Result<DifferentialForm, PeriodError> {
    sig.check_len(2)?;
    let d_phi = DifferentialForm::scalar(ctx, phi.clone())?.ext_d();
    let d_psi = DifferentialForm::scalar(ctx, psi.clone())?.ext_d();
    let numerator = d_psi.scale(phi).sub(&d_phi.scale(psi))?;
    let lambda = sig.lambda_expr(&[phi.clone(), psi.clone()], 2.0);
    if sig.base_expr(&[phi.clone(), psi.clone()]).is_literal_zero() || lambda.is_literal_zero() {
        return Err(PeriodError::LambdaIdenticallyZero);
    }
    Ok(numerator.map_coefficients(|c| c.clone() / lambda.clone()))
}

pub fn clebsch_circulation(
    ctx: &Context,
    phi: &ScalarExpr,
    psi: &ScalarExpr,
    sig: &SignatureSpec,
    c: &ClosedCurve,
    q: &QuadratureSpec,
) -> Result<QuadratureResult, PeriodError> {
    circulate(&clebsch_form(ctx, phi, psi, sig)?, c, q)
}

/// Normalized Gauss double integral
/// `(1/4π) ∮∮ z·(V₁×V₂) / λ(z) dt dt'` with `z = R₂ − R₁`.
pub fn gauss_linking(c1: &ClosedCurve, c2: &ClosedCurve, sig: &SignatureSpec, q: &QuadratureSpec) -> Result<QuadratureResult, PeriodError> {
    for c in [c1, c2] {
        if c.dim() != 3 {
            return Err(PeriodError::DimensionMismatch { expected: 3, got: c.dim() });
        }
    }
    sig.check_len(3)?;
    refine(q, |panels| {
        let n1 = c1.sample(q, panels)?;
        let n2 = c2.sample(q, panels)?;
        let mut closest = (f64::INFINITY, 0.0, 0.0);
        let mut total = 0.0;
        for a in &n1 {
            let mut row = 0.0;
            for b in &n2 {
                let z = [b.x[0] - a.x[0], b.x[1] - a.x[1], b.x[2] - a.x[2]];
                let dist = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
                if dist < closest.0 {
                    closest = (dist, a.t, b.t);
                }
                let cross = cross3(&a.v, &b.v);
                let g = (z[0] * cross[0] + z[1] * cross[1] + z[2] * cross[2]) / sig.lambda(&z, 3.0);
                if !g.is_finite() {
                    return Err(PeriodError::Singularity { parameters: vec![a.t, b.t] });
                }
                row += b.w * g;
            }
            total += a.w * row;
        }
        if closest.0 <= MIN_SEPARATION {
            return Err(PeriodError::NearSingularity { min_distance: closest.0, parameters: vec![closest.1, closest.2] });
        }
        Ok(total / (4.0 * PI))
    })
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn det3(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let x = cross3(b, c);
    a[0] * x[0] + a[1] * x[1] + a[2] * x[2]
}

/// A 3-chain `P(t, t', t'')` in momentum space, periodic in each parameter.
#[derive(Debug, Clone)]
pub struct Chain3 {
    kind: ChainKind,
}

#[derive(Debug, Clone)]
enum ChainKind {
    /// `P = p₁(t) + p₂(t') + p₃(t'')`.
    Loops([ClosedCurve; 3]),
    General { periods: [f64; 3], components: [ScalarExpr; 3], jacobian: [[ScalarExpr; 3]; 3] },
}

impl Chain3 {
    pub fn from_loops(p1: &ClosedCurve, p2: &ClosedCurve, p3: &ClosedCurve) -> Result<Self, PeriodError> {
        for c in [p1, p2, p3] {
            if c.dim() != 3 {
                return Err(PeriodError::DimensionMismatch { expected: 3, got: c.dim() });
            }
        }
        Ok(Chain3 { kind: ChainKind::Loops([p1.clone(), p2.clone(), p3.clone()]) })
    }

    /// Components over the three parameters (variables 0, 1, 2); each must be
    /// periodic in each parameter.
    pub fn general(periods: [f64; 3], components: [ScalarExpr; 3]) -> Result<Self, PeriodError> {
        for p in periods {
            if !(p > 0.0 && p.is_finite()) {
                return Err(PeriodError::BadPeriod(p));
            }
        }
        if components.iter().any(|c| c.max_var().is_some_and(|v| v > 2)) {
            return Err(PeriodError::ForeignVariable);
        }
        let probe = [0.31, 0.57, 0.83];
        for k in 0..3 {
            let mut shifted = probe;
            shifted[k] += periods[k];
            for c in &components {
                let (a, b) = (c.eval(&probe), c.eval(&shifted));
                let gap = match (a, b) {
                    (Ok(a), Ok(b)) => (a - b).abs(),
                    _ => f64::INFINITY,
                };
                if !(gap <= CLOSURE_TOL) {
                    return Err(PeriodError::NotClosed { gap });
                }
            }
        }
        let jacobian = [0, 1, 2].map(|j| [0, 1, 2].map(|i| components[i].partial(j)));
        Ok(Chain3 { kind: ChainKind::General { periods, components, jacobian } })
    }

    pub fn periods(&self) -> [f64; 3] {
        match &self.kind {
            ChainKind::Loops(c) => [c[0].period(), c[1].period(), c[2].period()],
            ChainKind::General { periods, .. } => *periods,
        }
    }
}

/// `∮∮∮ (E/c) det[∂P/∂t, ∂P/∂t', ∂P/∂t''] / λ` with
/// `λ = (s₁|P_x|^p + s₂|P_y|^p + s₃|P_z|^p + s₄|E/c|^p)^{4/p}`.
/// For loops the determinant is `f₁·(f₂×f₃)` with `f_i = dp_i/dt_i`.
pub fn braid_integral(chain: &Chain3, e_over_c: f64, sig: &SignatureSpec, q: &QuadratureSpec) -> Result<QuadratureResult, PeriodError> {
    sig.check_len(4)?;
    let periods = chain.periods();
    let integrand = |p: [f64; 3], det: f64, params: [f64; 3]| -> Result<f64, PeriodError> {
        let lambda = sig.lambda(&[p[0], p[1], p[2], e_over_c], 4.0);
        let g = e_over_c * det / lambda;
        if lambda.abs() > MIN_DENOMINATOR && g.is_finite() {
            Ok(g)
        } else {
            Err(PeriodError::Singularity { parameters: params.to_vec() })
        }
    };
    refine(q, |panels| match &chain.kind {
        ChainKind::Loops(loops) => {
            let [a, b, c] = [0, 1, 2].map(|i| loops[i].sample(q, panels));
            let (a, b, c) = (a?, b?, c?);
            let mut total = 0.0;
            for na in &a {
                let mut plane = 0.0;
                for nb in &b {
                    let mut row = 0.0;
                    for nc in &c {
                        let p = [na.x[0] + nb.x[0] + nc.x[0], na.x[1] + nb.x[1] + nc.x[1], na.x[2] + nb.x[2] + nc.x[2]];
                        let det = det3(&na.v, &nb.v, &nc.v);
                        row += nc.w * integrand(p, det, [na.t, nb.t, nc.t])?;
                    }
                    plane += nb.w * row;
                }
                total += na.w * plane;
            }
            Ok(total)
        }
        ChainKind::General { components, jacobian, .. } => {
            let nodes = periods.map(|l| periodic_nodes(q.rule, panels, l));
            let eval = |e: &ScalarExpr, x: &[f64]| e.eval(x).unwrap_or(f64::NAN);
            let mut total = 0.0;
            for &(t0, w0) in &nodes[0] {
                let mut plane = 0.0;
                for &(t1, w1) in &nodes[1] {
                    let mut row = 0.0;
                    for &(t2, w2) in &nodes[2] {
                        let x = [t0, t1, t2];
                        let p = components.each_ref().map(|c| eval(c, &x));
                        let cols = jacobian.each_ref().map(|col| col.each_ref().map(|e| eval(e, &x)));
                        let det = det3(&cols[0], &cols[1], &cols[2]);
                        row += w2 * integrand(p, det, x)?;
                    }
                    plane += w1 * row;
                }
                total += w0 * plane;
            }
            Ok(total)
        }
    })
}

/// Cofactor matrix transposed: `adj(M) M = det(M) I`.
fn adjugate(m: &[Vec<ScalarExpr>]) -> Vec<Vec<ScalarExpr>> {
    let n = m.len();
    let mut adj = vec![vec![ScalarExpr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<ScalarExpr>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let d = determinant(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}

fn determinant(m: &[Vec<ScalarExpr>]) -> ScalarExpr {
    let n = m.len();
    if n == 0 {
        return ScalarExpr::one();
    }
    let mut acc = ScalarExpr::zero();
    for j in 0..n {
        if m[0][j].is_literal_zero() {
            continue;
        }
        let minor: Vec<Vec<ScalarExpr>> = (1..n).map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect()).collect();
        let term = m[0][j].clone() * determinant(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn holder_lambda(v: &VectorField, sig: &SignatureSpec) -> Result<ScalarExpr, PeriodError> {
    let n = v.context().len();
    sig.check_len(n)?;
    let lambda = sig.lambda_expr(v.components(), n as f64);
    if sig.base_expr(v.components()).is_literal_zero() || lambda.is_literal_zero() {
        return Err(PeriodError::LambdaIdenticallyZero);
    }
    Ok(lambda)
}

/// `J = i(U)(dU¹∧…∧dUⁿ)/λ(U)` built in the `U` coordinates and pulled back
/// to the base through `U = V(x)`.
pub fn holder_current(v: &VectorField, sig: &SignatureSpec) -> Result<DifferentialForm, PeriodError> {
    let n = v.context().len();
    holder_lambda(v, sig)?;
    let target = Context::new((1..=n).map(|i| format!("u{i}")));
    let u: Vec<ScalarExpr> = (0..n).map(ScalarExpr::var).collect();
    let lambda_u = sig.lambda_expr(&u, n as f64);
    let radial = VectorField::new(&target, u.iter().map(|c| c.clone() / lambda_u.clone()).collect())?;
    let volume = DifferentialForm::basis(&target, &(0..n).collect::<Vec<_>>())?;
    let j_u = volume.interior(&radial)?;
    let map = SmoothMap::new(v.context(), &target, v.components().to_vec())?;
    Ok(j_u.pullback(&map)?)
}

/// `W = adj(∂V/∂x) V / λ(V)`; `i(W)(dx¹∧…∧dxⁿ)` equals [`holder_current`].
pub fn cofactor_adjoint_current(v: &VectorField, sig: &SignatureSpec) -> Result<VectorField, PeriodError> {
    let n = v.context().len();
    let lambda = holder_lambda(v, sig)?;
    let jac: Vec<Vec<ScalarExpr>> = v.components().iter().map(|c| (0..n).map(|j| c.partial(j)).collect()).collect();
    let adj = adjugate(&jac);
    let comps = adj
        .iter()
        .map(|row| {
            let s = row.iter().zip(v.components()).fold(ScalarExpr::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            s / lambda.clone()
        })
        .collect();
    Ok(VectorField::new(v.context(), comps)?)
}
