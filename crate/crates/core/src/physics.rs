//! Electromagnetic and hydrodynamic fixtures on (x, y, z, t).
//!
//! Variables are addressed by position: indices 0, 1, 2 are spatial and 3 is
//! time. A 1-form `A = A·dr − φ dt` is split into its vector and scalar parts
//! and the familiar vector identities are built on top of the form kernel.

use std::ops;

use thiserror::Error;

use crate::expr::{Context, ScalarExpr};
use crate::forms::{form_is_zero, DifferentialForm, FormError, VectorField};
use crate::sampling::{SampleBox, SampleError, TolerancePolicy, ZeroVerdict};

const T: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("expected a context of four variables (x, y, z, t), got {0}")]
    NotSpaceTime(usize),
    #[error("viscosity must be finite and non-negative, got {0}")]
    NegativeViscosity(f64),
    #[error("expected a {expected}-form, got degree {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("form and vector field live on different variable lists")]
    ContextMismatch,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

fn require_spacetime(ctx: &Context) -> Result<(), PhysicsError> {
    if ctx.len() == 4 {
        Ok(())
    } else {
        Err(PhysicsError::NotSpaceTime(ctx.len()))
    }
}

/// Spatial 3-vector of scalar fields over (x, y, z, t).
#[derive(Debug, Clone, PartialEq)]
pub struct Vec3([ScalarExpr; 3]);

impl Vec3 {
    pub fn new(components: [ScalarExpr; 3]) -> Self {
        Vec3(components)
    }

    pub fn zero() -> Self {
        Vec3([ScalarExpr::zero(), ScalarExpr::zero(), ScalarExpr::zero()])
    }

    pub fn constant(values: [f64; 3]) -> Self {
        Vec3(values.map(ScalarExpr::constant))
    }

    pub fn components(&self) -> &[ScalarExpr; 3] {
        &self.0
    }

    pub fn x(&self) -> &ScalarExpr {
        &self.0[0]
    }

    pub fn y(&self) -> &ScalarExpr {
        &self.0[1]
    }

    pub fn z(&self) -> &ScalarExpr {
        &self.0[2]
    }

    pub fn grad(f: &ScalarExpr) -> Self {
        Vec3([f.partial(0), f.partial(1), f.partial(2)])
    }

    pub fn curl(&self) -> Self {
        let [a, b, c] = &self.0;
        Vec3([
            c.partial(1) - b.partial(2),
            a.partial(2) - c.partial(0),
            b.partial(0) - a.partial(1),
        ])
    }

    pub fn div(&self) -> ScalarExpr {
        self.0[0].partial(0) + self.0[1].partial(1) + self.0[2].partial(2)
    }

    /// Time derivative, component-wise.
    pub fn dt(&self) -> Self {
        self.map(|c| c.partial(T))
    }

    /// `grad(div v) − curl curl v`.
    pub fn laplacian(&self) -> Self {
        Vec3::grad(&self.div()) - self.curl().curl()
    }

    pub fn dot(&self, other: &Vec3) -> ScalarExpr {
        self.0[0].clone() * other.0[0].clone()
            + self.0[1].clone() * other.0[1].clone()
            + self.0[2].clone() * other.0[2].clone()
    }

    pub fn cross(&self, other: &Vec3) -> Self {
        let [a1, a2, a3] = &self.0;
        let [b1, b2, b3] = &other.0;
        Vec3([
            a2.clone() * b3.clone() - a3.clone() * b2.clone(),
            a3.clone() * b1.clone() - a1.clone() * b3.clone(),
            a1.clone() * b2.clone() - a2.clone() * b1.clone(),
        ])
    }

    pub fn scale(&self, f: &ScalarExpr) -> Self {
        self.map(|c| f.clone() * c.clone())
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        Vec3([f(&self.0[0]), f(&self.0[1]), f(&self.0[2])])
    }

    pub fn eval(&self, point: &[f64]) -> Result<[f64; 3], crate::expr::EvalError> {
        Ok([self.0[0].eval(point)?, self.0[1].eval(point)?, self.0[2].eval(point)?])
    }

    /// Largest absolute component value over `points`; failed evaluations count
    /// as infinite.
    pub fn max_abs_on(&self, points: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for p in points {
            for c in &self.0 {
                worst = worst.max(c.eval(p).map_or(f64::INFINITY, f64::abs));
            }
        }
        worst
    }
}

impl ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [d, e, f] = rhs.0;
        Vec3([a + d, b + e, c + f])
    }
}

impl ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [d, e, f] = rhs.0;
        Vec3([a - d, b - e, c - f])
    }
}

impl ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        let [a, b, c] = self.0;
        Vec3([-a, -b, -c])
    }
}

/// `v_x dy∧dz − v_y dx∧dz + v_z dx∧dy`.
fn flux_two_form(ctx: &Context, v: &Vec3) -> DifferentialForm {
    let [a, b, c] = v.0.clone();
    DifferentialForm::from_terms(ctx, 2, [(vec![1, 2], a), (vec![0, 2], -b), (vec![0, 1], c)]).expect("flux 2-form")
}

/// `v·dr∧dt`.
fn line_time_form(ctx: &Context, v: &Vec3) -> DifferentialForm {
    DifferentialForm::from_terms(ctx, 2, (0..3).map(|i| (vec![i, T], v.0[i].clone()))).expect("line-time 2-form")
}

#[derive(Debug, Clone)]
pub struct EMPotentials {
    ctx: Context,
    pub a: Vec3,
    pub phi: ScalarExpr,
}

impl EMPotentials {
    pub fn new(ctx: &Context, a: Vec3, phi: ScalarExpr) -> Result<Self, PhysicsError> {
        require_spacetime(ctx)?;
        Ok(EMPotentials { ctx: ctx.clone(), a, phi })
    }

    /// Splits `A = A·dr − φ dt`.
    pub fn from_one_form(form: &DifferentialForm) -> Result<Self, PhysicsError> {
        require_spacetime(form.context())?;
        if form.degree() != 1 {
            return Err(PhysicsError::WrongDegree { expected: 1, found: form.degree() });
        }
        let a = Vec3([form.coefficient(&[0]), form.coefficient(&[1]), form.coefficient(&[2])]);
        Ok(EMPotentials { ctx: form.context().clone(), a, phi: -form.coefficient(&[T]) })
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn one_form(&self) -> DifferentialForm {
        let mut terms: Vec<(Vec<usize>, ScalarExpr)> = (0..3).map(|i| (vec![i], self.a.0[i].clone())).collect();
        terms.push((vec![T], -self.phi.clone()));
        DifferentialForm::from_terms(&self.ctx, 1, terms).expect("potential 1-form")
    }
}

#[derive(Debug, Clone)]
pub struct Fields {
    pub e: Vec3,
    pub b: Vec3,
}

/// `E = −∂A/∂t − grad φ`, `B = curl A`.
pub fn em_fields(p: &EMPotentials) -> Fields {
    Fields { e: -p.a.dt() - Vec3::grad(&p.phi), b: p.a.curl() }
}

/// Reads `E` and `B` off a 2-form `F = B·dS + E·dr∧dt`.
pub fn fields_from_two_form(f: &DifferentialForm) -> Result<Fields, PhysicsError> {
    require_spacetime(f.context())?;
    if f.degree() != 2 {
        return Err(PhysicsError::WrongDegree { expected: 2, found: f.degree() });
    }
    Ok(Fields {
        e: Vec3([f.coefficient(&[0, T]), f.coefficient(&[1, T]), f.coefficient(&[2, T])]),
        b: Vec3([f.coefficient(&[1, 2]), -f.coefficient(&[0, 2]), f.coefficient(&[0, 1])]),
    })
}

/// `(curl E + ∂B/∂t, div B)`.
pub fn faraday_residual(fields: &Fields) -> (Vec3, ScalarExpr) {
    (fields.e.curl() + fields.b.dt(), fields.b.div())
}

pub fn maxwell_faraday_residual(p: &EMPotentials) -> (Vec3, ScalarExpr) {
    faraday_residual(&em_fields(p))
}

/// `G = D·dS − (H·dr)∧dt`.
pub fn excitation_form(ctx: &Context, d: &Vec3, h: &Vec3) -> Result<DifferentialForm, PhysicsError> {
    require_spacetime(ctx)?;
    Ok(flux_two_form(ctx, d).sub(&line_time_form(ctx, h))?)
}

#[derive(Debug, Clone)]
pub struct ChargeCurrent {
    /// `J = dG`.
    pub form: DifferentialForm,
    pub rho: ScalarExpr,
    pub j: Vec3,
}

/// `J = dG = ρ dx∧dy∧dz − J·dS∧dt` with components read back off the 3-form.
pub fn charge_current(g: &DifferentialForm) -> Result<ChargeCurrent, PhysicsError> {
    require_spacetime(g.context())?;
    if g.degree() != 2 {
        return Err(PhysicsError::WrongDegree { expected: 2, found: g.degree() });
    }
    let form = g.ext_d();
    let rho = form.coefficient(&[0, 1, 2]);
    let j = Vec3([-form.coefficient(&[1, 2, T]), form.coefficient(&[0, 2, T]), -form.coefficient(&[0, 1, T])]);
    Ok(ChargeCurrent { form, rho, j })
}

/// `div(ρV) + ∂ρ/∂t`, read off `dC` with `C = i(ρV, ρ)(dx∧dy∧dz∧dt)`.
pub fn continuity_anomaly(ctx: &Context, rho: &ScalarExpr, v: &Vec3) -> Result<ScalarExpr, PhysicsError> {
    require_spacetime(ctx)?;
    let flow = VectorField::new(ctx, vec![v.0[0].clone(), v.0[1].clone(), v.0[2].clone(), ScalarExpr::one()])?
        .scale(rho);
    let volume = DifferentialForm::basis(ctx, &[0, 1, 2, T])?;
    let c = volume.interior(&flow)?;
    Ok(c.ext_d().coefficient(&[0, 1, 2, T]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessClass {
    /// `i(V)dA = 0`.
    Extremal,
    /// `i(V)dA = dΘ` for a supplied `Θ`.
    BernoulliCasimir,
    /// `i(V)dA` closed; exactness not decided.
    SymplecticClosed,
    /// `d i(V)dA ≠ 0`.
    NonUniform,
}

/// Classifies the flow of `v4` against the 2-form `dA`.
pub fn classify_process(
    v4: &VectorField,
    a: &DifferentialForm,
    bx: &SampleBox,
    pol: &TolerancePolicy,
    theta: Option<&ScalarExpr>,
) -> Result<ProcessClass, PhysicsError> {
    if a.degree() != 1 {
        return Err(PhysicsError::WrongDegree { expected: 1, found: a.degree() });
    }
    if v4.context() != a.context() {
        return Err(PhysicsError::ContextMismatch);
    }
    let w = a.ext_d().interior(v4)?;
    if form_is_zero(&w, bx, pol)?.is_zero() {
        return Ok(ProcessClass::Extremal);
    }
    if let Some(theta) = theta {
        let d_theta = DifferentialForm::scalar(a.context(), theta.clone())?.ext_d();
        if form_is_zero(&d_theta.sub(&w)?, bx, pol)?.is_zero() {
            return Ok(ProcessClass::BernoulliCasimir);
        }
    }
    if form_is_zero(&w.ext_d(), bx, pol)?.is_zero() {
        Ok(ProcessClass::SymplecticClosed)
    } else {
        Ok(ProcessClass::NonUniform)
    }
}

/// `r1 = curl(E + V×B)`, `r2 = ∂(E + V×B)/∂t + grad(E·V)`.
pub fn master_residuals(p: &EMPotentials, v: &Vec3) -> (Vec3, Vec3) {
    let Fields { e, b } = em_fields(p);
    let u = e.clone() + v.cross(&b);
    let r1 = u.curl();
    let r2 = u.dt() + Vec3::grad(&e.dot(v));
    (r1, r2)
}

#[derive(Debug, Clone)]
pub struct FluidState {
    ctx: Context,
    pub v: Vec3,
    pub psi: ScalarExpr,
    nu: f64,
}

impl FluidState {
    pub fn new(ctx: &Context, v: Vec3, psi: ScalarExpr, nu: f64) -> Result<Self, PhysicsError> {
        require_spacetime(ctx)?;
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(PhysicsError::NegativeViscosity(nu));
        }
        Ok(FluidState { ctx: ctx.clone(), v, psi, nu })
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn with_nu(&self, nu: f64) -> Result<Self, PhysicsError> {
        FluidState::new(&self.ctx, self.v.clone(), self.psi.clone(), nu)
    }

    pub fn vorticity(&self) -> Vec3 {
        self.v.curl()
    }

    /// `v·v/2 + Ψ`.
    pub fn head(&self) -> ScalarExpr {
        self.v.dot(&self.v) * ScalarExpr::constant(0.5) + self.psi.clone()
    }

    /// `A = v·dr − (v·v/2 + Ψ) dt`.
    pub fn action(&self) -> DifferentialForm {
        action_of(&self.ctx, &self.v, &self.head())
    }

    /// `(v, 1)`.
    pub fn flow(&self) -> VectorField {
        let [a, b, c] = self.v.0.clone();
        VectorField::new(&self.ctx, vec![a, b, c, ScalarExpr::one()]).expect("four components")
    }

    /// `ν curl curl v`.
    pub fn viscous_force(&self) -> Vec3 {
        self.v.curl().curl().scale(&ScalarExpr::constant(self.nu))
    }
}

fn action_of(ctx: &Context, v: &Vec3, head: &ScalarExpr) -> DifferentialForm {
    let mut terms: Vec<(Vec<usize>, ScalarExpr)> = (0..3).map(|i| (vec![i], v.0[i].clone())).collect();
    terms.push((vec![T], -head.clone()));
    DifferentialForm::from_terms(ctx, 1, terms).expect("action 1-form")
}

/// Spatial part of `i(v, 1) dA` for the ideal action; viscosity is ignored.
/// Equals `∂v/∂t + grad(v·v/2 + Ψ) − v×ω`.
pub fn euler_residual(f: &FluidState) -> Vec3 {
    let w = f.action().ext_d().interior(&f.flow()).expect("matching contexts");
    Vec3([w.coefficient(&[0]), w.coefficient(&[1]), w.coefficient(&[2])])
}

/// `curl(v×ω) − ∂ω/∂t`.
pub fn helmholtz_residual(f: &FluidState) -> Vec3 {
    let omega = f.vorticity();
    f.v.cross(&omega).curl() - omega.dt()
}

/// `−2ν (ω·curl ω)`, the `dx∧dy∧dz∧dt` coefficient of the parity 4-form.
pub fn ns_parity(f: &FluidState) -> ScalarExpr {
    let omega = f.vorticity();
    omega.dot(&omega.curl()) * ScalarExpr::constant(-2.0 * f.nu)
}

/// Action whose `i(v, 1) dA` has spatial part `ν curl curl v` on the slice
/// `t = t0`: the velocity is `v(x, t0) + (t − t0) a` with
/// `a = v×ω − grad(v·v/2 + Ψ) + ν curl curl v` evaluated at `t0`.
pub fn constrained_action(f: &FluidState, t0: f64) -> DifferentialForm {
    let at_t0 = |e: &ScalarExpr| {
        let mut values: Vec<ScalarExpr> = (0..4).map(ScalarExpr::var).collect();
        values[T] = ScalarExpr::constant(t0);
        e.substitute(&values)
    };
    let accel = f.v.cross(&f.vorticity()) - Vec3::grad(&f.head()) + f.viscous_force();
    let lag = ScalarExpr::var(T) - ScalarExpr::constant(t0);
    let v = f.v.map(at_t0) + accel.map(at_t0).scale(&lag);
    let psi = at_t0(&f.psi);
    let head = v.dot(&v) * ScalarExpr::constant(0.5) + psi;
    action_of(&f.ctx, &v, &head)
}

/// `dA` of the ν-constrained action, written without the auxiliary slice:
/// `ω·dS + E·dr∧dt` with `E = −(v×ω + ν curl curl v)`.
pub fn constrained_field(f: &FluidState) -> DifferentialForm {
    let omega = f.vorticity();
    let e = -(f.v.cross(&omega) + f.viscous_force());
    flux_two_form(&f.ctx, &omega).add(&line_time_form(&f.ctx, &e)).expect("same context")
}

#[derive(Debug, Clone)]
pub struct NsResidual {
    /// `∂v/∂t + grad(v·v/2 + Ψ) − v×ω − ν ∇²v`.
    pub residual: Vec3,
    /// `div v`, reported because the Laplacian is not reduced by it.
    pub divergence: ScalarExpr,
}

pub fn ns_residual(f: &FluidState) -> NsResidual {
    let euler = f.v.dt() + Vec3::grad(&f.head()) - f.v.cross(&f.vorticity());
    let viscous = f.v.laplacian().scale(&ScalarExpr::constant(f.nu));
    NsResidual { residual: euler - viscous, divergence: f.v.div() }
}

#[derive(Debug, Clone)]
pub struct HelicityDiagnostics {
    /// `v·ω`.
    pub h: ScalarExpr,
    /// `(v·ω) v − (v·v/2 − Ψ) ω`.
    pub t: Vec3,
    /// `div T + ∂h/∂t`.
    pub conservation_residual: ScalarExpr,
    /// Verdict on `dA∧dA` of the ν-constrained action.
    pub dh: ZeroVerdict,
}

/// Torsion current and helicity reduced on Euler flows, plus the sampled
/// verdict on the helicity 4-form.
pub fn helicity_diagnostics(f: &FluidState, bx: &SampleBox, pol: &TolerancePolicy) -> Result<HelicityDiagnostics, PhysicsError> {
    let omega = f.vorticity();
    let h = f.v.dot(&omega);
    let kinetic = f.v.dot(&f.v) * ScalarExpr::constant(0.5);
    let t = f.v.scale(&h) - omega.scale(&(kinetic - f.psi.clone()));
    let conservation_residual = t.div() + h.partial(T);
    let field = constrained_field(f);
    let dh = form_is_zero(&field.wedge(&field)?, bx, pol)?;
    Ok(HelicityDiagnostics { h, t, conservation_residual, dh })
}
