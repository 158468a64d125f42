//! Differential forms with symbolic coefficients.
//!
//! A p-form over a context of N variables is a sparse map from basis
//! monomials `dx^{i1} ∧ … ∧ dx^{ip}` (strictly increasing indices) to
//! coefficient expressions. Absent keys are zero. Coefficients are never
//! normalised, so two forms are compared semantically with
//! [`form_is_zero`], not with `==`.
//!
//! Pair and impair (density) forms share this representation; orientation
//! conventions are the caller's responsibility.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{sum, Context, ScalarExpr};
use crate::sampling::{all_zero, SampleBox, SampleError, TolerancePolicy, ZeroVerdict};

/// Maximum number of variables a form context may have.
pub const MAX_DIM: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("forms live over different variable lists: {left:?} vs {right:?}")]
    ContextMismatch { left: Context, right: Context },
    #[error("interior product of a 0-form")]
    InteriorOfScalar,
    #[error("degree {degree} exceeds the dimension {dim}")]
    DegreeTooLarge { degree: usize, dim: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("context has {0} variables; at most 32 are supported")]
    TooManyVariables(usize),
    #[error("expected a form of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
}

/// A basis monomial `dx^{i1} ∧ … ∧ dx^{ip}`, stored as a bit set of indices.
///
/// Ordering is lexicographic on the increasing index tuple, so `dx∧dy`
/// sorts before `dx∧dz` before `dy∧dz`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Basis(u32);

impl Basis {
    pub const EMPTY: Basis = Basis(0);

    pub fn from_indices(indices: &[usize]) -> Option<Basis> {
        let mut mask = 0u32;
        let mut last = None;
        for &i in indices {
            if i >= MAX_DIM || last.is_some_and(|l| l >= i) {
                return None;
            }
            mask |= 1 << i;
            last = Some(i);
        }
        Some(Basis(mask))
    }

    pub fn single(index: usize) -> Basis {
        Basis(1 << index)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut mask = self.0;
        std::iter::from_fn(move || {
            if mask == 0 {
                return None;
            }
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.indices().collect()
    }

    /// Sign and product of `self ∧ other`, or `None` if they share an index.
    pub fn wedge(self, other: Basis) -> Option<(f64, Basis)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Each index of `other` moves left past every larger index of `self`.
        let swaps: u32 = other
            .indices()
            .map(|j| (self.0 >> (j + 1)).count_ones())
            .sum();
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, Basis(self.0 | other.0)))
    }

    fn without(self, index: usize) -> Basis {
        Basis(self.0 & !(1 << index))
    }

    pub fn render(self, names: &[String]) -> String {
        if self.0 == 0 {
            return "1".to_string();
        }
        self.indices()
            .map(|i| format!("d{}", names[i]))
            .collect::<Vec<_>>()
            .join("∧")
    }
}

impl Ord for Basis {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(other.indices())
    }
}

impl PartialOrd for Basis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Basis{:?}", self.to_vec())
    }
}

#[derive(Clone)]
pub struct DifferentialForm {
    ctx: Context,
    degree: usize,
    coeffs: BTreeMap<Basis, ScalarExpr>,
    top_exceeded: bool,
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferentialForm({}; {})", self.degree, self)
    }
}

fn check_ctx(ctx: &Context) -> Result<(), FormError> {
    if ctx.len() > MAX_DIM {
        return Err(FormError::TooManyVariables(ctx.len()));
    }
    Ok(())
}

impl DifferentialForm {
    pub fn zero(ctx: &Context, degree: usize) -> Result<Self, FormError> {
        check_ctx(ctx)?;
        if degree > ctx.len() {
            return Err(FormError::DegreeTooLarge { degree, dim: ctx.len() });
        }
        Ok(DifferentialForm { ctx: ctx.clone(), degree, coeffs: BTreeMap::new(), top_exceeded: false })
    }

    /// The canonical zero standing in for a form of degree above N. It keeps
    /// its notional degree (at least N + 1) so contractions land correctly.
    pub fn beyond_top(ctx: &Context, degree: usize) -> Self {
        DifferentialForm {
            ctx: ctx.clone(),
            degree: degree.max(ctx.len() + 1),
            coeffs: BTreeMap::new(),
            top_exceeded: true,
        }
    }

    pub fn scalar(ctx: &Context, f: ScalarExpr) -> Result<Self, FormError> {
        let mut form = Self::zero(ctx, 0)?;
        form.coeffs.insert(Basis::EMPTY, f);
        Ok(form)
    }

    /// `Σ_i coeffs[i] dx^i`.
    pub fn one_form(ctx: &Context, coeffs: Vec<ScalarExpr>) -> Result<Self, FormError> {
        if coeffs.len() != ctx.len() {
            return Err(FormError::ComponentCount { expected: ctx.len(), got: coeffs.len() });
        }
        let mut form = Self::zero(ctx, 1)?;
        for (i, c) in coeffs.into_iter().enumerate() {
            form.insert(Basis::single(i), c);
        }
        Ok(form)
    }

    /// `dx^{i1} ∧ … ∧ dx^{ip}` for distinct indices in any order.
    pub fn basis(ctx: &Context, indices: &[usize]) -> Result<Self, FormError> {
        Self::from_terms(ctx, indices.len(), [(indices.to_vec(), ScalarExpr::one())])
    }

    /// Builds a form from `(indices, coefficient)` terms. Indices may be given
    /// in any order; they are sorted with the permutation sign. Terms with a
    /// repeated index vanish.
    pub fn from_terms<I>(ctx: &Context, degree: usize, terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
    {
        let mut form = Self::zero(ctx, degree)?;
        for (indices, coeff) in terms {
            if indices.len() != degree {
                return Err(FormError::WrongDegree { expected: degree, got: indices.len() });
            }
            let mut acc = (1.0, Basis::EMPTY);
            let mut repeated = false;
            for &i in &indices {
                if i >= ctx.len() {
                    return Err(FormError::IndexOutOfRange { index: i, dim: ctx.len() });
                }
                match acc.1.wedge(Basis::single(i)) {
                    Some((s, b)) => acc = (acc.0 * s, b),
                    None => repeated = true,
                }
            }
            if !repeated {
                form.accumulate(acc.1, coeff * acc.0);
            }
        }
        Ok(form)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Set on the zero produced by differentiating or wedging past degree N.
    pub fn top_exceeded(&self) -> bool {
        self.top_exceeded
    }

    pub fn terms(&self) -> impl Iterator<Item = (Basis, &ScalarExpr)> {
        self.coeffs.iter().map(|(b, c)| (*b, c))
    }

    pub fn coefficient(&self, indices: &[usize]) -> ScalarExpr {
        Basis::from_indices(indices)
            .and_then(|b| self.coeffs.get(&b).cloned())
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn coefficient_of(&self, basis: Basis) -> ScalarExpr {
        self.coeffs.get(&basis).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    /// Coefficient of a 0-form.
    pub fn as_scalar(&self) -> Option<ScalarExpr> {
        (self.degree == 0).then(|| self.coefficient_of(Basis::EMPTY))
    }

    pub fn coefficients(&self) -> Vec<ScalarExpr> {
        self.coeffs.values().cloned().collect()
    }

    /// No nonzero literal coefficients. Semantic zero needs [`form_is_zero`].
    pub fn is_trivially_zero(&self) -> bool {
        self.coeffs.values().all(ScalarExpr::is_literal_zero)
    }

    fn insert(&mut self, basis: Basis, coeff: ScalarExpr) {
        if !coeff.is_literal_zero() {
            self.coeffs.insert(basis, coeff);
        }
    }

    fn accumulate(&mut self, basis: Basis, coeff: ScalarExpr) {
        if coeff.is_literal_zero() {
            return;
        }
        let merged = match self.coeffs.remove(&basis) {
            Some(existing) => existing + coeff,
            None => coeff,
        };
        self.insert(basis, merged);
    }

    fn same_context(&self, other: &Self) -> Result<(), FormError> {
        if self.ctx != other.ctx {
            return Err(FormError::ContextMismatch { left: self.ctx.clone(), right: other.ctx.clone() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormError> {
        self.same_context(other)?;
        if self.top_exceeded {
            return Ok(other.clone());
        }
        if other.top_exceeded {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(FormError::WrongDegree { expected: self.degree, got: other.degree });
        }
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.accumulate(b, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&ScalarExpr::constant(-1.0))
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn scale(&self, f: &ScalarExpr) -> Self {
        let mut out = DifferentialForm { coeffs: BTreeMap::new(), ..self.clone() };
        for (b, c) in self.terms() {
            out.insert(b, c * f);
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut out = DifferentialForm { coeffs: BTreeMap::new(), ..self.clone() };
        for (b, c) in self.terms() {
            out.insert(b, f(c));
        }
        out
    }

    /// Exterior product. Past degree N the result is the flagged zero.
    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        self.same_context(other)?;
        let degree = self.degree + other.degree;
        if self.top_exceeded || other.top_exceeded || degree > self.dim() {
            return Ok(Self::beyond_top(&self.ctx, degree));
        }
        let mut out = Self::zero(&self.ctx, degree)?;
        for (ba, ca) in self.terms() {
            for (bb, cb) in other.terms() {
                if let Some((sign, b)) = ba.wedge(bb) {
                    out.accumulate(b, ca * cb * sign);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative, `d(f dx^I) = Σ_v ∂f/∂x^v dx^v ∧ dx^I`.
    pub fn ext_d(&self) -> Self {
        if self.top_exceeded || self.degree >= self.dim() {
            return Self::beyond_top(&self.ctx, self.degree + 1);
        }
        let mut out = DifferentialForm {
            ctx: self.ctx.clone(),
            degree: self.degree + 1,
            coeffs: BTreeMap::new(),
            top_exceeded: false,
        };
        for (b, c) in self.terms() {
            for v in 0..self.dim() {
                if b.contains(v) {
                    continue;
                }
                let dc = c.partial(v);
                if dc.is_literal_zero() {
                    continue;
                }
                if let Some((sign, nb)) = Basis::single(v).wedge(b) {
                    out.accumulate(nb, dc * sign);
                }
            }
        }
        out
    }

    /// Contraction into the first slot:
    /// `i(V)(dx^{i1}∧…∧dx^{ip}) = Σ_k (−1)^{k−1} V^{ik} dx^{i1}∧…(omit k)…∧dx^{ip}`.
    pub fn interior(&self, field: &VectorField) -> Result<Self, FormError> {
        if self.ctx != field.ctx {
            return Err(FormError::ContextMismatch { left: self.ctx.clone(), right: field.ctx.clone() });
        }
        if self.degree == 0 {
            return Err(FormError::InteriorOfScalar);
        }
        if self.top_exceeded {
            return Ok(if self.degree - 1 > self.dim() {
                Self::beyond_top(&self.ctx, self.degree - 1)
            } else {
                Self::zero(&self.ctx, self.degree - 1)?
            });
        }
        let mut out = Self::zero(&self.ctx, self.degree - 1)?;
        for (b, c) in self.terms() {
            for (k, i) in b.indices().enumerate() {
                let comp = &field.components[i];
                if comp.is_literal_zero() {
                    continue;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                out.accumulate(b.without(i), c * comp * sign);
            }
        }
        Ok(out)
    }

    /// Lie derivative by the magic formula `L_V ω = i(V)dω + d(i(V)ω)`.
    pub fn lie(&self, field: &VectorField) -> Result<Self, FormError> {
        if self.ctx != field.ctx {
            return Err(FormError::ContextMismatch { left: self.ctx.clone(), right: field.ctx.clone() });
        }
        if self.top_exceeded {
            return Ok(self.clone());
        }
        let d_then_i = self.ext_d().interior(field)?;
        if self.degree == 0 {
            return Ok(d_then_i);
        }
        let i_then_d = self.interior(field)?.ext_d();
        d_then_i.add(&i_then_d)
    }

    /// Pullback along `map`, whose target variables must be this form's context.
    pub fn pullback(&self, map: &SmoothMap) -> Result<Self, FormError> {
        if map.target != self.ctx {
            return Err(FormError::ContextMismatch { left: self.ctx.clone(), right: map.target.clone() });
        }
        if self.degree > map.source.len() {
            return Ok(Self::beyond_top(&map.source, self.degree));
        }
        if self.top_exceeded {
            return Self::zero(&map.source, self.degree);
        }
        let differentials: Vec<DifferentialForm> = map
            .components
            .iter()
            .map(|c| Self::scalar(&map.source, c.clone()).map(|f| f.ext_d()))
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(&map.source, self.degree)?;
        for (b, c) in self.terms() {
            let mut term = Self::scalar(&map.source, c.substitute(&map.components))?;
            for i in b.indices() {
                term = term.wedge(&differentials[i])?;
            }
            if !term.top_exceeded {
                out = out.add(&term)?;
            }
        }
        Ok(out)
    }

    /// Renders the form with explicit wedges in sorted-basis order.
    pub fn display(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.ctx.names();
        let mut first = true;
        for (b, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if b == Basis::EMPTY {
                write!(f, "{}", c.display(names))?;
            } else {
                write!(f, "({}) {}", c.display(names), b.render(names))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Tests every coefficient on the same sample plan; zero iff all are zero.
pub fn form_is_zero(a: &DifferentialForm, bx: &SampleBox, pol: &TolerancePolicy) -> Result<ZeroVerdict, SampleError> {
    if a.dim() != bx.dim() {
        return Err(SampleError::DimensionMismatch { expected: a.dim(), got: bx.dim() });
    }
    let coeffs = a.coefficients();
    if coeffs.is_empty() {
        return Ok(ZeroVerdict::IdenticallyZeroOnBox);
    }
    all_zero(&coeffs, bx, pol)
}

/// Largest coefficient magnitude of `a` over the given points, skipping
/// points where some coefficient cannot be evaluated.
pub fn max_abs_on(a: &DifferentialForm, points: &[Vec<f64>]) -> f64 {
    let coeffs = a.coefficients();
    points
        .iter()
        .filter_map(|p| {
            coeffs
                .iter()
                .map(|c| c.eval(p).map(f64::abs))
                .collect::<Result<Vec<_>, _>>()
                .ok()
        })
        .flatten()
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct VectorField {
    ctx: Context,
    components: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn new(ctx: &Context, components: Vec<ScalarExpr>) -> Result<Self, FormError> {
        if components.len() != ctx.len() {
            return Err(FormError::ComponentCount { expected: ctx.len(), got: components.len() });
        }
        Ok(VectorField { ctx: ctx.clone(), components })
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarExpr {
        &self.components[i]
    }

    pub fn scale(&self, f: &ScalarExpr) -> Self {
        VectorField { ctx: self.ctx.clone(), components: self.components.iter().map(|c| c * f).collect() }
    }

    /// `Σ_i ∂V^i/∂x^i`.
    pub fn divergence(&self) -> ScalarExpr {
        sum(self.components.iter().enumerate().map(|(i, c)| c.partial(i)))
    }

    /// `V · grad f`.
    pub fn directional(&self, f: &ScalarExpr) -> ScalarExpr {
        sum(self.components.iter().enumerate().map(|(i, c)| c * f.partial(i)))
    }
}

/// A map from `source` coordinates to `target` coordinates, given by one
/// expression over the source variables per target variable.
#[derive(Clone, Debug)]
pub struct SmoothMap {
    source: Context,
    target: Context,
    components: Vec<ScalarExpr>,
}

impl SmoothMap {
    pub fn new(source: &Context, target: &Context, components: Vec<ScalarExpr>) -> Result<Self, FormError> {
        check_ctx(source)?;
        if components.len() != target.len() {
            return Err(FormError::ComponentCount { expected: target.len(), got: components.len() });
        }
        if let Some(i) = components.iter().filter_map(ScalarExpr::max_var).max() {
            if i >= source.len() {
                return Err(FormError::IndexOutOfRange { index: i, dim: source.len() });
            }
        }
        Ok(SmoothMap { source: source.clone(), target: target.clone(), components })
    }

    pub fn source(&self) -> &Context {
        &self.source
    }

    pub fn target(&self) -> &Context {
        &self.target
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }
}
