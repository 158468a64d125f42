//! Scalar expression trees over an ordered list of real variables.
//!
//! Expressions are immutable and reference-counted, so cloning a subtree is
//! cheap and sharing between threads is safe. Variables are stored as indices
//! into the owning [`Context`]; names are only needed for parsing and display.
//!
//! The arithmetic operators on [`ScalarExpr`] apply a small set of local
//! rewrites (constant folding, `x + 0`, `x * 1`, `x * 0`, `x - x`). Nothing
//! else is normalised: two expressions may denote the same function without
//! being structurally equal, which is why zero tests go through sampling.

use std::fmt;
use std::ops;
use std::sync::Arc;

use thiserror::Error;

/// Ordered list of variable names shared by expressions, forms and fields.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Context(Arc<[String]>);

impl Context {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Context(names.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, index: usize) -> &str {
        &self.0[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn var(&self, name: &str) -> Option<ScalarExpr> {
        self.index_of(name).map(ScalarExpr::var)
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> Result<f64, EvalError> {
        match self {
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Exp => Ok(x.exp()),
            Func::Log if x > 0.0 => Ok(x.ln()),
            Func::Log => Err(EvalError::LogDomain(x)),
            Func::Sqrt if x >= 0.0 => Ok(x.sqrt()),
            Func::Sqrt => Err(EvalError::SqrtDomain(x)),
        }
    }
}

/// Constant exponent of a power node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i32),
    /// Only defined for a strictly positive base.
    Real(f64),
}

impl Exponent {
    pub fn from_f64(value: f64) -> Exponent {
        if value.fract() == 0.0 && value.abs() <= i32::MAX as f64 {
            Exponent::Int(value as i32)
        } else {
            Exponent::Real(value)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Int(n) => n as f64,
            Exponent::Real(r) => r,
        }
    }

    fn apply(self, base: f64) -> Result<f64, EvalError> {
        match self {
            Exponent::Int(n) if n < 0 && base == 0.0 => Err(EvalError::DivisionByZero),
            Exponent::Int(n) => Ok(base.powi(n)),
            Exponent::Real(r) if base > 0.0 => Ok(base.powf(r)),
            Exponent::Real(r) => Err(EvalError::PowDomain { base, exponent: r }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(ScalarExpr),
    Call(Func, ScalarExpr),
    Add(ScalarExpr, ScalarExpr),
    Sub(ScalarExpr, ScalarExpr),
    Mul(ScalarExpr, ScalarExpr),
    Div(ScalarExpr, ScalarExpr),
    Pow(ScalarExpr, Exponent),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of non-positive value {0}")]
    LogDomain(f64),
    #[error("sqrt of negative value {0}")]
    SqrtDomain(f64),
    #[error("non-integer power {exponent} of non-positive base {base}")]
    PowDomain { base: f64, exponent: f64 },
    #[error("variable index {index} outside a point of dimension {dim}")]
    PointDimension { index: usize, dim: usize },
}

/// A smooth scalar field of the context variables.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Node>);

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl ScalarExpr {
    /// Wraps a node without any rewriting.
    pub fn from_node(node: Node) -> Self {
        ScalarExpr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: f64) -> Self {
        // adding +0 folds -0 into +0
        Self::from_node(Node::Const(value + 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn var(index: usize) -> Self {
        Self::from_node(Node::Var(index))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_const(&self, value: f64) -> bool {
        self.as_constant() == Some(value)
    }

    /// True only for a literal zero; semantic zero needs [`crate::sampling::is_zero`].
    pub fn is_literal_zero(&self) -> bool {
        self.is_const(0.0)
    }

    pub fn call(func: Func, arg: ScalarExpr) -> Self {
        if let Some(c) = arg.as_constant() {
            if let Ok(v) = func.apply(c) {
                return Self::constant(v);
            }
        }
        Self::from_node(Node::Call(func, arg))
    }

    pub fn sin(&self) -> Self {
        Self::call(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Self {
        Self::call(Func::Cos, self.clone())
    }

    pub fn exp(&self) -> Self {
        Self::call(Func::Exp, self.clone())
    }

    pub fn ln(&self) -> Self {
        Self::call(Func::Log, self.clone())
    }

    pub fn sqrt(&self) -> Self {
        Self::call(Func::Sqrt, self.clone())
    }

    pub fn powi(&self, n: i32) -> Self {
        Self::pow(self.clone(), Exponent::Int(n))
    }

    pub fn powf(&self, r: f64) -> Self {
        Self::pow(self.clone(), Exponent::from_f64(r))
    }

    pub fn pow(base: ScalarExpr, exponent: Exponent) -> Self {
        match exponent {
            Exponent::Int(0) => return Self::one(),
            Exponent::Int(1) => return base,
            _ => {}
        }
        if let Some(c) = base.as_constant() {
            if let Ok(v) = exponent.apply(c) {
                return Self::constant(v);
            }
        }
        Self::from_node(Node::Pow(base, exponent))
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        match &*self.0 {
            Node::Const(c) => Ok(*c),
            Node::Var(i) => point.get(*i).copied().ok_or(EvalError::PointDimension {
                index: *i,
                dim: point.len(),
            }),
            Node::Neg(a) => Ok(-a.eval(point)?),
            Node::Call(f, a) => f.apply(a.eval(point)?),
            Node::Add(a, b) => Ok(a.eval(point)? + b.eval(point)?),
            Node::Sub(a, b) => Ok(a.eval(point)? - b.eval(point)?),
            Node::Mul(a, b) => Ok(a.eval(point)? * b.eval(point)?),
            Node::Div(a, b) => {
                let den = b.eval(point)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(a.eval(point)? / den)
            }
            Node::Pow(a, e) => e.apply(a.eval(point)?),
        }
    }

    /// Evaluates and also returns the largest absolute value taken by any
    /// subterm, used as the scale for relative zero tolerances.
    pub fn eval_with_scale(&self, point: &[f64]) -> Result<(f64, f64), EvalError> {
        let mut scale = 0.0f64;
        let value = self.eval_tracking(point, &mut scale)?;
        Ok((value, scale))
    }

    fn eval_tracking(&self, point: &[f64], scale: &mut f64) -> Result<f64, EvalError> {
        let value = match &*self.0 {
            Node::Const(c) => *c,
            Node::Var(i) => *point.get(*i).ok_or(EvalError::PointDimension {
                index: *i,
                dim: point.len(),
            })?,
            Node::Neg(a) => -a.eval_tracking(point, scale)?,
            Node::Call(f, a) => f.apply(a.eval_tracking(point, scale)?)?,
            Node::Add(a, b) => a.eval_tracking(point, scale)? + b.eval_tracking(point, scale)?,
            Node::Sub(a, b) => a.eval_tracking(point, scale)? - b.eval_tracking(point, scale)?,
            Node::Mul(a, b) => a.eval_tracking(point, scale)? * b.eval_tracking(point, scale)?,
            Node::Div(a, b) => {
                let num = a.eval_tracking(point, scale)?;
                let den = b.eval_tracking(point, scale)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                num / den
            }
            Node::Pow(a, e) => e.apply(a.eval_tracking(point, scale)?)?,
        };
        if value.abs() > *scale || value.is_nan() {
            *scale = value.abs();
        }
        Ok(value)
    }

    /// Exact partial derivative with respect to the variable at `var`.
    pub fn partial(&self, var: usize) -> ScalarExpr {
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Var(i) => Self::constant(if *i == var { 1.0 } else { 0.0 }),
            Node::Neg(a) => -a.partial(var),
            Node::Call(f, a) => {
                let da = a.partial(var);
                if da.is_literal_zero() {
                    return Self::zero();
                }
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Exp => self.clone(),
                    Func::Log => return da / a.clone(),
                    Func::Sqrt => return da / (Self::constant(2.0) * self.clone()),
                };
                outer * da
            }
            Node::Add(a, b) => a.partial(var) + b.partial(var),
            Node::Sub(a, b) => a.partial(var) - b.partial(var),
            Node::Mul(a, b) => a.partial(var) * b.clone() + a.clone() * b.partial(var),
            Node::Div(a, b) => {
                let da = a.partial(var);
                let db = b.partial(var);
                if db.is_literal_zero() {
                    return da / b.clone();
                }
                (da * b.clone() - a.clone() * db) / b.powi(2)
            }
            Node::Pow(a, e) => {
                let da = a.partial(var);
                if da.is_literal_zero() {
                    return Self::zero();
                }
                let lowered = match e {
                    Exponent::Int(n) => Self::pow(a.clone(), Exponent::Int(n - 1)),
                    Exponent::Real(r) => Self::pow(a.clone(), Exponent::from_f64(r - 1.0)),
                };
                Self::constant(e.value()) * lowered * da
            }
        }
    }

    pub fn gradient(&self, dim: usize) -> Vec<ScalarExpr> {
        (0..dim).map(|v| self.partial(v)).collect()
    }

    /// Rebuilds the tree through the rewriting constructors.
    pub fn simplify(&self) -> ScalarExpr {
        match &*self.0 {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Neg(a) => -a.simplify(),
            Node::Call(f, a) => Self::call(*f, a.simplify()),
            Node::Add(a, b) => a.simplify() + b.simplify(),
            Node::Sub(a, b) => a.simplify() - b.simplify(),
            Node::Mul(a, b) => a.simplify() * b.simplify(),
            Node::Div(a, b) => a.simplify() / b.simplify(),
            Node::Pow(a, e) => Self::pow(a.simplify(), *e),
        }
    }

    /// Replaces every variable `i` by `values[i]`, producing an expression in
    /// whatever context `values` live in.
    pub fn substitute(&self, values: &[ScalarExpr]) -> ScalarExpr {
        match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Var(i) => values[*i].clone(),
            Node::Neg(a) => -a.substitute(values),
            Node::Call(f, a) => Self::call(*f, a.substitute(values)),
            Node::Add(a, b) => a.substitute(values) + b.substitute(values),
            Node::Sub(a, b) => a.substitute(values) - b.substitute(values),
            Node::Mul(a, b) => a.substitute(values) * b.substitute(values),
            Node::Div(a, b) => a.substitute(values) / b.substitute(values),
            Node::Pow(a, e) => Self::pow(a.substitute(values), *e),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match &*self.0 {
            Node::Const(_) => None,
            Node::Var(i) => Some(*i),
            Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => a.max_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        match &*self.0 {
            Node::Const(_) => false,
            Node::Var(i) => *i == var,
            Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => a.depends_on(var),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match &*self.0 {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => 1 + a.node_count(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// Renders the expression in the parser's grammar using the given names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> Display<'a> {
        Display { expr: self, names }
    }

    pub fn to_string_with(&self, ctx: &Context) -> String {
        self.display(ctx.names()).to_string()
    }
}

pub(crate) fn sum<I: IntoIterator<Item = ScalarExpr>>(terms: I) -> ScalarExpr {
    terms
        .into_iter()
        .fold(ScalarExpr::zero(), |acc, term| acc + term)
}

impl From<Node> for ScalarExpr {
    fn from(node: Node) -> Self {
        ScalarExpr::from_node(node)
    }
}

impl From<f64> for ScalarExpr {
    fn from(value: f64) -> Self {
        ScalarExpr::constant(value)
    }
}

impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;

    fn neg(self) -> ScalarExpr {
        match &*self.0 {
            Node::Const(c) => ScalarExpr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => ScalarExpr::from_node(Node::Neg(self)),
        }
    }
}

impl ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;

    fn neg(self) -> ScalarExpr {
        -self.clone()
    }
}

impl ops::Add for ScalarExpr {
    type Output = ScalarExpr;

    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) => ScalarExpr::constant(a + b),
            (Some(a), _) if a == 0.0 => rhs,
            (_, Some(b)) if b == 0.0 => self,
            _ => match rhs.node() {
                Node::Neg(b) => ScalarExpr::from_node(Node::Sub(self, b.clone())),
                _ => ScalarExpr::from_node(Node::Add(self, rhs)),
            },
        }
    }
}

impl ops::Sub for ScalarExpr {
    type Output = ScalarExpr;

    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) => ScalarExpr::constant(a - b),
            (_, Some(b)) if b == 0.0 => self,
            (Some(a), _) if a == 0.0 => -rhs,
            _ if self == rhs => ScalarExpr::zero(),
            _ => match rhs.node() {
                Node::Neg(b) => ScalarExpr::from_node(Node::Add(self, b.clone())),
                _ => ScalarExpr::from_node(Node::Sub(self, rhs)),
            },
        }
    }
}

impl ops::Mul for ScalarExpr {
    type Output = ScalarExpr;

    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) => ScalarExpr::constant(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => ScalarExpr::zero(),
            (Some(a), _) if a == 1.0 => rhs,
            (_, Some(b)) if b == 1.0 => self,
            (Some(a), _) if a == -1.0 => -rhs,
            (_, Some(b)) if b == -1.0 => -self,
            _ => ScalarExpr::from_node(Node::Mul(self, rhs)),
        }
    }
}

impl ops::Div for ScalarExpr {
    type Output = ScalarExpr;

    fn div(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) if b != 0.0 => ScalarExpr::constant(a / b),
            (Some(a), _) if a == 0.0 => ScalarExpr::zero(),
            (_, Some(b)) if b == 1.0 => self,
            _ => ScalarExpr::from_node(Node::Div(self, rhs)),
        }
    }
}

macro_rules! forward_ref_binop {
    ($($imp:ident $method:ident),*) => {$(
        impl ops::$imp<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                ops::$imp::$method(self.clone(), rhs.clone())
            }
        }
        impl ops::$imp<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                ops::$imp::$method(self.clone(), rhs)
            }
        }
        impl ops::$imp<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                ops::$imp::$method(self, rhs.clone())
            }
        }
        impl ops::$imp<f64> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: f64) -> ScalarExpr {
                ops::$imp::$method(self, ScalarExpr::constant(rhs))
            }
        }
        impl ops::$imp<ScalarExpr> for f64 {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                ops::$imp::$method(ScalarExpr::constant(self), rhs)
            }
        }
    )*};
}

forward_ref_binop!(Add add, Sub sub, Mul mul, Div div);

// Binding strength used by the printer; mirrors the parser's grammar.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

pub struct Display<'a> {
    expr: &'a ScalarExpr,
    names: &'a [String],
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.names, 0)
    }
}

fn precedence(expr: &ScalarExpr) -> u8 {
    match expr.node() {
        Node::Const(c) if *c < 0.0 || c.is_sign_negative() => PREC_UNARY,
        Node::Const(_) | Node::Var(_) | Node::Call(..) => PREC_ATOM,
        Node::Neg(_) => PREC_UNARY,
        Node::Add(..) | Node::Sub(..) => PREC_SUM,
        Node::Mul(..) | Node::Div(..) => PREC_PRODUCT,
        Node::Pow(..) => PREC_POWER,
    }
}

fn write_expr(
    f: &mut fmt::Formatter<'_>,
    expr: &ScalarExpr,
    names: &[String],
    min_prec: u8,
) -> fmt::Result {
    let prec = precedence(expr);
    let paren = prec < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match expr.node() {
        Node::Const(c) => write!(f, "{c}")?,
        Node::Var(i) => match names.get(*i) {
            Some(name) => f.write_str(name)?,
            None => write!(f, "_{i}")?,
        },
        Node::Neg(a) => {
            f.write_str("-")?;
            write_expr(f, a, names, PREC_UNARY)?;
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a, names, 0)?;
            f.write_str(")")?;
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            write_expr(f, a, names, PREC_SUM)?;
            f.write_str(if matches!(expr.node(), Node::Add(..)) { " + " } else { " - " })?;
            write_expr(f, b, names, PREC_PRODUCT)?;
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            write_expr(f, a, names, PREC_PRODUCT)?;
            f.write_str(if matches!(expr.node(), Node::Mul(..)) { "*" } else { "/" })?;
            write_expr(f, b, names, PREC_UNARY)?;
        }
        Node::Pow(a, e) => {
            write_expr(f, a, names, PREC_ATOM)?;
            f.write_str("^")?;
            let v = e.value();
            if v < 0.0 {
                write!(f, "({v})")?;
            } else {
                write!(f, "{v}")?;
            }
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}
