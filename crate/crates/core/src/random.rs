//! Random polynomial/trigonometric expressions and forms for property checks
//! and benchmarks. Generated expressions are total (no division, log or
//! sqrt) and stay of moderate magnitude on the unit box.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{Context, Exponent, Func, Node, ScalarExpr};
use crate::forms::{DifferentialForm, VectorField};

/// Raw expression tree (no rewriting), so printing reflects the structure.
pub fn expr<R: Rng + ?Sized>(rng: &mut R, dim: usize, depth: u32) -> ScalarExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, dim);
    }
    let node = match rng.gen_range(0..9) {
        0 | 1 => Node::Add(expr(rng, dim, depth - 1), expr(rng, dim, depth - 1)),
        2 => Node::Sub(expr(rng, dim, depth - 1), expr(rng, dim, depth - 1)),
        3 | 4 => Node::Mul(expr(rng, dim, depth - 1), expr(rng, dim, depth - 1)),
        5 => Node::Pow(expr(rng, dim, depth - 1), Exponent::Int(rng.gen_range(2..=3))),
        6 => Node::Neg(expr(rng, dim, depth - 1)),
        7 => Node::Call(*[Func::Sin, Func::Cos].choose(rng).unwrap(), expr(rng, dim, depth - 1)),
        _ => Node::Call(Func::Exp, Node::Mul(ScalarExpr::constant(0.5), expr(rng, dim, depth - 1)).into()),
    };
    ScalarExpr::from_node(node)
}

fn leaf<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ScalarExpr {
    if rng.gen_bool(0.7) {
        ScalarExpr::var(rng.gen_range(0..dim))
    } else {
        // Short decimals print and reparse exactly.
        ScalarExpr::constant((rng.gen_range(-20..=20) as f64) / 4.0)
    }
}

/// Expression that may also contain division by a positive denominator and
/// `log`/`sqrt` of positive arguments, for derivative checks.
pub fn smooth_expr<R: Rng + ?Sized>(rng: &mut R, dim: usize, depth: u32) -> ScalarExpr {
    let base = expr(rng, dim, depth);
    let positive = ScalarExpr::from_node(Node::Add(
        ScalarExpr::constant(1.5),
        ScalarExpr::from_node(Node::Pow(expr(rng, dim, depth.saturating_sub(1)), Exponent::Int(2))),
    ));
    let node = match rng.gen_range(0..4) {
        0 => Node::Div(base, positive),
        1 => Node::Mul(base, ScalarExpr::from_node(Node::Call(Func::Log, positive))),
        2 => Node::Add(base, ScalarExpr::from_node(Node::Call(Func::Sqrt, positive))),
        _ => return base,
    };
    ScalarExpr::from_node(node)
}

pub fn form<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, degree: usize, depth: u32) -> DifferentialForm {
    let n = ctx.len();
    let mut terms = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != degree || !rng.gen_bool(0.7) {
            continue;
        }
        let indices: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        terms.push((indices, expr(rng, n, depth)));
    }
    DifferentialForm::from_terms(ctx, degree, terms).expect("valid random form")
}

pub fn vector_field<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, depth: u32) -> VectorField {
    let comps = (0..ctx.len()).map(|_| expr(rng, ctx.len(), depth)).collect();
    VectorField::new(ctx, comps).expect("component count matches")
}

/// Random polynomial of total degree at most `degree` with small integer
/// coefficients.
pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: u32, terms: usize) -> ScalarExpr {
    let mut acc = ScalarExpr::zero();
    for _ in 0..terms {
        let mut mono = ScalarExpr::constant(rng.gen_range(-3..=3) as f64);
        let mut left = rng.gen_range(0..=degree);
        while left > 0 {
            let var = rng.gen_range(0..dim);
            let power = rng.gen_range(1..=left);
            mono = mono * ScalarExpr::var(var).powi(power as i32);
            left -= power;
        }
        acc = acc + mono;
    }
    acc
}
