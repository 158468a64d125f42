#![allow(dead_code)]

use cartan_core::{Basis, Context, DifferentialForm, SampleBox, ScalarExpr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ctx(names: &[&str]) -> Context {
    Context::new(names.iter().copied())
}

pub fn points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    SampleBox::cube(dim, -1.0, 1.0, count, seed).unwrap().points()
}

/// Coefficient-wise comparison with a mixed absolute/relative tolerance.
/// Returns the worst scaled discrepancy.
pub fn form_gap(a: &DifferentialForm, b: &DifferentialForm, pts: &[Vec<f64>]) -> f64 {
    assert_eq!(a.degree(), b.degree(), "degrees differ");
    let mut bases: Vec<Basis> = a.terms().map(|(k, _)| k).chain(b.terms().map(|(k, _)| k)).collect();
    bases.sort();
    bases.dedup();
    let mut worst: f64 = 0.0;
    for p in pts {
        for k in &bases {
            let x = a.coefficient_of(*k).eval(p).unwrap();
            let y = b.coefficient_of(*k).eval(p).unwrap();
            worst = worst.max((x - y).abs() / (1.0 + x.abs().max(y.abs())));
        }
    }
    worst
}

pub fn expr_gap(a: &ScalarExpr, b: &ScalarExpr, pts: &[Vec<f64>]) -> f64 {
    pts.iter()
        .map(|p| {
            let (x, y) = (a.eval(p).unwrap(), b.eval(p).unwrap());
            (x - y).abs() / (1.0 + x.abs().max(y.abs()))
        })
        .fold(0.0, f64::max)
}

pub fn sign(p: usize) -> f64 {
    if p % 2 == 0 { 1.0 } else { -1.0 }
}
