mod common;

use cartan_core::forms::max_abs_on;
use cartan_core::random;
use cartan_core::{parse_expr, DifferentialForm, ScalarExpr, SmoothMap, VectorField};
use proptest::prelude::*;

use common::{ctx, form_gap, points, rng, sign};

const TOL: f64 = 1e-9;

fn dims() -> impl Strategy<Value = usize> {
    prop_oneof![Just(3usize), Just(4usize)]
}

fn names(n: usize) -> cartan_core::Context {
    ctx(&["x", "y", "z", "t"][..n])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn graded_commutativity(seed in any::<u64>(), n in dims(), p in 1usize..=2, q in 1usize..=2) {
        let c = names(n);
        let mut r = rng(seed);
        let a = random::form(&mut r, &c, p, 3);
        let b = random::form(&mut r, &c, q, 3);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale(&ScalarExpr::constant(sign(p * q)));
        prop_assert!(form_gap(&ab, &ba, &points(n, 100, seed)) <= TOL);
    }

    #[test]
    fn graded_leibniz(seed in any::<u64>(), n in dims(), p in 0usize..=2, q in 0usize..=2) {
        let c = names(n);
        let mut r = rng(seed);
        let a = random::form(&mut r, &c, p, 3);
        let b = random::form(&mut r, &c, q, 3);
        let lhs = a.wedge(&b).unwrap().ext_d();
        let rhs = a.ext_d().wedge(&b).unwrap()
            .add(&a.wedge(&b.ext_d()).unwrap().scale(&ScalarExpr::constant(sign(p)))).unwrap();
        prop_assert!(form_gap(&lhs, &rhs, &points(n, 30, seed)) <= TOL);
    }

    #[test]
    fn poincare_lemma(seed in any::<u64>(), n in dims(), p in 0usize..=3) {
        let c = names(n);
        let a = random::form(&mut rng(seed), &c, p, 3);
        let dd = a.ext_d().ext_d();
        prop_assert!(dd.top_exceeded() || max_abs_on(&dd, &points(n, 30, seed)) <= TOL);
    }

    #[test]
    fn lie_derivative_commutes_with_d(seed in any::<u64>(), n in dims(), p in 0usize..=2) {
        let c = names(n);
        let mut r = rng(seed);
        let a = random::form(&mut r, &c, p, 2);
        let v = random::vector_field(&mut r, &c, 2);
        let lhs = a.ext_d().lie(&v).unwrap();
        let rhs = a.lie(&v).unwrap().ext_d();
        prop_assert!(form_gap(&lhs, &rhs, &points(n, 20, seed)) <= TOL);
    }

    #[test]
    fn lie_derivative_is_a_derivation(seed in any::<u64>(), n in dims(), p in 0usize..=2, q in 0usize..=1) {
        let c = names(n);
        let mut r = rng(seed);
        let a = random::form(&mut r, &c, p, 2);
        let b = random::form(&mut r, &c, q, 2);
        let v = random::vector_field(&mut r, &c, 2);
        let lhs = a.wedge(&b).unwrap().lie(&v).unwrap();
        let rhs = a.lie(&v).unwrap().wedge(&b).unwrap().add(&a.wedge(&b.lie(&v).unwrap()).unwrap()).unwrap();
        prop_assert!(form_gap(&lhs, &rhs, &points(n, 20, seed)) <= TOL);
    }

    #[test]
    fn interior_product_is_an_antiderivation(seed in any::<u64>(), n in dims(), p in 1usize..=2, q in 1usize..=2) {
        let c = names(n);
        let mut r = rng(seed);
        let a = random::form(&mut r, &c, p, 2);
        let b = random::form(&mut r, &c, q, 2);
        let v = random::vector_field(&mut r, &c, 2);
        let lhs = a.wedge(&b).unwrap().interior(&v).unwrap();
        let rhs = a.interior(&v).unwrap().wedge(&b).unwrap()
            .add(&a.wedge(&b.interior(&v).unwrap()).unwrap().scale(&ScalarExpr::constant(sign(p)))).unwrap();
        prop_assert!(form_gap(&lhs, &rhs, &points(n, 20, seed)) <= TOL);
        if p == 2 {
            prop_assert!(max_abs_on(&a.interior(&v).unwrap().interior(&v).unwrap(), &points(n, 20, seed)) <= TOL);
        }
    }

    #[test]
    fn pullback_is_natural(seed in any::<u64>(), p in 0usize..=2, q in 0usize..=1) {
        let target = names(3);
        let source = ctx(&["u", "v", "w"]);
        let mut r = rng(seed);
        let a = random::form(&mut r, &target, p, 2);
        let b = random::form(&mut r, &target, q, 2);
        let map = SmoothMap::new(&source, &target, (0..3).map(|_| random::polynomial(&mut r, 3, 2, 3)).collect()).unwrap();
        let pts = points(3, 20, seed);
        let lhs = a.wedge(&b).unwrap().pullback(&map).unwrap();
        let rhs = a.pullback(&map).unwrap().wedge(&b.pullback(&map).unwrap()).unwrap();
        prop_assert!(form_gap(&lhs, &rhs, &pts) <= TOL);
        let lhs = a.ext_d().pullback(&map).unwrap();
        let rhs = a.pullback(&map).unwrap().ext_d();
        prop_assert!(form_gap(&lhs, &rhs, &pts) <= TOL);
    }
}

#[test]
fn wedge_examples() {
    let c = ctx(&["x", "y", "z"]);
    let e = |s| parse_expr(s, &c).unwrap();
    let dx = DifferentialForm::basis(&c, &[0]).unwrap();
    assert!(dx.wedge(&dx).unwrap().is_trivially_zero());

    let ydx = dx.scale(&e("y"));
    let xdy = DifferentialForm::basis(&c, &[1]).unwrap().scale(&e("x"));
    let p = [0.3, 0.7, -0.2];
    assert!((ydx.wedge(&xdy).unwrap().coefficient(&[0, 1]).eval(&p).unwrap() - 0.21).abs() < 1e-15);
    assert!((xdy.wedge(&ydx).unwrap().coefficient(&[0, 1]).eval(&p).unwrap() + 0.21).abs() < 1e-15);

    // dφ∧dψ carries the components of grad φ × grad ψ
    let a = DifferentialForm::scalar(&c, e("x^2")).unwrap().ext_d();
    let b = DifferentialForm::scalar(&c, e("y")).unwrap().ext_d();
    let ab = a.wedge(&b).unwrap();
    assert_eq!(ab.coefficient(&[0, 1]).eval(&p).unwrap(), 2.0 * p[0]);
    assert_eq!(max_abs_on(&ab.sub(&DifferentialForm::basis(&c, &[0, 1]).unwrap().scale(&e("2*x"))).unwrap(), &[p.to_vec()]), 0.0);
}

#[test]
fn derivative_and_contraction_examples() {
    let c = ctx(&["x", "y", "z", "t"]);
    let e = |s| parse_expr(s, &c).unwrap();
    let a = DifferentialForm::one_form(&c, vec![e("-y"), e("x"), e("0"), e("0")]).unwrap();
    let f = a.ext_d();
    let p = [0.1, 0.2, 0.3, 0.4];
    assert_eq!(f.coefficient(&[0, 1]).eval(&p).unwrap(), 2.0);
    assert_eq!(max_abs_on(&f.sub(&DifferentialForm::basis(&c, &[0, 1]).unwrap().scale(&e("2"))).unwrap(), &[p.to_vec()]), 0.0);

    let xdy = DifferentialForm::one_form(&c, vec![e("0"), e("x"), e("0"), e("0")]).unwrap();
    let v = VectorField::new(&c, vec![e("1"), e("0"), e("0"), e("0")]).unwrap();
    assert_eq!(xdy.interior(&v).unwrap().as_scalar().unwrap().eval(&p).unwrap(), 0.0);

    let w = VectorField::new(&c, vec![e("x*t"), e("sin(z)"), e("y"), e("1")]).unwrap();
    let dxdy = DifferentialForm::basis(&c, &[0, 1]).unwrap();
    let i = dxdy.interior(&w).unwrap();
    assert_eq!(i.coefficient(&[1]).eval(&p).unwrap(), p[0] * p[3]);
    assert_eq!(i.coefficient(&[0]).eval(&p).unwrap(), -(p[2]).sin());
}

#[test]
fn lie_and_pullback_examples() {
    let c = ctx(&["x", "y"]);
    let e = |s| parse_expr(s, &c).unwrap();
    let v = VectorField::new(&c, vec![e("-y"), e("x")]).unwrap();
    let l = DifferentialForm::basis(&c, &[0]).unwrap().lie(&v).unwrap();
    assert_eq!(l.coefficient(&[0]).eval(&[0.5, 0.5]).unwrap(), 0.0);
    assert_eq!(l.coefficient(&[1]).eval(&[0.5, 0.5]).unwrap(), -1.0);

    let c3 = ctx(&["x", "y", "z"]);
    let v = VectorField::new(&c3, vec![ScalarExpr::one(), ScalarExpr::zero(), ScalarExpr::zero()]).unwrap();
    let phi = DifferentialForm::scalar(&c3, parse_expr("x^2", &c3).unwrap()).unwrap();
    assert_eq!(phi.lie(&v).unwrap().as_scalar().unwrap().eval(&[0.25, 0.0, 0.0]).unwrap(), 0.5);

    let u = ctx(&["u"]);
    let x = ctx(&["x"]);
    let map = SmoothMap::new(&u, &x, vec![parse_expr("u^2", &u).unwrap()]).unwrap();
    let back = DifferentialForm::basis(&x, &[0]).unwrap().pullback(&map).unwrap();
    assert_eq!(back.coefficient(&[0]).eval(&[1.5]).unwrap(), 3.0);

    let uv = ctx(&["u", "v"]);
    let xy = ctx(&["x", "y"]);
    let map = SmoothMap::new(&uv, &xy, vec![parse_expr("u + v", &uv).unwrap(), parse_expr("u*v", &uv).unwrap()]).unwrap();
    let a = DifferentialForm::one_form(&xy, vec![ScalarExpr::zero(), ScalarExpr::var(0)]).unwrap();
    let back = a.pullback(&map).unwrap();
    let p = [0.4, -1.1];
    assert!((back.coefficient(&[0]).eval(&p).unwrap() - (p[0] + p[1]) * p[1]).abs() < 1e-15);
    assert!((back.coefficient(&[1]).eval(&p).unwrap() - (p[0] + p[1]) * p[0]).abs() < 1e-15);
}
