mod common;

use cartan_core::random;
use cartan_core::sampling::is_zero;
use cartan_core::{parse_expr, SampleBox, TolerancePolicy};
use proptest::prelude::*;

use common::{ctx, points, rng};

fn xyz() -> cartan_core::Context {
    ctx(&["x", "y", "z"])
}

#[test]
fn print_parse_print_is_a_fixed_point() {
    let ctx = xyz();
    let pts = points(3, 5, 11);
    for seed in 0..200 {
        let e = random::expr(&mut rng(seed), 3, 4);
        let printed = e.to_string_with(&ctx);
        let reparsed = parse_expr(&printed, &ctx).unwrap_or_else(|err| panic!("{printed}: {err}"));
        assert_eq!(reparsed.to_string_with(&ctx), printed);
        for p in &pts {
            let (a, b) = (e.eval(p).unwrap(), reparsed.eval(p).unwrap());
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{printed}");
        }
    }
}

#[test]
fn symbolic_derivative_matches_central_difference() {
    let h = 1e-5;
    for seed in 0..100 {
        let mut r = rng(1000 + seed);
        let e = random::smooth_expr(&mut r, 3, 3);
        let p = &points(3, 1, seed)[0];
        for v in 0..3 {
            let d = e.partial(v).eval(p).unwrap();
            let (mut hi, mut lo) = (p.clone(), p.clone());
            hi[v] += h;
            lo[v] -= h;
            let fd = (e.eval(&hi).unwrap() - e.eval(&lo).unwrap()) / (2.0 * h);
            assert!((d - fd).abs() <= 1e-5 * (1.0 + d.abs()), "seed {seed} var {v}: {d} vs {fd}");
        }
    }
}

#[test]
fn mixed_partials_commute() {
    let pts = points(3, 50, 5);
    for seed in 0..30 {
        let e = random::smooth_expr(&mut rng(2000 + seed), 3, 3);
        for (u, v) in [(0, 1), (0, 2), (1, 2)] {
            let uv = e.partial(u).partial(v);
            let vu = e.partial(v).partial(u);
            for p in &pts {
                let (a, b) = (uv.eval(p).unwrap(), vu.eval(p).unwrap());
                assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "seed {seed}");
            }
        }
    }
}

#[test]
fn partial_examples() {
    let ctx = xyz();
    let e = parse_expr("x^2*y", &ctx).unwrap();
    let p = [1.5, -2.0, 0.3];
    assert_eq!(e.partial(0).eval(&p).unwrap(), 2.0 * 1.5 * -2.0);
    assert_eq!(e.partial(0).partial(1).eval(&p).unwrap(), 3.0);
    assert_eq!(e.partial(1).partial(0).eval(&p).unwrap(), 3.0);
    assert!(parse_expr("sin(y)", &ctx).unwrap().partial(0).is_literal_zero());
}

#[test]
fn zero_test_examples() {
    let ctx = ctx(&["x", "y"]);
    let bx = SampleBox::cube(2, -1.0, 1.0, 100, 7).unwrap();
    let pol = TolerancePolicy::default();
    assert!(is_zero(&parse_expr("x*y - y*x", &ctx).unwrap(), &bx, &pol).unwrap().is_zero());
    let v = is_zero(&parse_expr("x", &ctx).unwrap(), &bx, &pol).unwrap();
    assert!(v.witness().unwrap().value.abs() > pol.abs);

    let r2 = parse_expr("x^2 + y^2", &ctx).unwrap();
    let e = parse_expr("1/(x^2 + y^2)", &ctx).unwrap();
    let pol = TolerancePolicy::default().excluding(r2.clone(), 0.01);
    let admitted = pol.admitted_points(&bx);
    assert!(!admitted.is_empty());
    assert!(admitted.iter().all(|p| r2.eval(p).unwrap() > 0.01 && e.eval(p).is_ok()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplification_is_sound(seed in any::<u64>()) {
        let e = random::smooth_expr(&mut rng(seed), 3, 4);
        let s = e.simplify();
        for p in points(3, 8, seed) {
            let (a, b) = (e.eval(&p).unwrap(), s.eval(&p).unwrap());
            prop_assert!(a == b || (a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn evaluation_is_deterministic(seed in any::<u64>()) {
        let e = random::expr(&mut rng(seed), 3, 4);
        for p in points(3, 4, seed) {
            prop_assert_eq!(e.eval(&p).unwrap().to_bits(), e.eval(&p).unwrap().to_bits());
        }
    }

    #[test]
    fn printed_variables_belong_to_the_context(seed in any::<u64>()) {
        let e = random::expr(&mut rng(seed), 3, 4);
        prop_assert!(e.max_var().map_or(true, |v| v < 3));
    }
}
