//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. Tolerances and time budgets are pinned below.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cartan_core::forms::max_abs_on;
use cartan_core::pfaff::{analyze, torsion_from_three_form, Connectedness};
use cartan_core::random;
use cartan_core::{
    braid_integral, build_cartan_topology, cartan_topology, circulate, classify_process, cofactor_adjoint_current, euler_residual,
    gauss_linking, holder_current, ns_parity, parse_expr, pfaff_sequence, torsion_current, Chain3, ClosedCurve, Context,
    DifferentialForm, FiniteTopology, FluidState, PointSet, ProcessClass, QuadratureSpec, SampleBox, ScalarExpr, SignatureSpec,
    TolerancePolicy, Vec3, VectorField,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FORM_IDENTITY_TOL: f64 = 1e-9;
const TORSION_TOL: f64 = 1e-9;
const CIRCULATION_TOL: f64 = 1e-6;
const LINKING_TOL: f64 = 1e-3;
const REVERSAL_TOL: f64 = 1e-6;
const BRAID_ZERO_TOL: f64 = 1e-6;
const BRAID_MATCH_REL: f64 = 0.005;
const PARITY_TOL: f64 = 1e-6;
const HOLDER_TOL: f64 = 1e-8;
const HOLDER_LAMBDA_MIN: f64 = 0.1;
const EULER_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, bad: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(bad.into())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(n: usize) -> Context {
    Context::new(["x", "y", "z", "t"][..n].iter().copied())
}

fn points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    SampleBox::cube(n, -1.0, 1.0, count, seed).unwrap().points()
}

fn diff_max(a: &DifferentialForm, b: &DifferentialForm, pts: &[Vec<f64>]) -> f64 {
    max_abs_on(&a.sub(b).unwrap(), pts)
}

// 1 ------------------------------------------------------------------------

const TABLE: [[&str; 5]; 16] = [
    ["", "", "", "", ""],
    ["A", "F", "A", "F", "AF"],
    ["F", "", "", "F", "F"],
    ["H", "K", "H", "K", "HK"],
    ["K", "", "", "K", "K"],
    ["AF", "F", "AF", "", "AF"],
    ["AH", "FK", "AH", "FK", "X"],
    ["AK", "F", "A", "FK", "AFK"],
    ["FH", "K", "H", "FK", "FHK"],
    ["FK", "", "", "FK", "FK"],
    ["HK", "K", "HK", "", "HK"],
    // printed interior "A∪F∪K" is inconsistent with its own boundary column
    ["AFH", "FK", "AFH", "K", "X"],
    ["FHK", "K", "HK", "F", "FHK"],
    ["AHK", "FK", "AHK", "F", "X"],
    ["AFK", "F", "AF", "K", "AFK"],
    ["X", "FK", "X", "", "X"],
];
const OPENS: [&str; 9] = ["X", "", "A", "H", "AF", "HK", "AH", "AHK", "AFH"];
const CLOSEDS: [&str; 9] = ["", "X", "FHK", "AFK", "HK", "AF", "FK", "F", "K"];

fn decode(t: &FiniteTopology, s: &str) -> PointSet {
    if s == "X" {
        return t.carrier();
    }
    let labels: Vec<String> = s.chars().map(String::from).collect();
    t.set(&labels.iter().map(String::as_str).collect::<Vec<_>>()).unwrap()
}

fn table_reproduction() -> Outcome {
    let t = cartan_topology(4).map_err(|e| e.to_string())?;
    let sorted = |mut v: Vec<PointSet>| {
        v.sort_by_key(|s| s.0);
        v
    };
    if sorted(t.opens().to_vec()) != sorted(OPENS.iter().map(|s| decode(&t, s)).collect()) {
        return Err(format!("opens differ: {} found", t.opens().len()));
    }
    if sorted(t.closeds()) != sorted(CLOSEDS.iter().map(|s| decode(&t, s)).collect()) {
        return Err("closed sets differ".into());
    }
    let mut cells = 0;
    for row in TABLE {
        let ops = t.operators(decode(&t, row[0])).map_err(|e| e.to_string())?;
        let got = [ops.limit_points, ops.interior, ops.boundary, ops.closure];
        for (k, cell) in got.iter().enumerate() {
            if *cell != decode(&t, row[k + 1]) {
                return Err(format!("row {:?} column {} = {}", row[0], k + 1, t.render(*cell)));
            }
            cells += 1;
        }
    }
    Ok(format!("9 opens, 9 closeds, {cells} cells"))
}

// 2 ------------------------------------------------------------------------

fn fixtures() -> Vec<(DifferentialForm, usize)> {
    let form = |n: usize, coeffs: [&str; 4]| {
        let c = names(n);
        DifferentialForm::one_form(&c, coeffs[..n].iter().map(|s| parse_expr(s, &c).unwrap()).collect()).unwrap()
    };
    vec![
        (form(3, ["0", "0", "1", ""]), 1),
        (form(3, ["0", "x", "0", ""]), 2),
        (form(3, ["0", "x", "1", ""]), 3),
        (form(4, ["0", "x", "0", "z"]), 4),
    ]
}

fn fixture_box(n: usize) -> SampleBox {
    SampleBox::cube(n, 0.25, 1.5, 64, 17).unwrap()
}

fn d_is_limit_operator() -> Outcome {
    let pol = TolerancePolicy::default();
    let mut carriers = vec![cartan_topology(4).unwrap()];
    for (a, _) in fixtures() {
        let seq = pfaff_sequence(&a, &fixture_box(a.dim()), &pol).map_err(|e| e.to_string())?;
        carriers.push(build_cartan_topology(&seq).map_err(|e| e.to_string())?);
    }
    let bad: Vec<usize> = carriers.iter().filter(|t| !t.verify_d_is_limit_operator()).map(FiniteTopology::len).collect();
    check(bad.is_empty(), format!("{} carriers", carriers.len()), format!("fails on carriers of size {bad:?}"))
}

// 3 ------------------------------------------------------------------------

fn poincare_and_leibniz() -> Outcome {
    let (mut worst_dd, mut worst_leibniz) = (0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let n = if seed % 2 == 0 { 3 } else { 4 };
        let c = names(n);
        let mut r = rng(seed);
        let p = (seed % 3) as usize;
        let q = ((seed / 3) % 3) as usize;
        let a = random::form(&mut r, &c, p, 3);
        let b = random::form(&mut r, &c, q, 3);
        let pts = points(n, 20, seed);
        let dd = a.ext_d().ext_d();
        if !dd.top_exceeded() {
            worst_dd = worst_dd.max(max_abs_on(&dd, &pts));
        }
        let lhs = a.wedge(&b).unwrap().ext_d();
        if lhs.top_exceeded() {
            continue;
        }
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a.ext_d().wedge(&b).unwrap().add(&a.wedge(&b.ext_d()).unwrap().scale(&ScalarExpr::constant(sign))).unwrap();
        worst_leibniz = worst_leibniz.max(diff_max(&lhs, &rhs, &pts));
    }
    check(
        worst_dd <= FORM_IDENTITY_TOL && worst_leibniz <= FORM_IDENTITY_TOL,
        format!("max |dd a| = {worst_dd:.1e}, max Leibniz gap = {worst_leibniz:.1e}"),
        format!("|dd a| = {worst_dd:e}, Leibniz gap = {worst_leibniz:e}"),
    )
}

// 4 ------------------------------------------------------------------------

fn continuity_theorem() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let n = 3 + (seed % 2) as usize;
        let c = names(n);
        let mut r = rng(100 + seed);
        let a = random::form(&mut r, &c, 1, 3);
        let v = random::vector_field(&mut r, &c, 2);
        let lhs = a.ext_d().lie(&v).unwrap();
        let rhs = a.lie(&v).unwrap().ext_d();
        worst = worst.max(diff_max(&lhs, &rhs, &points(n, 20, seed)));
    }
    check(worst <= FORM_IDENTITY_TOL, format!("max gap {worst:.1e}"), format!("gap {worst:e}"))
}

// 5 ------------------------------------------------------------------------

fn pfaff_fixtures() -> Outcome {
    let pol = TolerancePolicy::default();
    let mut dims = Vec::new();
    for (a, want) in fixtures() {
        let r = analyze(&a, &fixture_box(a.dim()), &pol).map_err(|e| e.to_string())?;
        let connected = r.connectedness == Connectedness::Connected;
        if r.dimension != want || connected != (want <= 2) {
            return Err(format!("expected dimension {want}, got {} ({:?})", r.dimension, r.connectedness));
        }
        dims.push(format!("{}{}", r.dimension, if connected { "c" } else { "d" }));
    }
    Ok(format!("dimensions/connectedness {}", dims.join(" ")))
}

// 6 ------------------------------------------------------------------------

fn torsion_identity() -> Outcome {
    let c = names(4);
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut r = rng(200 + seed);
        let a = random::form(&mut r, &c, 1, 3);
        let tc = torsion_current(&a).map_err(|e| e.to_string())?;
        let h3 = a.wedge(&a.ext_d()).unwrap();
        let read = torsion_from_three_form(&h3).map_err(|e| e.to_string())?;
        for p in points(4, 100, seed) {
            for (x, y) in tc.t.components().iter().chain([&tc.h]).zip(read.t.components().iter().chain([&read.h])) {
                worst = worst.max((x.eval(&p).unwrap() - y.eval(&p).unwrap()).abs());
            }
        }
    }
    check(worst <= TORSION_TOL, format!("max gap {worst:.1e}"), format!("gap {worst:e}"))
}

// 7 ------------------------------------------------------------------------

fn curve(comps: &[&str]) -> ClosedCurve {
    ClosedCurve::parse("t", 2.0 * PI, comps).unwrap()
}

fn circulation() -> Outcome {
    let c = names(3);
    let e = |s| parse_expr(s, &c).unwrap();
    let a = DifferentialForm::one_form(&c, vec![e("y/(x^2+y^2)"), e("-x/(x^2+y^2)"), e("0")]).unwrap();
    let q = QuadratureSpec::simpson(512);
    let run = |comps: &[&str]| circulate(&a, &curve(comps), &q).map(|r| r.value).map_err(|e| e.to_string());
    let unit = run(&["cos(t)", "sin(t)", "0"])?;
    let away = run(&["5 + cos(t)", "5 + sin(t)", "0"])?;
    let double = run(&["cos(2*t)", "sin(2*t)", "0"])?;
    check(
        (unit.abs() - 2.0 * PI).abs() <= CIRCULATION_TOL && away.abs() <= CIRCULATION_TOL && (double.abs() - 4.0 * PI).abs() <= CIRCULATION_TOL,
        format!("Γ = {unit:.9}, {away:.1e}, {double:.9}"),
        format!("Γ = {unit}, {away}, {double}"),
    )
}

// 8 ------------------------------------------------------------------------

fn gauss_linking_criterion() -> Outcome {
    let sig = SignatureSpec::euclidean(3);
    let q = QuadratureSpec::simpson(256);
    let run = |a: &ClosedCurve, b: &ClosedCurve| gauss_linking(a, b, &sig, &q).map(|r| r.value).map_err(|e| e.to_string());
    let c1 = curve(&["cos(t)", "sin(t)", "0"]);
    let c2 = curve(&["1 + cos(t)", "0", "sin(t)"]);
    let far = curve(&["4 + cos(t)", "sin(t)", "0"]);
    let hopf = run(&c1, &c2)?;
    let unlinked = run(&c1, &far)?;
    let reversed = run(&c1, &c2.reversed())?;
    check(
        (hopf.abs() - 1.0).abs() <= LINKING_TOL && unlinked.abs() <= LINKING_TOL && (hopf + reversed).abs() <= REVERSAL_TOL,
        format!("Hopf {hopf:.6}, unlinked {unlinked:.1e}, reversed {reversed:.6}"),
        format!("Hopf {hopf}, unlinked {unlinked}, reversed {reversed}"),
    )
}

// 9 ------------------------------------------------------------------------

const BRAID_E_OVER_C: f64 = 1.0;
const BRAID_NODES: usize = 64;

/// Independent brute-force Riemann sum over the 3-torus with hand-written
/// loops and velocities; returns the signed sum and the sum of magnitudes.
fn braid_oracle() -> (f64, f64) {
    let p1 = |t: f64| [t.cos(), t.sin(), 0.3];
    let f1 = |t: f64| [-t.sin(), t.cos(), 0.0];
    let p2 = |t: f64| [0.2, t.cos(), t.sin()];
    let f2 = |t: f64| [0.0, -t.sin(), t.cos()];
    let p3 = |t: f64| [t.sin(), 0.4, t.cos()];
    let f3 = |t: f64| [t.cos(), 0.0, -t.sin()];
    let h = 2.0 * PI / BRAID_NODES as f64;
    let (mut signed, mut mass) = (0.0, 0.0);
    for i in 0..BRAID_NODES {
        for j in 0..BRAID_NODES {
            for k in 0..BRAID_NODES {
                let (a, b, c) = (i as f64 * h, j as f64 * h, k as f64 * h);
                let (u, v, w) = (f1(a), f2(b), f3(c));
                let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0]);
                let p: Vec<f64> = (0..3).map(|m| p1(a)[m] + p2(b)[m] + p3(c)[m]).collect();
                let lam = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + BRAID_E_OVER_C * BRAID_E_OVER_C).powi(2);
                let g = BRAID_E_OVER_C * det / lam * h * h * h;
                signed += g;
                mass += g.abs();
            }
        }
    }
    (signed, mass)
}

fn braid() -> Outcome {
    let sig = SignatureSpec::euclidean(4);
    let e = BRAID_E_OVER_C;
    let coplanar = Chain3::from_loops(
        &curve(&["cos(t)", "sin(t)", "0"]),
        &curve(&["2*cos(t)", "0.5*sin(t)", "0"]),
        &curve(&["0.5 + 0.5*cos(t)", "sin(t)", "0"]),
    )
    .unwrap();
    let q = QuadratureSpec::simpson(32);
    let v_coplanar = braid_integral(&coplanar, e, &sig, &q).map_err(|err| err.to_string())?.value;

    // p₂ driven by p₁'s parameter: P(t, t', t'') = p₁(t) + p₂(t) + p₃(t'')
    let params = Context::new(["t", "u", "w"]);
    let sync = [ "cos(t) + 0.2", "sin(t) + cos(t) + 0.4", "0.3 + sin(t) + cos(w)"].map(|s| parse_expr(s, &params).unwrap());
    let synced = Chain3::general([2.0 * PI; 3], sync).unwrap();
    let v_sync = braid_integral(&synced, e, &sig, &QuadratureSpec::simpson(16)).map_err(|err| err.to_string())?.value;

    let loops = Chain3::from_loops(
        &curve(&["cos(t)", "sin(t)", "0.3"]),
        &curve(&["0.2", "cos(t)", "sin(t)"]),
        &curve(&["sin(t)", "0.4", "cos(t)"]),
    )
    .unwrap();
    let main = braid_integral(&loops, e, &sig, &QuadratureSpec::trapezoid(BRAID_NODES)).map_err(|err| err.to_string())?.value;
    let (oracle, mass) = braid_oracle();
    // The signed integral of an exact 3-form over a closed chain cancels, so the
    // relative match is taken against the integrand's absolute mass.
    let rel = (main - oracle).abs() / mass;
    check(
        v_coplanar.abs() <= BRAID_ZERO_TOL && v_sync.abs() <= BRAID_ZERO_TOL && rel <= BRAID_MATCH_REL && mass > 1e-3,
        format!("coplanar {v_coplanar:.1e}, synchronized {v_sync:.1e}, non-coplanar {main:.2e} vs oracle {oracle:.2e} (mass {mass:.3})"),
        format!("coplanar {v_coplanar}, synchronized {v_sync}, main {main}, oracle {oracle}, mass {mass}"),
    )
}

// 10 -----------------------------------------------------------------------

fn abc_velocity(p: &[f64]) -> [f64; 3] {
    [p[2].sin() + p[1].cos(), p[0].sin() + p[2].cos(), p[1].sin() + p[0].cos()]
}

fn fd_curl(f: &dyn Fn(&[f64]) -> [f64; 3], p: &[f64], h: f64) -> [f64; 3] {
    let d = |i: usize, j: usize| {
        let (mut a, mut b) = (p.to_vec(), p.to_vec());
        a[j] += h;
        b[j] -= h;
        (f(&a)[i] - f(&b)[i]) / (2.0 * h)
    };
    [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
}

fn ns_parity_criterion() -> Outcome {
    let c = names(4);
    let e = |s| parse_expr(s, &c).unwrap();
    let v = Vec3::new([e("sin(z) + cos(y)"), e("sin(x) + cos(z)"), e("sin(y) + cos(x)")]);
    let h = 1e-4;
    let omega = |p: &[f64]| fd_curl(&abc_velocity, p, h);
    let mut worst = 0.0f64;
    let mut at_origin = Vec::new();
    for nu in [0.0, 0.01, 1.0] {
        let f = FluidState::new(&c, v.clone(), ScalarExpr::zero(), nu).unwrap();
        let k = ns_parity(&f);
        for p in points(4, 50, 7) {
            let w = omega(&p);
            let cw = fd_curl(&omega, &p, h);
            let oracle = -2.0 * nu * (w[0] * cw[0] + w[1] * cw[1] + w[2] * cw[2]);
            worst = worst.max((k.eval(&p).unwrap() - oracle).abs());
        }
        let k0 = k.eval(&[0.0; 4]).unwrap();
        if (k0 + 6.0 * nu).abs() > PARITY_TOL {
            return Err(format!("ν = {nu}: coefficient at origin {k0}"));
        }
        at_origin.push(k0);
        if nu == 0.0 {
            let verdict = cartan_core::is_zero(&k, &SampleBox::cube(4, -3.0, 3.0, 200, 1).unwrap(), &TolerancePolicy::default())
                .map_err(|err| err.to_string())?;
            if !verdict.is_zero() {
                return Err("ν = 0 parity is not identically zero".into());
            }
        }
    }
    check(
        worst <= PARITY_TOL,
        format!("finite-difference gap {worst:.1e}, origin values {at_origin:?}"),
        format!("finite-difference gap {worst:e}"),
    )
}

// 11 -----------------------------------------------------------------------

fn holder_closedness() -> Outcome {
    let mut worst_dj = 0.0f64;
    let mut worst_div = 0.0f64;
    let mut admitted = 0;
    for n in [2usize, 3] {
        let c = names(n);
        let v = VectorField::new(&c, (0..n).map(ScalarExpr::var).collect()).unwrap();
        let sig = SignatureSpec::euclidean(n);
        let lambda = sig.lambda_expr(v.components(), n as f64);
        let pol = TolerancePolicy::default().excluding(lambda, HOLDER_LAMBDA_MIN);
        let pts = pol.admitted_points(&SampleBox::cube(n, -2.0, 2.0, 200, 3).unwrap());
        admitted += pts.len();
        let j = holder_current(&v, &sig).map_err(|e| e.to_string())?;
        worst_dj = worst_dj.max(max_abs_on(&j.ext_d(), &pts));
        let w = cofactor_adjoint_current(&v, &sig).map_err(|e| e.to_string())?;
        let div = w.divergence();
        for p in &pts {
            worst_div = worst_div.max(div.eval(p).unwrap().abs());
        }
    }
    check(
        worst_dj <= HOLDER_TOL && worst_div <= HOLDER_TOL && admitted > 100,
        format!("max |dJ| {worst_dj:.1e}, max |div W| {worst_div:.1e} over {admitted} points"),
        format!("|dJ| {worst_dj:e}, |div W| {worst_div:e}"),
    )
}

// 12 -----------------------------------------------------------------------

fn euler_extremal() -> Outcome {
    let c = names(4);
    let e = |s| parse_expr(s, &c).unwrap();
    let f = FluidState::new(&c, Vec3::new([e("-y"), e("x"), e("0")]), e("(x^2 + y^2)/2"), 0.0).unwrap();
    let residual = euler_residual(&f).max_abs_on(&points(4, 200, 12));
    let bx = SampleBox::cube(4, -1.0, 1.0, 100, 12).unwrap();
    let class = classify_process(&f.flow(), &f.action(), &bx, &TolerancePolicy::default(), None).map_err(|e| e.to_string())?;
    check(
        residual <= EULER_TOL && class == ProcessClass::Extremal,
        format!("residual {residual:.1e}, class {class:?}"),
        format!("residual {residual:e}, class {class:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("table reproduction", Duration::from_secs(1), table_reproduction),
        ("d as limit operator", Duration::from_secs(1), d_is_limit_operator),
        ("Poincaré lemma and graded Leibniz", Duration::from_secs(10), poincare_and_leibniz),
        ("continuity theorem", Duration::from_secs(5), continuity_theorem),
        ("Pfaff dimension fixtures", Duration::from_secs(2), pfaff_fixtures),
        ("torsion-current identity", Duration::from_secs(5), torsion_identity),
        ("circulation", Duration::from_secs(2), circulation),
        ("Gauss linking", Duration::from_secs(20), gauss_linking_criterion),
        ("braid integral", Duration::from_secs(30), braid),
        ("Navier-Stokes parity", Duration::from_secs(5), ns_parity_criterion),
        ("Hölder-current closedness", Duration::from_secs(5), holder_closedness),
        ("Euler extremal fixture", Duration::from_secs(2), euler_extremal),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; over budget ({elapsed:.2?} > {budget:?})")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}) [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
