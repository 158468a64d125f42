use cartan_core::physics::{helmholtz_residual, ns_residual};
use cartan_core::{
    analyze, braid_integral, build_cartan_topology, cartan_topology, circulate, classify_process, em_fields, euler_residual,
    gauss_linking, helicity_diagnostics, map_continuous, master_residuals, maxwell_faraday_residual, ns_parity,
    pfaff_sequence, torsion_current, Chain3, Connectedness, Context, FiniteTopology, ProcessClass, QuadratureResult,
    SampleBox, ScalarExpr, TolerancePolicy, Vec3,
};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use crate::error::CliError;
use crate::input::{Input, Physics};
use crate::report::{self, expr, max_abs, num, Report};

fn check_converged(r: &mut Report, what: &str, q: &QuadratureResult) {
    if !q.converged {
        r.warn(format!("{what}: quadrature did not meet its tolerance (estimate {:?})", q.error_estimate));
    }
}

pub fn analyze_cmd(input: &Input) -> Result<Report, CliError> {
    let form = input.one_form()?;
    let ctx = form.context().clone();
    let bx = input.sample_box(&ctx)?;
    let pol = input.policy(&ctx)?;
    let a = analyze(&form, &bx, &pol)?;
    let mut r = Report::new("analyze");
    r.insert("variables", json!(ctx.names()));
    r.insert("one_form", json!(form.to_string()));
    r.line(format!("variables: {}", ctx.names().join(", ")));
    r.line(format!("A = {form}"));

    let mut seq = Vec::new();
    r.line("Pfaff sequence:");
    for el in &a.sequence.elements {
        seq.push(json!({
            "label": el.label,
            "degree": el.degree(),
            "nonvanishing": el.nonvanishing(),
            "form": el.form.to_string(),
            "witness": report::witness(el.verdict.witness()),
        }));
        let status = match el.verdict.witness() {
            Some(w) => format!("nonzero, |value| {:.3e} at {:?}", w.value.abs(), w.point),
            None => "vanishes on the box".to_string(),
        };
        r.line(format!("  {} (degree {}): {status}", el.label, el.degree()));
        r.line(format!("    {}", el.form));
    }

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in &a.pointwise {
        *counts.entry(p.dimension.map_or("excluded".to_string(), |d| d.to_string())).or_default() += 1;
    }
    let varying = counts.keys().filter(|k| *k != "excluded").count() > 1;
    r.insert(
        "pfaff",
        json!({ "dimension": a.dimension, "sequence": seq, "pointwise": counts, "dimension_varies": varying }),
    );
    r.line(format!("Pfaff dimension: {}", a.dimension));
    r.line(format!("pointwise dimensions: {counts:?}"));

    r.insert(
        "torsion",
        a.torsion.as_ref().map_or(Value::Null, |t| json!({ "t": report::vec3(&t.t, &ctx), "h": expr(&t.h, &ctx) })),
    );
    if let Some(t) = &a.torsion {
        let [tx, ty, tz] = report::vec3(&t.t, &ctx);
        r.line(format!("torsion current T = ({tx}, {ty}, {tz})"));
        r.line(format!("helicity density h = {}", expr(&t.h, &ctx)));
    }
    r.insert("parity", a.parity.as_ref().map_or(Value::Null, |p| json!(expr(p, &ctx))));
    if let Some(p) = &a.parity {
        r.line(format!("parity coefficient (dA∧dA) = {}", expr(p, &ctx)));
    }
    let verdict = match a.connectedness {
        Connectedness::Connected => "connected",
        Connectedness::Disconnected => "disconnected",
    };
    r.insert("connectedness", json!(verdict));
    r.line(format!("Cartan topology: {verdict}"));
    r.insert("topology", a.topology.as_ref().map_or(Value::Null, report::topology));
    if let Some(t) = &a.topology {
        r.text.push_str(&report::topology_text(t));
    }
    Ok(r)
}

pub fn topology_cmd(input: Option<&Input>) -> Result<Report, CliError> {
    let mut r = Report::new("topology");
    let spec = input.and_then(|i| i.file.topology.as_ref());
    let t: FiniteTopology = match input {
        Some(i) if i.file.one_form.is_some() => {
            let form = i.one_form()?;
            let ctx = form.context().clone();
            let seq = pfaff_sequence(&form, &i.sample_box(&ctx)?, &i.policy(&ctx)?)?;
            r.insert("one_form", json!(form.to_string()));
            r.line(format!("A = {form}, Pfaff dimension {}", seq.dimension()));
            if seq.dimension() == 0 {
                return Err(CliError::Input("the 1-form vanishes on the box; no topology to build".into()));
            }
            build_cartan_topology(&seq)?
        }
        _ => cartan_topology(spec.and_then(|s| s.points).unwrap_or(4))?,
    };
    r.insert("topology", report::topology(&t));
    r.text.push_str(&report::topology_text(&t));
    let mut maps = Vec::new();
    for m in spec.map_or(&[][..], |s| &s.maps) {
        let continuous = map_continuous(&t, &t, m)?;
        let rendered: Vec<String> = m.iter().map(|&j| t.labels()[j].clone()).collect();
        r.line(format!("map {} -> {}: {}", t.labels().join(""), rendered.join(""), if continuous { "continuous" } else { "not continuous" }));
        maps.push(json!({ "images": rendered, "continuous": continuous }));
    }
    r.insert("maps", json!(maps));
    Ok(r)
}

pub fn circulate_cmd(input: &Input) -> Result<Report, CliError> {
    let form = input.one_form()?;
    let ctx = form.context().clone();
    let curves = input.curves(ctx.len(), input.file.curves.len().max(1))?;
    let q = input.quadrature()?;
    let mut r = Report::new("circulate");
    r.insert("one_form", json!(form.to_string()));
    r.line(format!("A = {form}"));
    let mut out = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let res = circulate(&form, c, &q)?;
        check_converged(&mut r, &format!("curve {i}"), &res);
        r.line(format!("curve {i}: circulation {:+.12}", res.value));
        r.line(report::quadrature_text(&res));
        out.push(report::quadrature(&res));
    }
    r.insert("circulation", json!(out));
    Ok(r)
}

fn ambient(input: &Input) -> Result<usize, CliError> {
    match &input.file.variables {
        None => Ok(3),
        Some(_) => Ok(input.context()?.len()),
    }
}

pub fn link_cmd(input: &Input) -> Result<Report, CliError> {
    let dim = ambient(input)?;
    let curves = input.curves(dim, 2)?;
    let sig = input.signature(dim)?;
    let q = input.quadrature()?;
    let res = gauss_linking(&curves[0], &curves[1], &sig, &q)?;
    let nearest = res.value.round();
    let residual = (res.value - nearest).abs();
    let mut r = Report::new("link");
    check_converged(&mut r, "linking integral", &res);
    let mut body = report::quadrature(&res);
    body["nearest_integer"] = num(nearest);
    body["residual"] = num(residual);
    r.insert("linking", body);
    r.line(format!("linking integral {:+.12}", res.value));
    r.line(format!("nearest integer {nearest}, residual {residual:.3e}"));
    r.line(report::quadrature_text(&res));
    Ok(r)
}

pub fn braid_cmd(input: &Input) -> Result<Report, CliError> {
    let curves = input.curves(3, 3)?;
    let sig = input.signature(4)?;
    let q = input.quadrature()?;
    let e_over_c = input.e_over_c();
    let chain = Chain3::from_loops(&curves[0], &curves[1], &curves[2])?;
    let res = braid_integral(&chain, e_over_c, &sig, &q)?;
    let mut r = Report::new("braid");
    check_converged(&mut r, "braid integral", &res);
    let mut body = report::quadrature(&res);
    body["e_over_c"] = num(e_over_c);
    r.insert("braid", body);
    r.line(format!("braid integral (E/c = {e_over_c}) {:+.12e}", res.value));
    r.line(report::quadrature_text(&res));
    Ok(r)
}

fn field_summary(v: &Vec3, ctx: &Context, points: &[Vec<f64>]) -> Value {
    json!({ "expr": report::vec3(v, ctx), "max_abs": num(v.components().iter().map(|c| max_abs(c, points)).fold(0.0, f64::max)) })
}

fn scalar_summary(e: &ScalarExpr, ctx: &Context, points: &[Vec<f64>]) -> Value {
    let origin = e.eval(&vec![0.0; ctx.len()]).map_or(Value::Null, num);
    json!({ "expr": expr(e, ctx), "max_abs": num(max_abs(e, points)), "at_origin": origin })
}

fn class_name(c: ProcessClass) -> &'static str {
    match c {
        ProcessClass::Extremal => "extremal",
        ProcessClass::BernoulliCasimir => "bernoulli_casimir",
        ProcessClass::SymplecticClosed => "symplectic_closed",
        ProcessClass::NonUniform => "non_uniform",
    }
}

fn points_of(bx: &SampleBox, pol: &TolerancePolicy) -> Result<Vec<Vec<f64>>, CliError> {
    let pts = pol.admitted_points(bx);
    if pts.is_empty() {
        return Err(CliError::Inconclusive(format!("inconclusive: all {} sample points are excluded", bx.samples())));
    }
    Ok(pts)
}

pub fn physics_cmd(input: &Input) -> Result<Report, CliError> {
    let (ctx, physics) = input.physics()?;
    let bx = input.sample_box(&ctx)?;
    let pol = input.policy(&ctx)?;
    let pts = points_of(&bx, &pol)?;
    let mut r = Report::new("physics");
    let mut body = Map::new();
    match physics {
        Physics::Fluid { state, theta } => {
            let parity = ns_parity(&state);
            let ns = ns_residual(&state);
            let class = classify_process(&state.flow(), &state.action(), &bx, &pol, theta.as_ref())?;
            let hel = helicity_diagnostics(&state, &bx, &pol)?;
            body.insert("kind".into(), json!("fluid"));
            body.insert("nu".into(), num(state.nu()));
            body.insert("vorticity".into(), json!(report::vec3(&state.vorticity(), &ctx)));
            body.insert("euler_residual".into(), field_summary(&euler_residual(&state), &ctx, &pts));
            body.insert("helmholtz_residual".into(), field_summary(&helmholtz_residual(&state), &ctx, &pts));
            body.insert("ns_residual".into(), field_summary(&ns.residual, &ctx, &pts));
            body.insert("divergence".into(), scalar_summary(&ns.divergence, &ctx, &pts));
            body.insert("parity".into(), scalar_summary(&parity, &ctx, &pts));
            body.insert("process_class".into(), json!(class_name(class)));
            body.insert(
                "helicity".into(),
                json!({
                    "h": expr(&hel.h, &ctx),
                    "t": report::vec3(&hel.t, &ctx),
                    "conservation_residual": scalar_summary(&hel.conservation_residual, &ctx, &pts),
                    "four_form_vanishes": hel.dh.is_zero(),
                    "witness": report::witness(hel.dh.witness()),
                }),
            );
            r.line(format!("fluid, ν = {}", state.nu()));
            r.line(format!("process class: {}", class_name(class)));
            r.line(format!("max |Euler residual| {:.3e}", body["euler_residual"]["max_abs"].as_f64().unwrap_or(f64::NAN)));
            r.line(format!("max |Navier-Stokes residual| {:.3e}", body["ns_residual"]["max_abs"].as_f64().unwrap_or(f64::NAN)));
            r.line(format!("parity coefficient K = {}", expr(&parity, &ctx)));
            if let Some(k0) = body["parity"]["at_origin"].as_f64() {
                r.line(format!("K at origin = {k0}"));
            }
            r.line(format!("helicity 4-form vanishes: {}", hel.dh.is_zero()));
        }
        Physics::Em { potentials, velocity } => {
            let fields = em_fields(&potentials);
            let (curl, div_b) = maxwell_faraday_residual(&potentials);
            let tc = torsion_current(&potentials.one_form())?;
            let f = potentials.one_form().ext_d();
            let parity = f.wedge(&f).map_err(|e| CliError::Input(e.to_string()))?.coefficient(&[0, 1, 2, 3]);
            body.insert("kind".into(), json!("em"));
            body.insert("e".into(), json!(report::vec3(&fields.e, &ctx)));
            body.insert("b".into(), json!(report::vec3(&fields.b, &ctx)));
            body.insert("faraday_residual".into(), field_summary(&curl, &ctx, &pts));
            body.insert("div_b".into(), scalar_summary(&div_b, &ctx, &pts));
            body.insert("torsion".into(), json!({ "t": report::vec3(&tc.t, &ctx), "h": expr(&tc.h, &ctx) }));
            body.insert("parity".into(), scalar_summary(&parity, &ctx, &pts));
            let [ex, ey, ez] = report::vec3(&fields.e, &ctx);
            let [bx_, by, bz] = report::vec3(&fields.b, &ctx);
            r.line(format!("E = ({ex}, {ey}, {ez})"));
            r.line(format!("B = ({bx_}, {by}, {bz})"));
            r.line(format!("max |curl E + ∂B/∂t| {:.3e}", body["faraday_residual"]["max_abs"].as_f64().unwrap_or(f64::NAN)));
            r.line(format!("parity coefficient F∧F = {}", expr(&parity, &ctx)));
            if let Some(v) = velocity {
                let (r1, r2) = master_residuals(&potentials, &v);
                body.insert("master_residuals".into(), json!({ "curl": field_summary(&r1, &ctx, &pts), "time": field_summary(&r2, &ctx, &pts) }));
            }
        }
    }
    r.insert("physics", Value::Object(body));
    Ok(r)
}
