//! Report assembly. The machine format is JSON with sorted keys; the text
//! format is a plain listing meant for terminals and diffs.

use std::fmt::Write;

use cartan_core::{Context, FiniteTopology, PointSet, QuadratureResult, ScalarExpr, Vec3, Witness};
use serde_json::{json, Map, Value};

pub struct Report {
    pub command: &'static str,
    pub body: Map<String, Value>,
    pub text: String,
    pub warnings: Vec<String>,
    pub inconclusive: bool,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, body: Map::new(), text: String::new(), warnings: Vec::new(), inconclusive: false }
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.body.insert(key.to_string(), value);
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
        self.inconclusive = true;
    }

    pub fn machine(&self) -> String {
        let mut doc = self.body.clone();
        doc.insert("command".into(), json!(self.command));
        doc.insert("warnings".into(), json!(self.warnings));
        // serde_json's default map is ordered by key, so output is stable
        let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("report values are serializable");
        out.push('\n');
        out
    }

    pub fn human(&self) -> String {
        let mut out = format!("== cartan {} ==\n", self.command);
        out.push_str(&self.text);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

/// JSON number, or `null` for values JSON cannot carry.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x + 0.0)
    } else {
        Value::Null
    }
}

pub fn expr(e: &ScalarExpr, ctx: &Context) -> String {
    e.display(ctx.names()).to_string()
}

pub fn vec3(v: &Vec3, ctx: &Context) -> [String; 3] {
    [0, 1, 2].map(|i| expr(&v.components()[i], ctx))
}

pub fn witness(w: Option<&Witness>) -> Value {
    w.map_or(Value::Null, |w| json!({ "point": w.point.iter().map(|x| num(*x)).collect::<Vec<_>>(), "value": num(w.value) }))
}

/// Largest finite `|e|` over the points; points where `e` fails are skipped.
pub fn max_abs(e: &ScalarExpr, points: &[Vec<f64>]) -> f64 {
    points.iter().filter_map(|p| e.eval(p).ok()).filter(|v| v.is_finite()).fold(0.0, |m, v| m.max(v.abs()))
}

pub fn quadrature(r: &QuadratureResult) -> Value {
    json!({
        "value": num(r.value),
        "error_estimate": r.error_estimate.map_or(Value::Null, num),
        "converged": r.converged,
        "table": r.table.iter().map(|l| json!({ "panels": l.panels, "value": num(l.value) })).collect::<Vec<_>>(),
    })
}

pub fn quadrature_text(r: &QuadratureResult) -> String {
    let mut s = String::new();
    for l in &r.table {
        let _ = writeln!(s, "    {:>6} panels  {:+.15e}", l.panels, l.value);
    }
    let est = r.error_estimate.map_or("n/a".to_string(), |e| format!("{e:.3e}"));
    let _ = write!(s, "    value {:+.15e}  error estimate {est}  converged {}", r.value, r.converged);
    s
}

fn sorted_sets(t: &FiniteTopology, mut sets: Vec<PointSet>) -> Vec<String> {
    sets.sort_by_key(|s| (s.len(), s.0));
    sets.into_iter().map(|s| t.render(s)).collect()
}

pub fn topology(t: &FiniteTopology) -> Value {
    let d_map: Map<String, Value> =
        t.labels().iter().zip(t.d_map()).map(|(l, d)| (l.clone(), json!(t.render(*d)))).collect();
    json!({
        "points": t.labels(),
        "opens": sorted_sets(t, t.opens().to_vec()),
        "closeds": sorted_sets(t, t.closeds()),
        "clopen": sorted_sets(t, t.clopen_sets()),
        "d_map": d_map,
        "d_is_limit_operator": t.verify_d_is_limit_operator(),
        "connected": t.is_connected(),
        "table": t.rendered_table(),
    })
}

pub fn topology_text(t: &FiniteTopology) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "carrier {{{}}}", t.labels().join(", "));
    let _ = writeln!(s, "open:   {}", sorted_sets(t, t.opens().to_vec()).join("  "));
    let _ = writeln!(s, "closed: {}", sorted_sets(t, t.closeds()).join("  "));
    let _ = writeln!(s, "connected: {}", t.is_connected());
    let rows = t.rendered_table();
    let width = rows.iter().flat_map(|r| [&r.subset, &r.limit_points, &r.interior, &r.boundary, &r.closure]).map(|c| c.chars().count()).max().unwrap_or(1).max(8);
    let cell = |c: &str| format!("{c}{}", " ".repeat(width - c.chars().count()));
    let _ = writeln!(s, "{} {} {} {} {}", cell("subset"), cell("limit"), cell("interior"), cell("boundary"), cell("closure"));
    for r in &rows {
        let _ = writeln!(s, "{} {} {} {} {}", cell(&r.subset), cell(&r.limit_points), cell(&r.interior), cell(&r.boundary), cell(&r.closure));
    }
    s
}
