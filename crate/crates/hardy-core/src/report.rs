//! Deterministic report rendering.
//!
//! Reports are rendered by a hand-rolled writer with a fixed key order
//! and fixed float formatting (17 significant digits, so every `f64`
//! round-trips exactly), making the bytes a pure function of scenario
//! and seed. Wall-clock timing never enters a report; the `wall_time`
//! slot is always `null` so reruns stay byte-identical.

use crate::functions::{Profile, TestFunction};
use crate::quad::radial::RadialFactor;
use crate::verifier::{FunctionRecord, Scenario, VerificationReport};

/// JSON value tree with deterministic ordering.
enum Val {
    Null,
    Bool(bool),
    Int(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Val>),
    Obj(Vec<(String, Val)>),
}

fn key(k: &str, v: Val) -> (String, Val) {
    (k.to_string(), v)
}

/// Fixed float rendering: finite values as scientific notation with 17
/// significant digits; non-finite values as quoted markers.
fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "\"nan\"".to_string()
    } else if v == f64::INFINITY {
        "\"inf\"".to_string()
    } else if v == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_val(v: &Val, out: &mut String, depth: usize) {
    let pad = "  ".repeat(depth);
    let pad_in = "  ".repeat(depth + 1);
    match v {
        Val::Null => out.push_str("null"),
        Val::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Val::Int(n) => out.push_str(&n.to_string()),
        Val::Num(x) => out.push_str(&fmt_f64(*x)),
        Val::Str(s) => out.push_str(&escape(s)),
        Val::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad_in);
                write_val(item, out, depth + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push(']');
        }
        Val::Obj(pairs) => {
            if pairs.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in pairs.iter().enumerate() {
                out.push_str(&pad_in);
                out.push_str(&escape(k));
                out.push_str(": ");
                write_val(item, out, depth + 1);
                if i + 1 < pairs.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
    }
}

fn factor_val(f: &RadialFactor) -> Val {
    Val::Obj(vec![
        key("coeff", Val::Num(f.coeff)),
        key("power", Val::Num(f.power)),
        key("decay", Val::Num(f.decay)),
    ])
}

fn opt_num(v: Option<f64>) -> Val {
    match v {
        Some(x) => Val::Num(x),
        None => Val::Null,
    }
}

fn profile_val(u: &TestFunction) -> Val {
    let mut pairs = vec![key("id", Val::Str(u.id.clone()))];
    match u.profile() {
        Profile::Tent { foot, peak, head } => {
            pairs.push(key("profile", Val::Str("tent".into())));
            pairs.push(key("foot", Val::Num(*foot)));
            pairs.push(key("peak", Val::Num(*peak)));
            pairs.push(key("head", Val::Num(*head)));
        }
        Profile::TruncatedPower { exponent, foot, head, ramp } => {
            pairs.push(key("profile", Val::Str("truncated_power".into())));
            pairs.push(key("exponent", Val::Num(*exponent)));
            pairs.push(key("foot", Val::Num(*foot)));
            pairs.push(key("head", Val::Num(*head)));
            pairs.push(key("ramp", Val::Num(*ramp)));
        }
        Profile::GaussianRing { center, width } => {
            pairs.push(key("profile", Val::Str("gaussian_ring".into())));
            pairs.push(key("center", Val::Num(*center)));
            pairs.push(key("width", Val::Num(*width)));
        }
        Profile::Indicator { foot, head } => {
            pairs.push(key("profile", Val::Str("indicator".into())));
            pairs.push(key("foot", Val::Num(*foot)));
            pairs.push(key("head", Val::Num(*head)));
        }
        Profile::Steps { edges, values } => {
            pairs.push(key("profile", Val::Str("steps".into())));
            pairs.push(key("edges", Val::Arr(edges.iter().map(|e| Val::Num(*e)).collect())));
            pairs.push(key("values", Val::Arr(values.iter().map(|v| Val::Num(*v)).collect())));
        }
    }
    pairs.push(key("amp", Val::Num(u.amp())));
    pairs.push(key("angular_eps", Val::Num(u.angular_eps())));
    Val::Obj(pairs)
}

fn record_val(r: &FunctionRecord) -> Val {
    Val::Obj(vec![
        key("id", Val::Str(r.id.clone())),
        key("lhs", Val::Num(r.lhs)),
        key("lhs_err", Val::Num(r.lhs_err)),
        key("rhs", Val::Num(r.rhs)),
        key("rhs_err", Val::Num(r.rhs_err)),
        key("ratio", Val::Num(r.ratio)),
        key("margin", Val::Num(r.margin)),
        key("verdict", Val::Str(r.verdict.name().into())),
        key("note", Val::Str(r.note.clone())),
        key("evaluations", Val::Int(r.evaluations)),
    ])
}

fn scenario_val(sc: &Scenario) -> Val {
    let w = &sc.weights;
    Val::Obj(vec![
        key("theorem", Val::Str(sc.theorem.name().into())),
        key(
            "group",
            Val::Obj(vec![
                key("name", Val::Str(sc.group.law().name().into())),
                key("nu", Val::Arr(sc.group.nu().iter().map(|n| Val::Num(*n)).collect())),
                key("homogeneous_dim", Val::Num(sc.group.homogeneous_dim())),
            ]),
        ),
        key("qnorm", Val::Str(sc.qnorm.name().into())),
        key(
            "exponents",
            Val::Obj(vec![
                key("p", Val::Num(sc.p)),
                key("q", Val::Num(sc.q)),
                key("s", Val::Num(sc.s)),
            ]),
        ),
        key(
            "weights",
            Val::Obj(vec![
                key(
                    "pair",
                    Val::Obj(vec![
                        key("x", factor_val(&w.pair.x_factor)),
                        key("y", factor_val(&w.pair.y_factor)),
                        key("diff_power", Val::Num(w.pair.diff_power)),
                    ]),
                ),
                key("v", factor_val(&w.v)),
                key("z", factor_val(&w.z)),
                key("g", factor_val(&w.g)),
                key("h", factor_val(&w.h)),
                key("alpha", opt_num(w.alpha)),
                key("beta", opt_num(w.beta)),
            ]),
        ),
        key("corpus", Val::Arr(sc.corpus.iter().map(profile_val).collect())),
        key(
            "quadrature",
            Val::Obj(vec![
                key("budget", Val::Int(sc.budget)),
                key("r_min_mult", Val::Num(sc.scheme.r_min_mult)),
                key("r_max_mult", Val::Num(sc.scheme.r_max_mult)),
                key("y_lo_mult", Val::Num(sc.scheme.y_lo_mult)),
                key("far_mult", Val::Num(sc.scheme.far_mult)),
                key("inner_dense", Val::Num(sc.scheme.inner_dense)),
                key("inner_sparse", Val::Num(sc.scheme.inner_sparse)),
                key("outer_dense", Val::Num(sc.scheme.outer_dense)),
                key("outer_sparse", Val::Num(sc.scheme.outer_sparse)),
                key("order", Val::Int(sc.scheme.order as u64)),
                key("grade_levels", Val::Int(sc.scheme.grade_levels as u64)),
            ]),
        ),
        key("seed", Val::Int(sc.seed)),
    ])
}

/// Renders the full report as deterministic JSON.
pub fn render_json(sc: &Scenario, rep: &VerificationReport) -> String {
    let gates = rep
        .gates
        .iter()
        .map(|g| {
            Val::Obj(vec![
                key("name", Val::Str(g.name.clone())),
                key("value", Val::Num(g.value)),
                key("required", Val::Bool(g.required)),
                key("pass", Val::Bool(g.pass)),
            ])
        })
        .collect();
    let constants = rep
        .constants
        .iter()
        .map(|c| {
            Val::Obj(vec![key("name", Val::Str(c.name.clone())), key("value", Val::Num(c.value))])
        })
        .collect();
    let search = match &rep.search {
        None => Val::Null,
        Some(s) => Val::Obj(vec![
            key("best_value", Val::Num(s.best_value)),
            key("best_params", Val::Arr(s.best_params.iter().map(|p| Val::Num(*p)).collect())),
            key("evaluations", Val::Int(s.evaluations)),
            key("converged", Val::Bool(s.converged)),
            key(
                "trace",
                Val::Arr(
                    s.trace
                        .iter()
                        .map(|(params, value)| {
                            Val::Obj(vec![
                                key(
                                    "params",
                                    Val::Arr(params.iter().map(|p| Val::Num(*p)).collect()),
                                ),
                                key("value", Val::Num(*value)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ]),
    };
    let root = Val::Obj(vec![
        key(
            "meta",
            Val::Obj(vec![
                key("tool", Val::Str("hardy".into())),
                key("format", Val::Int(1)),
                key("seed", Val::Int(sc.seed)),
                key("wall_time", Val::Null),
            ]),
        ),
        key("scenario", scenario_val(sc)),
        key("applicable", Val::Bool(rep.applicable)),
        key("gates", Val::Arr(gates)),
        key("constants", Val::Arr(constants)),
        key("results", Val::Arr(rep.results.iter().map(record_val).collect())),
        key("substeps", Val::Arr(rep.substeps.iter().map(record_val).collect())),
        key("search", search),
        key("evaluations", Val::Int(rep.evaluations)),
        key("verdict", Val::Str(rep.worst_verdict().name().into())),
    ]);
    let mut out = String::new();
    write_val(&root, &mut out, 0);
    out.push('\n');
    out
}

/// CSV float rendering: same digits as JSON, bare markers for
/// non-finite values.
fn csv_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_record(kind: &str, r: &FunctionRecord, row: &mut Vec<String>) {
    row.extend([
        kind.to_string(),
        csv_cell(&r.id),
        String::new(),
        csv_f64(r.lhs),
        csv_f64(r.lhs_err),
        csv_f64(r.rhs),
        csv_f64(r.rhs_err),
        csv_f64(r.ratio),
        csv_f64(r.margin),
        r.verdict.name().to_string(),
        String::new(),
        String::new(),
        csv_cell(&r.note),
        r.evaluations.to_string(),
    ]);
}

/// Renders the report as a flat CSV with one row per gate, constant,
/// result, substep, and a final summary row.
pub fn render_csv(rep: &VerificationReport) -> String {
    let mut out = String::new();
    out.push_str(
        "kind,id,value,lhs,lhs_err,rhs,rhs_err,ratio,margin,verdict,required,pass,note,evaluations\n",
    );
    let blank = || vec![String::new(); 0];
    let mut push_row = |cells: Vec<String>| {
        out.push_str(&cells.join(","));
        out.push('\n');
    };
    for g in &rep.gates {
        let mut row = blank();
        row.extend([
            "gate".to_string(),
            csv_cell(&g.name),
            csv_f64(g.value),
        ]);
        row.extend(vec![String::new(); 6]);
        row.push(String::new());
        row.push(g.required.to_string());
        row.push(g.pass.to_string());
        row.extend([String::new(), String::new()]);
        push_row(row);
    }
    for c in &rep.constants {
        let mut row = blank();
        row.extend(["constant".to_string(), csv_cell(&c.name), csv_f64(c.value)]);
        row.extend(vec![String::new(); 11]);
        push_row(row);
    }
    for r in &rep.results {
        let mut row = blank();
        csv_record("result", r, &mut row);
        push_row(row);
    }
    for r in &rep.substeps {
        let mut row = blank();
        csv_record("substep", r, &mut row);
        push_row(row);
    }
    let mut summary = vec![
        "summary".to_string(),
        rep.theorem.name().to_string(),
        String::new(),
    ];
    summary.extend(vec![String::new(); 6]);
    summary.push(rep.worst_verdict().name().to_string());
    summary.extend([String::new(), String::new(), String::new()]);
    summary.push(rep.evaluations.to_string());
    push_row(summary);
    out
}
