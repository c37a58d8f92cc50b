//! Library side of the `linkvol` command: solve a diagram, run the
//! twist-knot pipeline, check the triangulation, and reproduce the
//! reference tables. Every command returns both a JSON value and a text
//! rendering together with its exit code.

pub mod reference;
mod tables;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use linkvol::potential::{PotentialFunction, SolutionPoint, Tolerances, VolumeReport};
use linkvol::solver::{projective_normalize, search, SearchConfig};
use linkvol::triangulation::VertexClass;
use linkvol::{
    full_report, parse_pd, twist_knot_diagram, twist_solutions, DiagramError, EdgeLabel, LinkDiagram, Triangulation,
};
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use tables::cmd_tables;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Twist,
    Check,
    Tables,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Twist => "twist",
            Command::Check => "check",
            Command::Tables => "tables",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub n: Option<i64>,
    pub n_starts: usize,
    pub seed: u64,
    pub radius: f64,
    pub tolerances: Tolerances,
    /// Point to evaluate instead of searching (`check` only).
    pub at: Option<Vec<Complex64>>,
    pub timestamp: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input_path: None,
            n: None,
            n_starts: 500,
            seed: 0,
            radius: 10.0,
            tolerances: Tolerances::default(),
            at: None,
            timestamp: true,
        }
    }

    pub fn search_config(&self) -> SearchConfig {
        let mut c =
            SearchConfig { n_starts: self.n_starts, seed: self.seed, radius: self.radius, ..Default::default() };
        c.newton.tol = self.tolerances;
        c
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Parse(#[from] DiagramError),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub exit_code: i32,
}

impl Output {
    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
            s.push('\n');
            s
        } else {
            self.text.clone()
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.command {
        Command::Solve => cmd_solve(cfg),
        Command::Twist => cmd_twist(cfg),
        Command::Check => cmd_check(cfg),
        Command::Tables => cmd_tables(cfg),
    }
}

/// Real number rounded to 15 significant digits; non-finite values become
/// `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.14e}").parse().expect("formatted float");
    json!(r)
}

pub fn cnum(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn header(cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(cfg.command.name()));
    if cfg.timestamp {
        m.insert("timestamp".into(), json!(chrono::Utc::now().to_rfc3339()));
    }
    m
}

fn tolerances_json(t: &Tolerances) -> Value {
    json!({ "solve": num(t.solve), "flat": num(t.flat), "ess": num(t.ess) })
}

fn search_json(cfg: &RunConfig) -> Value {
    json!({
        "starts": cfg.n_starts,
        "seed": cfg.seed,
        "radius": num(cfg.radius),
        "tolerances": tolerances_json(&cfg.tolerances),
    })
}

/// `re,im;re,im;...`; a lone number is a real coordinate.
pub fn parse_at(s: &str) -> Result<Vec<Complex64>, CliError> {
    let bad = |item: &str| CliError::Usage(format!("--at: cannot read `{item}` as `re,im`"));
    s.split(';')
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(',').map(str::trim).collect();
            let f = |p: &str| p.parse::<f64>().map_err(|_| bad(item));
            match parts.as_slice() {
                [re] => Ok(Complex64::new(f(re)?, 0.0)),
                [re, im] => Ok(Complex64::new(f(re)?, f(im)?)),
                _ => Err(bad(item)),
            }
        })
        .collect()
}

fn load_diagram(cfg: &RunConfig) -> Result<(String, LinkDiagram), CliError> {
    let path = cfg
        .input_path
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("{} needs --input <file>", cfg.command.name())))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Ok((path.display().to_string(), parse_pd(&text)?))
}

fn diagram_json(d: &LinkDiagram) -> Value {
    json!({
        "crossings": d.crossings().len(),
        "sides": d.n_sides(),
        "components": d.n_components(),
        "alternating": d.is_alternating(),
    })
}

fn diagram_line(name: &str, d: &LinkDiagram) -> String {
    format!(
        "{name}: {} crossings, {} sides, {} component{}, {}\n",
        d.crossings().len(),
        d.n_sides(),
        d.n_components(),
        if d.n_components() == 1 { "" } else { "s" },
        if d.is_alternating() { "alternating" } else { "non-alternating" }
    )
}

fn empty_note(starts: usize) -> String {
    format!("S is empty: no essential solution of H was found from {starts} starts")
}

struct Evaluated {
    z: Vec<Complex64>,
    r: Vec<i64>,
    report: VolumeReport,
    max_residual: f64,
}

fn evaluate(
    pf: &PotentialFunction,
    tri: &Triangulation,
    p: &SolutionPoint,
    tol: &Tolerances,
) -> Result<Evaluated, CliError> {
    let z = projective_normalize(&p.z);
    let report = full_report(pf, tri, &z, tol).map_err(numerical)?;
    let r = pf.flattening(&z, tol.flat).map_err(numerical)?;
    let max_residual = pf.max_residual(&z).map_err(numerical)?;
    Ok(Evaluated { z, r, report, max_residual })
}

fn v0_text(vol: f64, cs: f64) -> String {
    format!("i({vol:.6} {} {:.6} i)", if cs < 0.0 { '-' } else { '+' }, cs.abs())
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Output, CliError> {
    let (name, d) = load_diagram(cfg)?;
    let pf = PotentialFunction::build(&d);
    let tri = Triangulation::build(&d).map_err(numerical)?;
    let (set, gauge) = search(&pf, &cfg.search_config());

    let mut rows = Vec::with_capacity(set.len());
    for (i, p) in set.points.iter().enumerate() {
        rows.push((set.geometric_index == Some(i), evaluate(&pf, &tri, p, &cfg.tolerances)?));
    }
    rows.sort_by(|a, b| b.1.report.vol.total_cmp(&a.1.report.vol).then(a.1.report.cs.total_cmp(&b.1.report.cs)));

    let mut out = header(cfg);
    out.insert("input".into(), json!(name));
    out.insert("search".into(), search_json(cfg));
    out.insert("diagram".into(), diagram_json(&d));
    out.insert(
        "gauge".into(),
        json!({
            "pinned": gauge.pinned.iter().map(|(s, v)| json!({ "side": s.0, "value": cnum(*v) })).collect::<Vec<_>>(),
            "dropped_equations": gauge.dropped_equations.iter().map(|s| s.0).collect::<Vec<_>>(),
        }),
    );
    let solutions: Vec<Value> = rows
        .iter()
        .map(|(geometric, e)| {
            json!({
                "geometric": geometric,
                "z": e.z.iter().map(|w| cnum(*w)).collect::<Vec<_>>(),
                "r": e.r,
                "v0": cnum(e.report.v0),
                "vol": num(e.report.vol),
                "cs": num(e.report.cs),
                "bw_volume": e.report.bw_volume.map_or(Value::Null, num),
                "max_residual": num(e.max_residual),
                "max_gluing_residual": e.report.max_gluing_residual.map_or(Value::Null, num),
            })
        })
        .collect();
    out.insert("solutions".into(), Value::Array(solutions));

    let mut text = diagram_line(&name, &d);
    let pins: Vec<String> = gauge.pinned.keys().map(|s| s.0.to_string()).collect();
    let _ = writeln!(text, "gauge: pinned sides {}", pins.join(", "));
    let exit_code = if rows.is_empty() {
        let note = empty_note(cfg.n_starts);
        out.insert("note".into(), json!(note));
        let _ = writeln!(text, "{note}");
        EXIT_EMPTY
    } else {
        let _ = writeln!(text, "{} essential solution{}", rows.len(), if rows.len() == 1 { "" } else { "s" });
        let _ = writeln!(
            text,
            "  {:<4}{:>14}{:>14}{:>14}{:>12}{:>12}",
            "", "vol", "cs", "bw_volume", "max |h|", "max glue"
        );
        for (geometric, e) in &rows {
            let _ = writeln!(
                text,
                "  {:<4}{:>14.9}{:>14.9}{:>14.9}{:>12.1e}{:>12.1e}",
                if *geometric { "*" } else { "" },
                e.report.vol,
                e.report.cs,
                e.report.bw_volume.unwrap_or(f64::NAN),
                e.max_residual,
                e.report.max_gluing_residual.unwrap_or(f64::NAN),
            );
        }
        EXIT_OK
    };
    Ok(Output { json: Value::Object(out), text, exit_code })
}

pub fn cmd_twist(cfg: &RunConfig) -> Result<Output, CliError> {
    let n = cfg.n.ok_or_else(|| CliError::Usage("twist needs --n <n> with n >= 1".into()))?;
    if n < 1 {
        return Err(CliError::Usage(format!("twist needs n >= 1, got {n}")));
    }
    let rep = twist_solutions(n, &cfg.tolerances).map_err(numerical)?;
    let tri = Triangulation::build(&twist_knot_diagram(n)?).map_err(numerical)?;

    let mut out = header(cfg);
    out.insert("n".into(), json!(n));
    out.insert("tolerances".into(), tolerances_json(&cfg.tolerances));
    out.insert(
        "polynomial".into(),
        json!({
            "coefficients": rep.polynomial.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "text": rep.polynomial.to_string(),
        }),
    );
    out.insert(
        "sequence".into(),
        json!({
            "x": rep.sequence.x.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "y": rep.sequence.y.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        }),
    );
    let mut rows = Vec::with_capacity(rep.rows.len());
    let mut text = format!("T_{n}: {} = 0\n", rep.polynomial);
    for row in &rep.rows {
        let bw = tri.bw_volume(&row.point.z).map_err(numerical)?;
        rows.push(json!({
            "t": cnum(row.t),
            "geometric": row.geometric,
            "v0": cnum(row.report.v0),
            "vol": num(row.report.vol),
            "cs": num(row.report.cs),
            "bw_volume": num(bw),
            "max_residual": num(row.max_residual),
            "r": row.point.r,
        }));
        let _ = writeln!(
            text,
            "  t = {:>10.6} {} {:>9.6} i    V0 = {}{}",
            row.t.re,
            if row.t.im < 0.0 { '-' } else { '+' },
            row.t.im.abs(),
            v0_text(row.report.vol, row.report.cs),
            if row.geometric { "   geometric" } else { "" }
        );
    }
    out.insert("rows".into(), Value::Array(rows));
    Ok(Output { json: Value::Object(out), text, exit_code: EXIT_OK })
}

fn vertex_class_names(tri: &Triangulation) -> Vec<String> {
    let cusps: BTreeSet<usize> = tri
        .vertex_classes
        .iter()
        .flatten()
        .filter_map(|v| match v {
            VertexClass::Cusp(c) => Some(*c),
            _ => None,
        })
        .collect();
    let mut names = vec!["-inf".to_string(), "+inf".to_string()];
    names.extend((1..=cusps.len()).map(|i| format!("P{i}")));
    names
}

const LABELS: [(EdgeLabel, &str); 4] =
    [(EdgeLabel::A, "A"), (EdgeLabel::B, "B"), (EdgeLabel::C, "C"), (EdgeLabel::D, "D")];

fn label_name(l: EdgeLabel) -> &'static str {
    LABELS.iter().find(|(x, _)| *x == l).map(|(_, s)| *s).expect("label")
}

fn check_point(
    pf: &PotentialFunction,
    tri: &Triangulation,
    source: &str,
    z: &[Complex64],
    tol: &Tolerances,
    text: &mut String,
) -> Result<Value, CliError> {
    let residuals = tri.gluing_residuals(z).map_err(numerical)?;
    let mut by_label = Map::new();
    for (l, s) in LABELS {
        let m = residuals.iter().filter(|r| r.label == l).map(|r| r.residual).fold(f64::NAN, f64::max);
        by_label.insert(s.into(), num(m));
    }
    let max = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
    let bw = tri.bw_volume(z).ok();
    let v0 = pf.eval_v0(z, tol);
    let im_v0 = v0.as_ref().ok().map(|r| r.vol);
    let delta = bw.zip(im_v0).map(|(a, b)| (a - b).abs());

    let _ = writeln!(
        text,
        "  {source}: max gluing residual {max:.2e} (A {}, B {}, C {}, D {}), bw_volume {}, Im V0 {}, delta {}",
        sci(by_label["A"].as_f64()),
        sci(by_label["B"].as_f64()),
        sci(by_label["C"].as_f64()),
        sci(by_label["D"].as_f64()),
        fixed(bw),
        fixed(im_v0),
        sci(delta),
    );
    let mut v = json!({
        "source": source,
        "z": z.iter().map(|w| cnum(*w)).collect::<Vec<_>>(),
        "max_residual": num(max),
        "max_residual_by_label": Value::Object(by_label),
        "residuals": residuals
            .iter()
            .map(|r| json!({ "class": r.class, "label": label_name(r.label), "residual": num(r.residual) }))
            .collect::<Vec<_>>(),
        "bw_volume": bw.map_or(Value::Null, num),
        "im_v0": im_v0.map_or(Value::Null, num),
        "bw_minus_im_v0": delta.map_or(Value::Null, num),
    });
    if let Err(e) = v0 {
        v["v0_error"] = json!(e.to_string());
    }
    Ok(v)
}

fn sci(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map_or("-".into(), |v| format!("{v:.1e}"))
}

fn fixed(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map_or("-".into(), |v| format!("{v:.9}"))
}

pub fn cmd_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let (name, d) = load_diagram(cfg)?;
    let pf = PotentialFunction::build(&d);
    let tri = Triangulation::build(&d).map_err(numerical)?;
    let census = tri.census();
    let class_d = census.edge_labels.get(&EdgeLabel::D).copied().unwrap_or(0);

    let mut out = header(cfg);
    out.insert("input".into(), json!(name));
    out.insert("diagram".into(), diagram_json(&d));
    let labels: Map<String, Value> =
        LABELS.iter().map(|(l, s)| (s.to_string(), json!(census.edge_labels.get(l).copied().unwrap_or(0)))).collect();
    out.insert(
        "census".into(),
        json!({
            "tetrahedra": census.tetrahedra,
            "face_classes": census.face_classes,
            "edge_classes": census.edge_classes,
            "vertex_classes": vertex_class_names(&tri),
            "edge_labels": Value::Object(labels),
        }),
    );
    out.insert("class_d".into(), if class_d == 0 { json!("empty") } else { json!(class_d) });

    let mut text = diagram_line(&name, &d);
    let _ = writeln!(
        text,
        "census: {} tetrahedra, {} face classes, {} edge classes, vertex classes {{{}}}",
        census.tetrahedra,
        census.face_classes,
        census.edge_classes,
        vertex_class_names(&tri).join(", ")
    );
    let _ = writeln!(
        text,
        "edge labels: A {}, B {}, C {}, D {}",
        census.edge_labels[&EdgeLabel::A],
        census.edge_labels[&EdgeLabel::B],
        census.edge_labels[&EdgeLabel::C],
        class_d
    );
    if class_d == 0 {
        let _ = writeln!(text, "class D: empty");
    }

    let mut points = Vec::new();
    let exit_code = if let Some(at) = &cfg.at {
        if at.len() != d.n_sides() {
            return Err(CliError::Usage(format!(
                "--at has {} coordinates, the diagram has {} sides",
                at.len(),
                d.n_sides()
            )));
        }
        points.push(check_point(&pf, &tri, "injected", at, &cfg.tolerances, &mut text)?);
        EXIT_OK
    } else {
        out.insert("search".into(), search_json(cfg));
        let (set, _) = search(&pf, &cfg.search_config());
        for (i, p) in set.points.iter().enumerate() {
            let z = projective_normalize(&p.z);
            let source = format!("solution {i}{}", if set.geometric_index == Some(i) { " (geometric)" } else { "" });
            points.push(check_point(&pf, &tri, &source, &z, &cfg.tolerances, &mut text)?);
        }
        if set.is_empty() {
            let note = empty_note(cfg.n_starts);
            out.insert("note".into(), json!(note));
            let _ = writeln!(text, "{note}");
            EXIT_EMPTY
        } else {
            EXIT_OK
        }
    };
    out.insert("points".into(), Value::Array(points));
    Ok(Output { json: Value::Object(out), text, exit_code })
}
