//! Output documents and the command dispatcher behind the `unidisc` binary.
//!
//! JSON documents have the top-level shape
//! `{schema_version, command, inputs, results, diagnostics}`. Every float is
//! written as a decimal string with 12 significant digits, so output is
//! byte-stable across platforms. CSV output has a header row and uses `.` as
//! the decimal separator.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Map, Value};

use crate::criterion::{self, Decision, Mode, Subject};
use crate::critical::{self, CriticalId, CriticalOptions, Refinement};
use crate::error::Error;
use crate::par::Execution;
use crate::probe::{self, Functional, Grid};
use crate::series::{self, EvalOptions, Family, FunctionId};
use crate::zeros::{self, ZeroFamily, ZeroOptions};

pub const SCHEMA_VERSION: u32 = 1;

/// `{:.11e}`: 12 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.11e}")
    }
}

/// Replaces every floating-point number in `value` by its [`format_float`] string.
pub fn canonicalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => Value::String(format_float(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect())
        }
        other => other,
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FlexFloat {
    Num(f64),
    Text(String),
}

impl FlexFloat {
    fn get<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            FlexFloat::Num(v) => Ok(v),
            FlexFloat::Text(s) => match s.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => s.parse().map_err(|_| E::custom(format!("not a float: {s:?}"))),
            },
        }
    }
}

/// Reads a float written either as a JSON number or as a decimal string.
pub fn de_f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    FlexFloat::deserialize(d)?.get()
}

pub fn de_opt_f64<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    Option::<FlexFloat>::deserialize(d)?.map(FlexFloat::get).transpose()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub diagnostics: Value,
}

impl Document {
    pub fn new(command: Command, inputs: Value, results: Value, diagnostics: Value) -> Self {
        Document {
            schema_version: SCHEMA_VERSION,
            command: command.name().into(),
            inputs: canonicalize(inputs),
            results: canonicalize(results),
            diagnostics: canonicalize(diagnostics),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents are plain JSON values");
        s.push('\n');
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Eval,
    Zeros,
    Criterion,
    Critical,
    Certify,
    Probe,
    Reproduce,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Zeros => "zeros",
            Command::Criterion => "criterion",
            Command::Critical => "critical",
            Command::Certify => "certify",
            Command::Probe => "probe",
            Command::Reproduce => "reproduce",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format {s:?} (json, csv, text)")),
        }
    }
}

/// One fully specified invocation. Unset options take per-command defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family: Option<String>,
    pub param: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub id: Option<String>,
    pub mode: Option<String>,
    pub functional: Option<String>,
    pub k: Option<u32>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub angles: Option<usize>,
    pub delta: Option<f64>,
    pub secant: bool,
    pub sequential: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            family: None,
            param: None,
            n: None,
            tol: None,
            format: None,
            output: None,
            id: None,
            mode: None,
            functional: None,
            k: None,
            x: None,
            y: None,
            radii: None,
            angles: None,
            delta: None,
            secant: false,
            sequential: false,
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Zeros => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Debug)]
pub enum RunError {
    /// Invalid configuration; exit status 2.
    Usage(String),
    /// A numerical routine failed; exit status 1.
    Numerical(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Numerical(_) => 1,
        }
    }

    pub fn diagnostic(&self, command: Command) -> String {
        let (kind, message) = match self {
            RunError::Usage(m) => ("usage", m.clone()),
            RunError::Numerical(e) => (e.kind(), e.to_string()),
        };
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command.name(),
            "error": kind,
            "message": message,
        });
        let mut s = serde_json::to_string(&doc).expect("plain JSON");
        s.push('\n');
        s
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage error: {m}"),
            RunError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e)
    }
}

/// Rendered output of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub format: Format,
    pub body: String,
}

fn usage<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Usage(msg.into()))
}

fn need<T: Copy>(v: Option<T>, flag: &str, command: Command) -> Result<T, RunError> {
    v.ok_or_else(|| RunError::Usage(format!("{} requires --{flag}", command.name())))
}

fn need_str<'a>(v: &'a Option<String>, flag: &str, command: Command) -> Result<&'a str, RunError> {
    v.as_deref()
        .ok_or_else(|| RunError::Usage(format!("{} requires --{flag}", command.name())))
}

/// Domain checks map to usage errors when they reject user input up front.
fn precheck(r: crate::Result<()>) -> Result<(), RunError> {
    r.map_err(|e| RunError::Usage(e.to_string()))
}

fn check_tol(tol: Option<f64>) -> Result<(), RunError> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => usage(format!("--tol must be positive, got {t}")),
        _ => Ok(()),
    }
}

fn base_options(cfg: &RunConfig) -> Result<(EvalOptions, Execution), RunError> {
    let eval = EvalOptions::default()
        .with_env_overrides()
        .map_err(|e| RunError::Usage(e.to_string()))?;
    let exec = if cfg.sequential { Execution::Sequential } else { Execution::Parallel };
    Ok((eval, exec))
}

/// Validates the configuration and runs the command.
pub fn run(cfg: &RunConfig) -> Result<Artifact, RunError> {
    check_tol(cfg.tol)?;
    let format = cfg.format();
    if cfg.command == Command::Reproduce && format == Format::Csv {
        return usage("reproduce emits json or text");
    }
    let (eval, exec) = base_options(cfg)?;
    let doc = match cfg.command {
        Command::Eval => run_eval(cfg, eval)?,
        Command::Zeros => {
            let (doc, rows) = run_zeros(cfg, eval, exec)?;
            if format == Format::Csv {
                return Ok(Artifact { format, body: csv_rows(&["n", "zero"], &rows) });
            }
            doc
        }
        Command::Criterion => run_criterion(cfg, eval, exec)?,
        Command::Critical => run_critical(cfg, eval, exec)?,
        Command::Certify => run_certify(cfg, eval, exec)?,
        Command::Probe => {
            let (doc, rows) = run_probe(cfg, eval, exec)?;
            if format == Format::Csv {
                return Ok(Artifact { format, body: csv_rows(&["r", "theta", "re_value"], &rows) });
            }
            doc
        }
        Command::Reproduce => reproduce_with(eval, exec)?,
    };
    let body = match format {
        Format::Json => doc.to_json(),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                flatten(&doc.results).into_iter().map(|(k, v)| vec![k, v]).collect();
            csv_rows(&["key", "value"], &rows)
        }
        Format::Text => {
            let mut s = String::new();
            for (k, v) in flatten(&doc.results) {
                s.push_str(&format!("{k}: {v}\n"));
            }
            s
        }
    };
    Ok(Artifact { format, body })
}

fn run_eval(cfg: &RunConfig, mut eval: EvalOptions) -> Result<Document, RunError> {
    let c = Command::Eval;
    let name = need_str(&cfg.family, "family", c)?;
    let family = Family::parse(name).ok_or_else(|| {
        RunError::Usage(format!(
            "unknown family {name:?} (bessel_f, struve_h, lommel_l, raw_bessel_j, raw_struve_H, phi0, phi1)"
        ))
    })?;
    let id = FunctionId::new(family, need(cfg.param, "param", c)?);
    precheck(id.validate())?;
    let x = need(cfg.x, "x", c)?;
    let y = cfg.y.unwrap_or(0.0);
    let k = cfg.k.unwrap_or(0);
    if let Some(t) = cfg.tol {
        eval.tolerance = t;
    }
    let (value, bound, terms) = if family.is_normalized() {
        let v = series::eval_normalized(&id, Complex64::new(x, y), k, &eval)?;
        (v.value, v.error_bound, v.terms_used)
    } else {
        if y != 0.0 {
            return usage(format!("{name} takes a real argument"));
        }
        let v = series::eval_raw(&id, x, k, &eval)?;
        (Complex64::new(v.value, 0.0), v.error_bound, v.terms_used)
    };
    Ok(Document::new(
        c,
        json!({"family": name, "param": id.param, "x": x, "y": y, "k": k}),
        json!({"re": value.re, "im": value.im, "error_bound": bound, "terms_used": terms}),
        json!({"tolerance": eval.tolerance, "max_terms": eval.max_terms}),
    ))
}

fn zero_family(cfg: &RunConfig, c: Command) -> Result<(ZeroFamily, f64), RunError> {
    let name = need_str(&cfg.family, "family", c)?;
    let family = ZeroFamily::parse(name).ok_or_else(|| {
        RunError::Usage(format!("unknown zero family {name:?} (bessel, dini, struve, phi0, phi1)"))
    })?;
    let param = need(cfg.param, "param", c)?;
    precheck(family.validate(param))?;
    Ok((family, param))
}

fn zero_count(cfg: &RunConfig, default: usize) -> Result<usize, RunError> {
    let n = cfg.n.unwrap_or(default);
    if n == 0 || n > zeros::MAX_ZEROS {
        return usage(format!("--n must lie in 1..={}, got {n}", zeros::MAX_ZEROS));
    }
    Ok(n)
}

fn zero_options(cfg: &RunConfig, eval: EvalOptions, exec: Execution) -> ZeroOptions {
    let mut o = ZeroOptions { exec, eval, ..ZeroOptions::default() };
    if cfg.command == Command::Zeros {
        if let Some(t) = cfg.tol {
            o.tol = t;
        }
    }
    o
}

fn run_zeros(
    cfg: &RunConfig,
    eval: EvalOptions,
    exec: Execution,
) -> Result<(Document, Vec<Vec<String>>), RunError> {
    let c = Command::Zeros;
    let (family, param) = zero_family(cfg, c)?;
    let n = zero_count(cfg, 10)?;
    let opts = zero_options(cfg, eval, exec);
    let table = zeros::zeros(family, param, n, &opts)?;
    let rows = table
        .zeros
        .iter()
        .enumerate()
        .map(|(i, z)| vec![(i + 1).to_string(), format_float(*z)])
        .collect();
    let doc = Document::new(
        c,
        json!({"family": family.name(), "param": param, "n": n, "tol": opts.tol}),
        json!({"zeros": table.zeros}),
        json!({"scan_step": opts.scan_step, "max_terms": eval.max_terms}),
    );
    Ok((doc, rows))
}

/// Closed-form value of the criterion sum for a zero family, when one exists.
fn closed_form_for(family: ZeroFamily, param: f64, eval: &EvalOptions) -> crate::Result<f64> {
    match family {
        ZeroFamily::Bessel => criterion::bessel_sum_closed_form(param, eval),
        ZeroFamily::Dini => criterion::dini_sum_closed_form(param, eval),
        ZeroFamily::Struve => criterion::struve_sum_closed_form(param, eval),
        ZeroFamily::Phi0 => criterion::lommel_sum_closed_form(param, eval),
        ZeroFamily::Phi1 => criterion::lommel_sum_closed_form(param - 1.0, eval),
    }
}

fn run_criterion(cfg: &RunConfig, eval: EvalOptions, exec: Execution) -> Result<Document, RunError> {
    let c = Command::Criterion;
    let (family, param) = zero_family(cfg, c)?;
    let n = zero_count(cfg, criterion::DEFAULT_ZERO_COUNT)?;
    let opts = zero_options(cfg, eval, exec);
    let table = zeros::zeros(family, param, n, &opts)?;
    let result = criterion::st_sum(&table)?;
    let closed = match closed_form_for(family, param, &eval) {
        Ok(v) => Value::from(v),
        Err(Error::NearPole(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    Ok(Document::new(
        c,
        json!({"family": family.name(), "param": param, "n": n}),
        json!({
            "criterion": result,
            "rayleigh_sum": criterion::rayleigh_sum(family, param)?,
            "closed_form": closed,
        }),
        json!({"max_terms": eval.max_terms}),
    ))
}

fn run_critical(cfg: &RunConfig, eval: EvalOptions, exec: Execution) -> Result<Document, RunError> {
    let c = Command::Critical;
    let name = need_str(&cfg.id, "id", c)?;
    let id = CriticalId::parse(name)
        .ok_or_else(|| RunError::Usage(format!("unknown id {name:?} (nu_star, nu0, nu1)")))?;
    let tol = cfg.tol.unwrap_or(critical::DEFAULT_TOL);
    if tol < critical::MIN_TOL {
        return usage(format!("--tol must be >= {:e}", critical::MIN_TOL));
    }
    let refinement = if cfg.secant { Refinement::BisectionSecant } else { Refinement::Bisection };
    let opts = CriticalOptions { tol, refinement, exec, eval };
    let p = critical::solve_critical(id, &opts)?;
    let mut results = json!({
        "id": id.name(),
        "value": p.value,
        "residual": p.residual,
        "bracket": [p.bracket.0, p.bracket.1],
        "tol": p.tol,
        "refinement": p.refinement,
    });
    let mut inputs = json!({"id": id.name(), "tol": tol, "refinement": refinement});
    if let Some(delta) = cfg.delta {
        if !(1e-3..=0.2).contains(&delta) {
            return usage(format!("--delta must lie in [1e-3, 0.2], got {delta}"));
        }
        let n = zero_count(cfg, criterion::DEFAULT_ZERO_COUNT)?;
        let zo = ZeroOptions { exec, eval, ..ZeroOptions::default() };
        let t = critical::threshold_consistency(id, delta, n, &zo)?;
        results["threshold"] = json!({
            "mode": t.mode,
            "delta": delta,
            "n": n,
            "above": t.above,
            "below": t.below,
        });
        inputs["delta"] = json!(delta);
        inputs["n"] = json!(n);
    }
    Ok(Document::new(c, inputs, results, json!({"evaluations": p.evaluations})))
}

fn subject_and_mode(cfg: &RunConfig, c: Command) -> Result<(Subject, Mode, f64), RunError> {
    let name = need_str(&cfg.family, "family", c)?;
    let subject = Subject::parse(name)
        .ok_or_else(|| RunError::Usage(format!("unknown family {name:?} (bessel, struve, lommel)")))?;
    let mode = match cfg.mode.as_deref() {
        None => Mode::StarlikeCtc,
        Some(m) => Mode::parse(m).ok_or_else(|| {
            RunError::Usage(format!("unknown mode {m:?} (starlike_ctc, convex_all_derivatives)"))
        })?,
    };
    let param = need(cfg.param, "param", c)?;
    Ok((subject, mode, param))
}

fn run_certify(cfg: &RunConfig, eval: EvalOptions, exec: Execution) -> Result<Document, RunError> {
    let c = Command::Certify;
    let (subject, mode, param) = subject_and_mode(cfg, c)?;
    let (family, zparam) = match criterion::zero_source(subject, mode, param) {
        Ok(v) => v,
        Err(Error::Unsupported(m)) => return usage(m),
        Err(e) => return Err(RunError::Usage(e.to_string())),
    };
    precheck(family.validate(zparam))?;
    let n = zero_count(cfg, criterion::DEFAULT_ZERO_COUNT)?;
    let opts = ZeroOptions { exec, eval, ..ZeroOptions::default() };
    let cert = criterion::certify(subject, param, mode, n, &opts)?;
    Ok(Document::new(
        c,
        json!({"family": subject.name(), "param": param, "mode": mode.name(), "n": n}),
        serde_json::to_value(&cert).expect("certificate is plain data"),
        json!({"max_terms": eval.max_terms}),
    ))
}

fn parse_functional(cfg: &RunConfig) -> Result<Functional, RunError> {
    match cfg.functional.as_deref().unwrap_or("starlike_re") {
        "starlike_re" => Ok(Functional::StarlikeRe),
        "convex_re" => Ok(Functional::ConvexRe),
        "deriv_re" => {
            let k = cfg.k.unwrap_or(0);
            if k > probe::MAX_DERIV_INDEX {
                return usage(format!("--k must be <= {}", probe::MAX_DERIV_INDEX));
            }
            Ok(Functional::DerivRe(k))
        }
        other => usage(format!("unknown functional {other:?} (starlike_re, convex_re, deriv_re)")),
    }
}

fn run_probe(
    cfg: &RunConfig,
    eval: EvalOptions,
    exec: Execution,
) -> Result<(Document, Vec<Vec<String>>), RunError> {
    let c = Command::Probe;
    let (subject, _, param) = subject_and_mode(cfg, c)?;
    let id = subject.normalized(param);
    precheck(id.validate())?;
    let functional = parse_functional(cfg)?;
    let grid = Grid {
        radii: cfg.radii.clone().unwrap_or_else(|| probe::DEFAULT_RADII.to_vec()),
        angles: cfg.angles.unwrap_or(probe::DEFAULT_ANGLES),
    };
    if grid.radii.is_empty() || grid.radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return usage("--radii must lie in (0, 1]");
    }
    if grid.angles < probe::MIN_ANGLES {
        return usage(format!("--angles must be >= {}", probe::MIN_ANGLES));
    }
    let all = probe::samples(&id, functional, &grid, exec, &eval)?;
    let report = probe::report_from_samples(&id, functional, &grid, &all, &eval)?;
    let rows = all
        .iter()
        .map(|s| {
            vec![
                format_float(s.r),
                format_float(s.theta),
                s.re_value.map(format_float).unwrap_or_default(),
            ]
        })
        .collect();
    let doc = Document::new(
        c,
        json!({
            "family": subject.name(),
            "param": param,
            "functional": report.functional,
            "radii": grid.radii,
            "angles": grid.angles,
        }),
        json!({
            "min_value": report.min_value,
            "argmin": {"re": report.argmin.0, "im": report.argmin.1},
            "argmin_polar": {"r": report.argmin_polar.0, "theta": report.argmin_polar.1},
            "grid": [report.grid.0, report.grid.1],
            "skipped": report.skipped,
            "heuristic": report.heuristic,
        }),
        json!({"max_terms": eval.max_terms}),
    );
    Ok((doc, rows))
}

fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Dotted-path leaves of a JSON value, in document order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(v: &Value, path: String, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(x, join(k), out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(x, join(&i.to_string()), out)),
            Value::String(s) => out.push((path, s.clone())),
            Value::Null => out.push((path, String::new())),
            other => out.push((path, other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

/// Known values with the tolerance they are checked at.
pub const NU_STAR_REFERENCE: f64 = -0.7745;
pub const NU0_REFERENCE: f64 = -0.5623;
pub const NU1_REFERENCE: f64 = -0.1438;
pub const CRITICAL_TOLERANCE: f64 = 5e-4;
pub const RESIDUAL_LIMIT: f64 = 1e-10;
pub const STRUVE_BRACKET_REFERENCE: f64 = 1.102495575;
pub const STRUVE_BRACKET_TOLERANCE: f64 = 1e-8;
pub const LOMMEL_KERNEL_REFERENCE: f64 = 0.2391336269;
pub const LOMMEL_KERNEL_TOLERANCE: f64 = 1e-9;
pub const STRUVE_GRID: [f64; 5] = [-0.5, -0.25, 0.0, 0.25, 0.5];
pub const LOMMEL_GRID: [f64; 6] = [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproItem {
    pub item: String,
    pub pass: bool,
    pub observed: Value,
    pub expected: Value,
    pub detail: String,
}

fn item(name: &str, pass: bool, observed: Value, expected: Value, detail: String) -> ReproItem {
    ReproItem { item: name.into(), pass, observed, expected, detail }
}

/// Runs every reproduction item and returns one entry per item.
pub fn reproduce_items(eval: EvalOptions, exec: Execution) -> Result<Vec<ReproItem>, Error> {
    let mut items = Vec::new();
    let copts = CriticalOptions { exec, eval, ..CriticalOptions::default() };
    let mut solved = Vec::new();
    for (id, reference) in [
        (CriticalId::NuStar, NU_STAR_REFERENCE),
        (CriticalId::Nu0, NU0_REFERENCE),
        (CriticalId::Nu1, NU1_REFERENCE),
    ] {
        let p = critical::solve_critical(id, &copts)?;
        let pass = (p.value - reference).abs() <= CRITICAL_TOLERANCE && p.residual.abs() <= RESIDUAL_LIMIT;
        items.push(item(
            id.name(),
            pass,
            json!({"value": p.value, "residual": p.residual}),
            json!({"value": reference, "tolerance": CRITICAL_TOLERANCE, "residual_limit": RESIDUAL_LIMIT}),
            "root of the defining function".into(),
        ));
        solved.push(p.value);
    }

    let s0 = criterion::bessel_sum_closed_form(solved[1], &eval)?;
    items.push(item(
        "bessel_sum_at_nu0",
        (s0 - 1.0).abs() <= 1e-8,
        json!(s0),
        json!({"value": 1.0, "tolerance": 1e-8}),
        "closed-form zero sum at nu0".into(),
    ));
    let s1 = criterion::dini_sum_closed_form(solved[2], &eval)?;
    items.push(item(
        "dini_sum_at_nu1",
        (s1 - 1.0).abs() <= 1e-6,
        json!(s1),
        json!({"value": 1.0, "tolerance": 1e-6}),
        "closed-form Dini zero sum at nu1".into(),
    ));

    let b = criterion::struve_bracket(-0.5, &eval)?;
    items.push(item(
        "struve_bracket_at_minus_half",
        (b - STRUVE_BRACKET_REFERENCE).abs() <= STRUVE_BRACKET_TOLERANCE,
        json!(b),
        json!({"value": STRUVE_BRACKET_REFERENCE, "tolerance": STRUVE_BRACKET_TOLERANCE}),
        "(1-2nu) H_nu(1) + H_{nu-1}(1) from the series".into(),
    ));
    let g = criterion::lommel_shifted_kernel(1.0);
    items.push(item(
        "lommel_kernel_at_one",
        (g - LOMMEL_KERNEL_REFERENCE).abs() <= LOMMEL_KERNEL_TOLERANCE,
        json!(g),
        json!({"value": LOMMEL_KERNEL_REFERENCE, "tolerance": LOMMEL_KERNEL_TOLERANCE}),
        "2 cos 1 - sin 1".into(),
    ));

    let zopts = ZeroOptions { exec, eval, ..ZeroOptions::default() };
    let grids = STRUVE_GRID
        .iter()
        .map(|&p| (Subject::Struve, p))
        .chain(LOMMEL_GRID.iter().map(|&p| (Subject::Lommel, p)));
    for (subject, p) in grids {
        let cert =
            criterion::certify(subject, p, Mode::StarlikeCtc, criterion::DEFAULT_ZERO_COUNT, &zopts)?;
        items.push(item(
            &format!("{}_starlike_ctc_{}", subject.name(), format_float(p)),
            cert.decision == Decision::Holds,
            json!({
                "decision": cert.decision,
                "partial_sum": cert.criterion.partial_sum,
                "tail_bound": cert.criterion.tail_bound,
            }),
            json!({"decision": Decision::Holds}),
            format!("{} zeros of {} at {}", cert.zeros.count, cert.zeros.family.name(), format_float(cert.zeros.param)),
        ));
    }
    Ok(items)
}

/// The full reproduction report as a document.
pub fn reproduce() -> Result<Document, RunError> {
    let eval = EvalOptions::default()
        .with_env_overrides()
        .map_err(|e| RunError::Usage(e.to_string()))?;
    reproduce_with(eval, Execution::default())
}

fn reproduce_with(eval: EvalOptions, exec: Execution) -> Result<Document, RunError> {
    let items = reproduce_items(eval, exec)?;
    let all_pass = items.iter().all(|i| i.pass);
    let mut results = Map::new();
    results.insert("all_pass".into(), Value::Bool(all_pass));
    results.insert("items".into(), serde_json::to_value(&items).expect("plain data"));
    Ok(Document::new(
        Command::Reproduce,
        json!({"zero_count": criterion::DEFAULT_ZERO_COUNT, "critical_tol": critical::DEFAULT_TOL}),
        Value::Object(results),
        json!({"max_terms": eval.max_terms}),
    ))
}
