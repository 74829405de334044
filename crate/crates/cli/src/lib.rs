//! Command implementations behind the `terp` binary. Each command returns its stdout text
//! and exit code so that it can be driven from tests without spawning a process.

pub mod model_file;

use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{json, Value};
use terp_core::classifying::{ansatz_family, enumerate_admissible_spectra, hodge_filtration, spectral_numbers, spectral_pairs};
use terp_core::limits::{grassmann_limit, limit_terp, LimitOutcome};
use terp_core::model::order_string;
use terp_core::scalar::with_eps;
use terp_core::twistor::{classify, Classification};
use terp_core::{Approx, GaussQ, Lattice, Order, Report, Scalar, TerpError, TwistorReport};

pub use model_file::{Model, ModelFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] TerpError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exact,
    Approx,
}

/// Flags shared by all commands.
#[derive(Clone, Debug)]
pub struct Opts {
    pub json: bool,
    pub mode: Mode,
    pub eps: f64,
    /// Raw `name=value` assignments.
    pub point: Vec<(String, String)>,
}

impl Default for Opts {
    fn default() -> Self {
        Opts { json: false, mode: Mode::Exact, eps: terp_core::scalar::DEFAULT_EPS, point: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn new(stdout: String, code: i32) -> Self {
        Outcome { stdout, code }
    }
}

/// Split `a=1,b=2` (or repeated flags) into pairs.
pub fn parse_assignments(items: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for item in items {
        for part in item.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("expected name=value, got {part:?}")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok(out)
}

fn exact_value(s: &str) -> Result<GaussQ, CliError> {
    s.parse::<GaussQ>().map_err(|e| CliError::Input(format!("bad value {s:?}: {e}")))
}

/// Exact syntax, or a decimal real in approximate mode.
fn approx_value(s: &str) -> Result<Complex64, CliError> {
    if let Ok(q) = s.parse::<GaussQ>() {
        return Ok(q.to_c64());
    }
    s.parse::<f64>()
        .map(|x| Complex64::new(x, 0.0))
        .map_err(|_| CliError::Input(format!("bad value {s:?}")))
}

fn exact_point(opts: &Opts) -> Result<Vec<(String, GaussQ)>, CliError> {
    opts.point.iter().map(|(k, v)| Ok((k.clone(), exact_value(v)?))).collect()
}

fn exact_lattice(model: &Model, opts: &Opts) -> Result<Lattice<GaussQ>, CliError> {
    let vals = model.point_values(&exact_point(opts)?)?;
    Ok(model.family.eval(&vals)?)
}

fn orders(v: &[Order]) -> String {
    v.iter().map(order_string).collect::<Vec<_>>().join(", ")
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn report_json(r: &Report) -> Value {
    Value::Array(
        r.checks
            .iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "witness": c.witness}))
            .collect(),
    )
}

fn point_json(model: &Model, opts: &Opts) -> Value {
    let mut m = serde_json::Map::new();
    for p in model.params() {
        if let Some((_, v)) = opts.point.iter().rev().find(|(k, _)| k == p) {
            m.insert(p.clone(), Value::String(v.clone()));
        }
    }
    Value::Object(m)
}

pub fn cmd_validate(model: &Model, opts: &Opts) -> Result<Outcome, CliError> {
    let l = exact_lattice(model, opts)?;
    let mut rep = l.top.validate();
    let top_ok = rep.ok();
    if top_ok {
        rep.extend(lattice_report(&l));
    }
    let ok = rep.ok();
    let code = if ok { 0 } else { 1 };
    if opts.json {
        let v = json!({"model": model.name, "point": point_json(model, opts), "ok": ok, "checks": report_json(&rep)});
        return Ok(Outcome::new(to_json(&v), code));
    }
    let mut s = format!("{}: {}\n", model.name, if ok { "pass" } else { "FAIL" });
    s.push_str(&rep.to_string());
    Ok(Outcome::new(s, code))
}

/// Files may list more generators than the rank; such sets only need to span a valid lattice.
fn lattice_report<S: Scalar>(l: &Lattice<S>) -> terp_core::Report {
    if l.generators.len() > l.mu() {
        l.validate_spanning()
    } else {
        l.validate()
    }
}

/// First failed validity check, as an input error.
fn ensure_valid<S: Scalar>(l: &Lattice<S>) -> Result<(), CliError> {
    let rep = l.top.validate();
    let rep = if rep.ok() { lattice_report(l) } else { rep };
    let first = rep.failures().next().map(|c| format!("invalid model: {}: {}", c.name, c.witness));
    first.map_or(Ok(()), |m| Err(CliError::Input(m)))
}

fn checked_lattice(model: &Model, opts: &Opts) -> Result<Lattice<GaussQ>, CliError> {
    let l = exact_lattice(model, opts)?;
    ensure_valid(&l)?;
    if l.generators.len() > l.mu() {
        return l.canonicalize().map_err(CliError::Core);
    }
    Ok(l)
}

pub fn cmd_spectrum(model: &Model, opts: &Opts) -> Result<Outcome, CliError> {
    let l = checked_lattice(model, opts)?;
    let sp = spectral_numbers(&l);
    if opts.json {
        let v = json!({"model": model.name, "point": point_json(model, opts), "spectrum": sp.iter().map(order_string).collect::<Vec<_>>()});
        return Ok(Outcome::new(to_json(&v), 0));
    }
    Ok(Outcome::new(format!("{}\n", orders(&sp)), 0))
}

pub fn cmd_pairs(model: &Model, opts: &Opts) -> Result<Outcome, CliError> {
    let l = checked_lattice(model, opts)?;
    let spp = spectral_pairs(&l)?;
    let pairs = spp.pairs_list();
    if opts.json {
        let list: Vec<Value> = pairs.iter().map(|(a, k)| json!({"alpha": order_string(a), "l": k})).collect();
        let v = json!({"model": model.name, "point": point_json(model, opts), "pairs": list});
        return Ok(Outcome::new(to_json(&v), 0));
    }
    let s = pairs.iter().map(|(a, k)| format!("({}, {k})", order_string(a))).collect::<Vec<_>>().join(", ");
    Ok(Outcome::new(format!("{s}\n"), 0))
}

fn vec_string(v: &[GaussQ]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

pub fn cmd_hodge(model: &Model, opts: &Opts) -> Result<Outcome, CliError> {
    let l = checked_lattice(model, opts)?;
    let f = hodge_filtration(&l);
    let (lo, hi) = f.range();
    let mut levels = Vec::new();
    for p in (lo..=hi + 1).rev() {
        let sub = f.total(p);
        levels.push((p, sub.dim(), sub.basis().iter().map(|b| vec_string(b)).collect::<Vec<_>>()));
        if sub.dim() == f.mu {
            break;
        }
    }
    if opts.json {
        let list: Vec<Value> = levels.iter().map(|(p, d, b)| json!({"p": p, "dim": d, "basis": b})).collect();
        let v = json!({"model": model.name, "point": point_json(model, opts), "filtration": list});
        return Ok(Outcome::new(to_json(&v), 0));
    }
    let mut s = String::new();
    for (p, d, b) in &levels {
        let _ = writeln!(s, "F^{p}: dim {d}  {}", b.join(" "));
    }
    Ok(Outcome::new(s, 0))
}

fn twistor_json<S: Scalar>(r: &TwistorReport<S>, exact: bool) -> Value {
    let h: Vec<Vec<String>> = (0..r.h_matrix.rows)
        .map(|i| (0..r.h_matrix.cols).map(|j| r.h_matrix.get(i, j).to_string()).collect())
        .collect();
    let mut v = json!({
        "splitting": r.splitting,
        "h0_basis": r.h0_basis.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "h_matrix": h,
        "signature": {"p": r.signature.p, "q": r.signature.q, "corank": r.signature.corank},
        "pure": r.is_pure(),
        "polarized": r.polarized,
        "marginal": r.marginal,
    });
    if !exact && r.min_pivot.is_finite() {
        v["min_pivot"] = json!(r.min_pivot);
    }
    v
}

fn splitting_string(k: &[i64]) -> String {
    format!("[{}]", k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn twistor_text<S: Scalar>(r: &TwistorReport<S>) -> String {
    let class = match r.classification {
        Classification::NonPure => "non-pure".to_string(),
        Classification::Pure { .. } if r.polarized => "pure polarized".to_string(),
        Classification::Pure { p, q } => format!("pure, signature ({p},{q})"),
    };
    let mut s = String::new();
    let _ = writeln!(s, "splitting {}", splitting_string(&r.splitting));
    let _ = writeln!(s, "global sections {}", r.h0_basis.len());
    let _ = writeln!(s, "signature ({},{}) corank {}", r.signature.p, r.signature.q, r.signature.corank);
    let _ = writeln!(s, "{class}{}", if r.marginal { " (marginal)" } else { "" });
    s
}

pub fn cmd_twistor(model: &Model, opts: &Opts) -> Result<Outcome, CliError> {
    let (body, text) = match opts.mode {
        Mode::Exact => {
            let l = checked_lattice(model, opts)?;
            let r = classify(&l)?;
            (twistor_json(&r, true), twistor_text(&r))
        }
        Mode::Approx => {
            // validity is decided exactly when the point is exact, otherwise skipped
            if let Ok(l) = exact_lattice(model, opts) {
                ensure_valid(&l)?;
            }
            let pt: Vec<(String, Complex64)> =
                opts.point.iter().map(|(k, v)| Ok((k.clone(), approx_value(v)?))).collect::<Result<_, CliError>>()?;
            let vals: Vec<Approx> = model.point_values(&pt)?.into_iter().map(Approx).collect();
            let l = model.family.eval(&vals)?;
            let r = with_eps(opts.eps, || classify(&l))?;
            (twistor_json(&r, false), twistor_text(&r))
        }
    };
    if opts.json {
        let mut v = json!({"model": model.name, "point": point_json(model, opts), "mode": mode_name(opts.mode)});
        if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
            m.extend(b);
        }
        return Ok(Outcome::new(to_json(&v), 0));
    }
    Ok(Outcome::new(text, 0))
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Approx => "approx",
    }
}

/// One axis of a scan grid: `name=start:stop:count[,log]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: String,
    pub stop: String,
    pub count: usize,
    pub log: bool,
}

pub fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let bad = || CliError::Input(format!("grid axis {s:?}: expected name=start:stop:count[,log]"));
    let (name, rest) = s.split_once('=').ok_or_else(bad)?;
    let (rest, log) = match rest.strip_suffix(",log") {
        Some(r) => (r, true),
        None => (rest, false),
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(bad());
    }
    Ok(Axis { name: name.trim().into(), start: parts[0].trim().into(), stop: parts[1].trim().into(), count, log })
}

impl Axis {
    fn exact_values(&self) -> Result<Vec<GaussQ>, CliError> {
        if self.log {
            return Err(CliError::Input(format!("axis {}: log spacing needs --mode approx", self.name)));
        }
        let a = exact_value(&self.start)?;
        let b = exact_value(&self.stop)?;
        if self.count == 1 {
            return Ok(vec![a]);
        }
        let step = (b - a.clone()) / GaussQ::int(self.count as i64 - 1);
        Ok((0..self.count).map(|k| a.clone() + step.clone() * GaussQ::int(k as i64)).collect())
    }

    fn approx_values(&self) -> Result<Vec<Complex64>, CliError> {
        let a = approx_value(&self.start)?;
        let b = approx_value(&self.stop)?;
        if self.count == 1 {
            return Ok(vec![a]);
        }
        let n = (self.count - 1) as f64;
        if self.log {
            if a.im != 0.0 || b.im != 0.0 || a.re <= 0.0 || b.re <= 0.0 {
                return Err(CliError::Input(format!("axis {}: log spacing needs positive reals", self.name)));
            }
            let (la, lb) = (a.re.ln(), b.re.ln());
            return Ok((0..self.count).map(|k| Complex64::new((la + (lb - la) * k as f64 / n).exp(), 0.0)).collect());
        }
        Ok((0..self.count).map(|k| a + (b - a) * (k as f64 / n)).collect())
    }
}

/// Cartesian product, first axis outermost.
fn product<T: Clone>(axes: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for vals in axes {
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for p in &out {
            for v in vals {
                let mut q = p.clone();
                q.push(v.clone());
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn complex_string(c: &Complex64) -> String {
    Approx(*c).to_string()
}

/// Scan rows as CSV text. Parameters not on the grid come from `--point`.
pub fn cmd_scan(model: &Model, opts: &Opts, grid: &[Axis]) -> Result<Outcome, CliError> {
    if grid.is_empty() {
        return Err(CliError::Input("scan needs at least one --grid axis".into()));
    }
    for a in grid {
        if !model.params().contains(&a.name) {
            return Err(CliError::Input(format!("grid axis {:?} is not a parameter", a.name)));
        }
    }
    let params = model.params().to_vec();
    let free: Vec<&String> = params.iter().filter(|p| !grid.iter().any(|a| &a.name == *p)).collect();
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header: Vec<String> = params.clone();
    header.extend(["splitting", "p", "q", "corank", "marginal"].map(String::from));
    wtr.write_record(&header).map_err(|e| CliError::Input(e.to_string()))?;
    let row = |vals: Vec<String>, res: Result<(Vec<i64>, usize, usize, usize, bool), String>| -> Vec<String> {
        let mut r = vals;
        match res {
            Ok((k, p, q, c, m)) => {
                r.extend([splitting_string(&k), p.to_string(), q.to_string(), c.to_string(), m.to_string()]);
            }
            Err(e) => r.extend([format!("error: {e}"), String::new(), String::new(), String::new(), String::new()]),
        }
        r
    };
    let mut records = Vec::new();
    match opts.mode {
        Mode::Exact => {
            let fixed = exact_point(opts)?;
            let axes: Vec<Vec<GaussQ>> = grid.iter().map(|a| a.exact_values()).collect::<Result<_, _>>()?;
            for pt in product(&axes) {
                let mut assign: Vec<(String, GaussQ)> = fixed.iter().filter(|(k, _)| free.contains(&k)).cloned().collect();
                assign.extend(grid.iter().zip(&pt).map(|(a, v)| (a.name.clone(), v.clone())));
                let vals = model.point_values(&assign)?;
                let res = model
                    .family
                    .eval(&vals)
                    .and_then(|l| classify(&l))
                    .map(|r| (r.splitting.clone(), r.signature.p, r.signature.q, r.signature.corank, r.marginal))
                    .map_err(|e| e.to_string());
                records.push(row(vals.iter().map(|v| v.to_string()).collect(), res));
            }
        }
        Mode::Approx => {
            let fixed: Vec<(String, Complex64)> =
                opts.point.iter().map(|(k, v)| Ok((k.clone(), approx_value(v)?))).collect::<Result<_, CliError>>()?;
            let axes: Vec<Vec<Complex64>> = grid.iter().map(|a| a.approx_values()).collect::<Result<_, _>>()?;
            let mut pts = Vec::new();
            for pt in product(&axes) {
                let mut assign: Vec<(String, Complex64)> = fixed.iter().filter(|(k, _)| free.contains(&k)).cloned().collect();
                assign.extend(grid.iter().zip(&pt).map(|(a, v)| (a.name.clone(), *v)));
                pts.push(model.point_values(&assign)?);
            }
            let rows = with_eps(opts.eps, || terp_core::twistor::signature_scan(&model.family, &pts));
            for r in rows {
                let res = r.result.map(|x| (x.splitting, x.signature.p, x.signature.q, x.signature.corank, x.marginal));
                records.push(row(r.params.iter().map(complex_string).collect(), res));
            }
        }
    }
    for r in records {
        wtr.write_record(&r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Outcome::new(String::from_utf8(bytes).expect("utf8"), 0))
}

pub fn cmd_limit(model: &Model, opts: &Opts, family: &str) -> Result<Outcome, CliError> {
    let f = model.param_family(family, &exact_point(opts)?)?;
    let lp = grassmann_limit(&f)?;
    let outcome = limit_terp(&f)?;
    let membership = format!("{:?}", lp.membership);
    match outcome {
        LimitOutcome::Lattice(l) => {
            let gens: Vec<String> = l.generators.iter().map(|g| g.to_string()).collect();
            let sp = spectral_numbers(&l);
            if opts.json {
                let v = json!({
                    "model": model.name, "family": family, "membership": membership, "degenerate": false,
                    "generators": gens, "spectrum": sp.iter().map(order_string).collect::<Vec<_>>(),
                });
                return Ok(Outcome::new(to_json(&v), 0));
            }
            let mut s = format!("limit of {family}: {membership}\n");
            for g in &gens {
                let _ = writeln!(s, "  {g}");
            }
            let _ = writeln!(s, "spectrum {}", orders(&sp));
            Ok(Outcome::new(s, 0))
        }
        LimitOutcome::Degenerate { diagnosis, report } => {
            if opts.json {
                let v = json!({
                    "model": model.name, "family": family, "membership": membership, "degenerate": true,
                    "diagnosis": diagnosis, "checks": report.as_ref().map(report_json),
                });
                return Ok(Outcome::new(to_json(&v), 1));
            }
            Ok(Outcome::new(format!("DEGENERATE: {diagnosis}\n"), 1))
        }
    }
}

pub fn cmd_strata(model: &Model, opts: &Opts) -> Result<Outcome, CliError> {
    let l = checked_lattice(model, opts)?;
    let spectra = enumerate_admissible_spectra(&l.top, &l.window);
    let spp = spectral_pairs(&l)?;
    let chart = ansatz_family(&l, &spp)?;
    let names = chart.var_names();
    let free: Vec<String> = chart.free_vars().iter().map(|v| v.name.clone()).collect();
    let cons: Vec<String> = chart.constraints().iter().map(|c| c.display(&names)).collect();
    let here = spectral_numbers(&l);
    if opts.json {
        let v = json!({
            "model": model.name,
            "point": point_json(model, opts),
            "admissible_spectra": spectra.iter().map(|s| s.iter().map(order_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "spectrum": here.iter().map(order_string).collect::<Vec<_>>(),
            "chart": {"variables": free, "constraints": cons},
        });
        return Ok(Outcome::new(to_json(&v), 0));
    }
    let mut s = String::from("admissible spectra:\n");
    for sp in &spectra {
        let mark = if *sp == here { "  *" } else { "" };
        let _ = writeln!(s, "  {}{mark}", orders(sp));
    }
    let _ = writeln!(s, "chart variables: {}", free.join(", "));
    let _ = writeln!(s, "constraints:");
    for c in &cons {
        let _ = writeln!(s, "  {c} = 0");
    }
    Ok(Outcome::new(s, 0))
}
