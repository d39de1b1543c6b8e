//! `.kmu` files: TOML with sections `[meta]`, `[eta]`, `[xi]`, `[phi]`,
//! `[g]`, `[samples]`, and for frame structures `[brackets]` or `[family]`.
//! Components are keyed by one-based index tuples, e.g. `g.1.2 = "(1/4)*x3"`;
//! omitted components are zero.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use toml::{Table, Value};

use super::RegistryError;
use crate::chart::ChartField;
use crate::contact::{verify_axioms, Backend, ChartStructure, ContactMetricStructure};
use crate::deform::apply_deformation;
use crate::expr::{parse_in_chart, Expr};
use crate::homogeneous::{LieFrameModel, StructureConstants};
use crate::samples::SampleSet;
use crate::tensor::Slot;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    /// Reject structures failing the contact metric axioms.
    pub strict: bool,
    pub tol: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { strict: true, tol: 1e-8 }
    }
}

fn format_err(msg: impl Into<String>) -> RegistryError {
    RegistryError::Format(msg.into())
}

fn line_of_offset(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key).is_some_and(|r| r.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

/// Flatten a section into `index tuple -> value`; every key must start
/// with the section name.
fn components(root: &Table, section: &str, rank: usize, dim: usize) -> Result<BTreeMap<Vec<usize>, Value>, RegistryError> {
    let mut out = BTreeMap::new();
    let Some(sec) = root.get(section) else {
        return Ok(out);
    };
    let sec = sec.as_table().ok_or_else(|| format_err(format!("[{section}] must be a table")))?;
    for (k, v) in sec {
        if k != section {
            return Err(format_err(format!("unexpected key `{k}` in [{section}]; expected `{section}.<index>`")));
        }
        collect(v, section, &mut Vec::new(), rank, dim, &mut out)?;
    }
    Ok(out)
}

fn collect(
    v: &Value,
    section: &str,
    path: &mut Vec<usize>,
    rank: usize,
    dim: usize,
    out: &mut BTreeMap<Vec<usize>, Value>,
) -> Result<(), RegistryError> {
    let key = |path: &[usize]| {
        let idx: Vec<String> = path.iter().map(|i| (i + 1).to_string()).collect();
        format!("{section}.{}", idx.join("."))
    };
    match v {
        Value::Table(t) if path.len() < rank => {
            for (k, sub) in t {
                let i: usize = k
                    .parse()
                    .ok()
                    .filter(|i| (1..=dim).contains(i))
                    .ok_or_else(|| format_err(format!("index `{k}` under `{}` must be in 1..={dim}", key(path))))?;
                path.push(i - 1);
                collect(sub, section, path, rank, dim, out)?;
                path.pop();
            }
            Ok(())
        }
        _ if path.len() == rank => {
            out.insert(path.clone(), v.clone());
            Ok(())
        }
        _ => Err(format_err(format!("`{}` needs {rank} indices", key(path)))),
    }
}

fn as_f64(v: &Value, what: &str) -> Result<f64, RegistryError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(format_err(format!("`{what}` must be a number"))),
    }
}

fn get_f64(t: &Table, key: &str, default: f64) -> Result<f64, RegistryError> {
    t.get(key).map_or(Ok(default), |v| as_f64(v, key))
}

fn chart_field(
    text: &str,
    root: &Table,
    section: &'static str,
    slots: Vec<Slot>,
    dim: usize,
) -> Result<ChartField, RegistryError> {
    let rank = slots.len();
    let comps = components(root, section, rank, dim)?;
    let mut exprs = vec![Expr::zero(); dim.pow(rank as u32)];
    for (idx, v) in comps {
        let key = format!(
            "{section}.{}",
            idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(".")
        );
        let e = match &v {
            Value::String(s) => parse_in_chart(s, dim).map_err(|e| RegistryError::Expression {
                line: line_of_key(text, &key),
                key: key.clone(),
                message: e.to_string(),
            })?,
            other => Expr::Const(as_f64(other, &key)?),
        };
        let flat = idx.iter().fold(0, |acc, &i| acc * dim + i);
        exprs[flat] = e;
    }
    ChartField::new(section, dim, slots, exprs).map_err(|e| format_err(e.to_string()))
}

fn frame_vector(root: &Table, section: &str, dim: usize) -> Result<DVector<f64>, RegistryError> {
    let mut v = DVector::zeros(dim);
    for (idx, val) in components(root, section, 1, dim)? {
        v[idx[0]] = as_f64(&val, section)?;
    }
    Ok(v)
}

fn frame_matrix(root: &Table, section: &str, dim: usize) -> Result<DMatrix<f64>, RegistryError> {
    let mut m = DMatrix::zeros(dim, dim);
    for (idx, val) in components(root, section, 2, dim)? {
        m[(idx[0], idx[1])] = as_f64(&val, section)?;
    }
    Ok(m)
}

fn samples(root: &Table) -> Result<SampleSet, RegistryError> {
    let mut s = SampleSet::default();
    let Some(t) = root.get("samples") else {
        return Ok(s);
    };
    let t = t.as_table().ok_or_else(|| format_err("[samples] must be a table"))?;
    s.lo = get_f64(t, "lo", s.lo)?;
    s.hi = get_f64(t, "hi", s.hi)?;
    if !(s.lo < s.hi) {
        return Err(format_err("[samples] needs lo < hi"));
    }
    if let Some(c) = t.get("count") {
        s.count = c
            .as_integer()
            .and_then(|c| usize::try_from(c).ok())
            .ok_or_else(|| format_err("samples.count must be a non-negative integer"))?;
    }
    if let Some(c) = t.get("seed") {
        s.seed = c
            .as_integer()
            .and_then(|c| u64::try_from(c).ok())
            .ok_or_else(|| format_err("samples.seed must be a non-negative integer"))?;
    }
    if let Some(pts) = t.get("points") {
        let arr = pts.as_array().ok_or_else(|| format_err("samples.points must be an array"))?;
        for p in arr {
            let coords = p
                .as_array()
                .ok_or_else(|| format_err("each sample point must be an array"))?
                .iter()
                .map(|c| as_f64(c, "samples.points"))
                .collect::<Result<Vec<_>, _>>()?;
            s.extra.push(coords);
        }
    }
    Ok(s)
}

/// Parse `.kmu` text without axiom validation.
pub fn parse_spec(text: &str) -> Result<ContactMetricStructure, RegistryError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_of_offset(text, s.start));
        RegistryError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    for k in root.keys() {
        if !["meta", "eta", "xi", "phi", "g", "samples", "brackets", "family"].contains(&k.as_str()) {
            return Err(format_err(format!("unknown section [{k}]")));
        }
    }
    let meta = root
        .get("meta")
        .and_then(Value::as_table)
        .ok_or_else(|| format_err("missing [meta] section"))?;
    let name = meta
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| format_err("meta.name must be a string"))?
        .to_string();
    let backend = meta.get("backend").and_then(Value::as_str).unwrap_or("chart");
    let dim = meta
        .get("dim")
        .and_then(Value::as_integer)
        .and_then(|d| usize::try_from(d).ok())
        .ok_or_else(|| format_err("meta.dim must be a positive integer"))?;
    if dim < 3 || dim % 2 == 0 {
        return Err(format_err(format!("meta.dim must be odd and at least 3, got {dim}")));
    }
    let s = match backend {
        "chart" => {
            let data = ChartStructure::new(
                chart_field(text, &root, "eta", vec![Slot::Down], dim)?,
                chart_field(text, &root, "xi", vec![Slot::Up], dim)?,
                chart_field(text, &root, "phi", vec![Slot::Up, Slot::Down], dim)?,
                chart_field(text, &root, "g", vec![Slot::Down, Slot::Down], dim)?,
            )?;
            ContactMetricStructure::chart(name, data)?.with_samples(samples(&root)?)
        }
        "frame" => {
            let model = if let Some(fam) = root.get("family") {
                let fam = fam.as_table().ok_or_else(|| format_err("[family] must be a table"))?;
                if dim != 3 {
                    return Err(format_err("[family] requires dim = 3"));
                }
                LieFrameModel::lie_family(get_f64(fam, "c1", 0.0)?, get_f64(fam, "c2", 0.0)?)
            } else {
                let mut c = StructureConstants::zero(dim);
                for (idx, v) in components(&root, "brackets", 3, dim)? {
                    let (k, i, j) = (idx[0], idx[1], idx[2]);
                    let v = as_f64(&v, "brackets")?;
                    let existing = c.get(k, i, j);
                    if i == j && v != 0.0 || existing != 0.0 && existing != v {
                        return Err(format_err(format!(
                            "bracket component brackets.{}.{}.{} conflicts with antisymmetry",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                    if i != j {
                        c = c.with_bracket(i, j, k, v);
                    }
                }
                LieFrameModel::new(
                    c,
                    frame_matrix(&root, "g", dim)?,
                    frame_vector(&root, "eta", dim)?,
                    frame_vector(&root, "xi", dim)?,
                    frame_matrix(&root, "phi", dim)?,
                )
                .map_err(|e| format_err(e.to_string()))?
            };
            ContactMetricStructure::frame(name, model)?
        }
        other => return Err(format_err(format!("meta.backend must be `chart` or `frame`, got `{other}`"))),
    };
    match meta.get("deform") {
        Some(a) => Ok(apply_deformation(&s, as_f64(a, "meta.deform")?)?),
        None => Ok(s),
    }
}

fn num(v: f64) -> String {
    Value::Float(v).to_string()
}

fn push_index_line(out: &mut String, section: &str, idx: &[usize], value: String) {
    let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    out.push_str(&format!("{section}.{} = {value}\n", idx.join(".")));
}

fn render_chart_field(out: &mut String, f: &ChartField, section: &str) {
    out.push_str(&format!("\n[{section}]\n"));
    let d = f.dim();
    let rank = f.slots().len();
    for (flat, e) in f.components().iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let idx: Vec<usize> = (0..rank).rev().map(|r| flat / d.pow(r as u32) % d).collect();
        push_index_line(out, section, &idx, Value::String(e.to_string()).to_string());
    }
}

/// Canonical text: every nonzero component written explicitly, sorted by index.
pub fn render_spec(s: &ContactMetricStructure) -> String {
    let mut out = String::new();
    let backend = if s.is_frame() { "frame" } else { "chart" };
    out.push_str("[meta]\n");
    out.push_str(&format!("name = {}\n", Value::String(s.name.clone())));
    out.push_str(&format!("backend = \"{backend}\"\ndim = {}\n", s.dim()));
    match &s.backend {
        Backend::Chart(c) => {
            render_chart_field(&mut out, &c.eta, "eta");
            render_chart_field(&mut out, &c.xi, "xi");
            render_chart_field(&mut out, &c.phi, "phi");
            render_chart_field(&mut out, &c.g, "g");
            let sm = &s.samples;
            out.push_str(&format!(
                "\n[samples]\ncount = {}\nseed = {}\nlo = {}\nhi = {}\n",
                sm.count,
                sm.seed,
                num(sm.lo),
                num(sm.hi)
            ));
            if !sm.extra.is_empty() {
                let pts: Vec<String> = sm
                    .extra
                    .iter()
                    .map(|p| format!("[{}]", p.iter().map(|c| num(*c)).collect::<Vec<_>>().join(", ")))
                    .collect();
                out.push_str(&format!("points = [{}]\n", pts.join(", ")));
            }
        }
        Backend::Frame(m) => {
            let d = m.dim();
            out.push_str("\n[brackets]\n");
            for k in 0..d {
                for i in 0..d {
                    for j in (i + 1)..d {
                        let v = m.brackets.get(k, i, j);
                        if v != 0.0 {
                            push_index_line(&mut out, "brackets", &[k, i, j], num(v));
                        }
                    }
                }
            }
            let vector = |out: &mut String, v: &DVector<f64>, sec: &str| {
                out.push_str(&format!("\n[{sec}]\n"));
                for (i, x) in v.iter().enumerate() {
                    if *x != 0.0 {
                        push_index_line(out, sec, &[i], num(*x));
                    }
                }
            };
            let matrix = |out: &mut String, a: &DMatrix<f64>, sec: &str| {
                out.push_str(&format!("\n[{sec}]\n"));
                for i in 0..d {
                    for j in 0..d {
                        if a[(i, j)] != 0.0 {
                            push_index_line(out, sec, &[i, j], num(a[(i, j)]));
                        }
                    }
                }
            };
            vector(&mut out, &m.eta, "eta");
            vector(&mut out, &m.xi, "xi");
            matrix(&mut out, &m.phi, "phi");
            matrix(&mut out, &m.g, "g");
        }
    }
    out
}

/// `render(parse(text))`.
pub fn normalize(text: &str) -> Result<String, RegistryError> {
    Ok(render_spec(&parse_spec(text)?))
}

pub fn load_spec_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<ContactMetricStructure, RegistryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let s = parse_spec(&text)?;
    if opts.strict {
        let report = verify_axioms(&s, opts.tol)?;
        if let Some(c) = report.checks.into_iter().find(|c| !c.pass) {
            return Err(RegistryError::AxiomFailure {
                check: c.check_name,
                residual: c.residual,
                point: c.witness_point,
            });
        }
    }
    Ok(s)
}

/// Strict load with tolerance `1e-8`.
pub fn load_spec(path: impl AsRef<Path>) -> Result<ContactMetricStructure, RegistryError> {
    load_spec_with(path, LoadOptions::default())
}

pub fn save_spec(s: &ContactMetricStructure, path: impl AsRef<Path>) -> Result<(), RegistryError> {
    let path = path.as_ref();
    std::fs::write(path, render_spec(s)).map_err(|source| RegistryError::Io {
        path: path.display().to_string(),
        source,
    })
}
