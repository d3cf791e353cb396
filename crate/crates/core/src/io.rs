//! File formats: edge lists, label files, distribution CSVs, census and report
//! CSVs, and the TOML configs for SBTM specs and experiments.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::{Table, Value};

use crate::cliques::{CliqueCensus, DEFAULT_MAX_ORDER};
use crate::distribution::LabelDistribution;
use crate::error::{Error, Result};
use crate::experiments::{
    DatasetBundle, ExperimentConfig, ExperimentReport, InitSource, Method, Source, SweepParameter, SweepPoint,
};
use crate::graph::Graph;
use crate::sbtm::{CellCount, SbtmSpec};
use crate::train::TrainConfig;

/// Rows whose sum is within this of 1 are loaded untouched.
pub const LOAD_TOL: f64 = 1e-6;
/// Rows further than this from 1 are rejected; rows in between are renormalised.
pub const LOAD_HARD_TOL: f64 = 1e-3;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Parses whitespace separated `a b` pairs; `#` starts a comment.
pub fn parse_edge_tokens(text: &str) -> Result<Vec<(String, String)>> {
    data_lines(text)
        .map(|(no, line)| {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => Ok((a.to_string(), b.to_string())),
                _ => Err(Error::Input(format!("line {no}: expected two node ids, got {line:?}"))),
            }
        })
        .collect()
}

/// Reads an edge list on its own. When every id is a non-negative integer the
/// ids are used directly (`n = max id + 1`); otherwise ids are numbered in
/// order of first appearance.
pub fn read_edge_list(path: &Path) -> Result<(Graph, Vec<String>)> {
    let pairs = parse_edge_tokens(&read(path)?)?;
    let numeric: Option<Vec<(usize, usize)>> = pairs
        .iter()
        .map(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .collect();
    if let Some(edges) = numeric {
        let n = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let ids = (0..n).map(|i| i.to_string()).collect();
        return Ok((Graph::from_edge_list(n, &edges)?, ids));
    }
    let mut index = HashMap::new();
    let mut ids = Vec::new();
    let mut intern = |s: &String| {
        *index.entry(s.clone()).or_insert_with(|| {
            ids.push(s.clone());
            ids.len() - 1
        })
    };
    let edges: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (intern(a), intern(b))).collect();
    let n = ids.len();
    Ok((Graph::from_edge_list(n, &edges)?, ids))
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut s = String::with_capacity(g.edge_count() * 10);
    for (a, b) in g.edges() {
        let _ = writeln!(s, "{a} {b}");
    }
    s
}

pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    write(path, &format_edge_list(g))
}

/// Label file lines are `node_id label`. Label tokens that are all
/// non-negative integers keep their numeric order; other tokens are indexed in
/// order of first appearance.
fn parse_labels(text: &str) -> Result<(Vec<String>, Vec<String>, Vec<usize>)> {
    let mut ids = Vec::new();
    let mut tokens = Vec::new();
    let mut seen = HashMap::new();
    for (no, line) in data_lines(text) {
        let mut it = line.split_whitespace();
        let (Some(id), Some(label), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Input(format!(
                "line {no}: expected `node_id label`, got {line:?}"
            )));
        };
        if seen.insert(id.to_string(), no).is_some() {
            return Err(Error::Input(format!("line {no}: node {id} labelled twice")));
        }
        ids.push(id.to_string());
        tokens.push(label.to_string());
    }
    let numeric: Option<Vec<usize>> = tokens.iter().map(|t| t.parse().ok()).collect();
    let (names, labels) = match numeric {
        Some(nums) => {
            let mut distinct = nums.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let labels = nums.iter().map(|v| distinct.binary_search(v).unwrap()).collect();
            (distinct.iter().map(|v| v.to_string()).collect(), labels)
        }
        None => {
            let mut names: Vec<String> = Vec::new();
            let labels = tokens
                .iter()
                .map(|t| match names.iter().position(|n| n == t) {
                    Some(i) => i,
                    None => {
                        names.push(t.clone());
                        names.len() - 1
                    }
                })
                .collect();
            (names, labels)
        }
    };
    Ok((ids, names, labels))
}

/// Loads a labelled graph. Dense ids follow the label file's order; every
/// node in the edge list must have a label.
pub fn load_dataset(edge_path: &Path, label_path: &Path) -> Result<DatasetBundle> {
    let pairs = parse_edge_tokens(&read(edge_path)?)?;
    let (ids, label_names, labels) = parse_labels(&read(label_path)?)?;
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut missing: Vec<&str> = Vec::new();
    let mut edges = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        match (index.get(a.as_str()), index.get(b.as_str())) {
            (Some(&x), Some(&y)) => edges.push((x, y)),
            (x, y) => {
                for (id, hit) in [(a, x), (b, y)] {
                    if hit.is_none() && !missing.contains(&id.as_str()) {
                        missing.push(id);
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(10).copied().collect();
        return Err(Error::Input(format!(
            "{} node(s) in {} have no label in {}: {}{}",
            missing.len(),
            edge_path.display(),
            label_path.display(),
            shown.join(", "),
            if missing.len() > 10 { ", …" } else { "" }
        )));
    }
    if label_names.len() < 2 {
        return Err(Error::Input("dataset needs at least two labels".into()));
    }
    Ok(DatasetBundle {
        graph: Graph::from_edge_list(ids.len(), &edges)?,
        label_count: label_names.len(),
        labels,
        ids,
        label_names,
    })
}

pub fn format_labels(labels: &[usize]) -> String {
    let mut s = String::with_capacity(labels.len() * 8);
    for (v, c) in labels.iter().enumerate() {
        let _ = writeln!(s, "{v} {c}");
    }
    s
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    write(path, &format_labels(labels))
}

/// `node,p_0,…,p_{l-1}` with 17 significant digits, so a reload is exact.
pub fn format_distribution(d: &LabelDistribution) -> String {
    let l = d.label_count();
    let mut s = String::from("node");
    for i in 0..l {
        let _ = write!(s, ",p_{i}");
    }
    s.push('\n');
    for v in 0..d.node_count() {
        let _ = write!(s, "{v}");
        for x in d.row(v) {
            let _ = write!(s, ",{x:.16e}");
        }
        s.push('\n');
    }
    s
}

pub fn write_distribution(path: &Path, d: &LabelDistribution) -> Result<()> {
    write(path, &format_distribution(d))
}

/// Parses a distribution CSV. Returns the distribution and a warning per
/// renormalised row.
pub fn parse_distribution(text: &str) -> Result<(LabelDistribution, Vec<String>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Input("empty distribution file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let l = cols.len().saturating_sub(1);
    let header_ok =
        cols.first() == Some(&"node") && l >= 1 && cols[1..].iter().enumerate().all(|(i, c)| *c == format!("p_{i}"));
    if !header_ok {
        return Err(Error::Input(format!(
            "line 1: expected header `node,p_0,…`, got {header:?}"
        )));
    }
    let mut rows: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    for (i, line) in lines {
        let no = i + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != l + 1 {
            return Err(Error::Input(format!(
                "line {no}: expected {} fields, got {}",
                l + 1,
                fields.len()
            )));
        }
        let node: usize = fields[0]
            .parse()
            .map_err(|_| Error::Input(format!("line {no}: bad node id {:?}", fields[0])))?;
        let vals = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Input(format!("line {no}: bad probability {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((node, vals, no));
    }
    let n = rows.len();
    let mut values = vec![f64::NAN; n * l];
    let mut filled = vec![false; n];
    let mut warnings = Vec::new();
    for (node, mut vals, no) in rows {
        if node >= n || filled[node] {
            return Err(Error::Input(format!("line {no}: node {node} out of range or repeated")));
        }
        if vals.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Input(format!(
                "line {no}: probabilities must be finite and non-negative"
            )));
        }
        let sum: f64 = vals.iter().sum();
        if (sum - 1.0).abs() > LOAD_HARD_TOL {
            return Err(Error::Input(format!("line {no}: row sums to {sum}")));
        }
        if (sum - 1.0).abs() > LOAD_TOL {
            vals.iter_mut().for_each(|x| *x /= sum);
            warnings.push(format!("line {no}: row sum {sum} renormalised"));
        }
        values[node * l..(node + 1) * l].copy_from_slice(&vals);
        filled[node] = true;
    }
    Ok((LabelDistribution::new(n, l, values)?, warnings))
}

pub fn read_distribution(path: &Path) -> Result<(LabelDistribution, Vec<String>)> {
    parse_distribution(&read(path)?)
}

pub fn format_census(c: &CliqueCensus) -> String {
    let mut s = String::from("k,total,intra,inter\n");
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &c.rows {
        let _ = writeln!(s, "{},{},{},{}", r.k, r.total, opt(r.intra), opt(r.inter));
    }
    s
}

pub fn format_provenance(cells: &[CellCount]) -> String {
    let mut s = String::from("k,composition,sampled\n");
    for c in cells {
        let comp: Vec<String> = c.composition.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(s, "{},{},{}", c.k, comp.join(";"), c.sampled);
    }
    s
}

fn value_f64(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::Config(format!("{what}: expected a number"))),
    }
}

fn value_vec(v: &Value, what: &str) -> Result<Vec<f64>> {
    match v {
        Value::Array(a) => a.iter().map(|x| value_f64(x, what)).collect(),
        other => Ok(vec![value_f64(other, what)?]),
    }
}

fn matrix_key(key: &str) -> Option<usize> {
    key.strip_prefix('B').and_then(|k| k.parse().ok())
}

/// Parses one `B_k` entry: either a full `l×l` array of arrays, or a table
/// `{ diag = x | [x_0, …], off = y }`.
fn parse_matrix(v: &Value, k: usize, l: usize) -> Result<Vec<Vec<f64>>> {
    let what = format!("B{k}");
    match v {
        Value::Array(rows) => {
            let m = rows
                .iter()
                .map(|r| value_vec(r, &what))
                .collect::<Result<Vec<Vec<f64>>>>()?;
            if m.len() != l || m.iter().any(|r| r.len() != l) {
                return Err(Error::Config(format!("{what} must be {l}×{l}")));
            }
            Ok(m)
        }
        Value::Table(t) => {
            for key in t.keys() {
                if key != "diag" && key != "off" {
                    return Err(Error::Config(format!("{what}: unknown key {key:?}")));
                }
            }
            let diag = value_vec(
                t.get("diag")
                    .ok_or_else(|| Error::Config(format!("{what}: missing diag")))?,
                &what,
            )?;
            let off = value_f64(
                t.get("off")
                    .ok_or_else(|| Error::Config(format!("{what}: missing off")))?,
                &what,
            )?;
            if diag.len() != 1 && diag.len() != l {
                return Err(Error::Config(format!("{what}: diag needs 1 or {l} values")));
            }
            Ok((0..l)
                .map(|a| {
                    (0..l)
                        .map(|b| if a == b { diag[a % diag.len()] } else { off })
                        .collect()
                })
                .collect())
        }
        _ => Err(Error::Config(format!("{what}: expected a matrix or {{ diag, off }}"))),
    }
}

const SOURCE_KEYS: [&str; 5] = ["kind", "spec", "shuffle", "edges", "labels"];

/// Builds an SBTM spec from a TOML table with keys `N`, optional `labels`,
/// optional `max_order` and `B2`, `B3`, ….
pub fn spec_from_table(t: &Table, extra_keys: &[&str]) -> Result<SbtmSpec> {
    let sizes: Vec<usize> = match t.get("N") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| match v {
                Value::Integer(i) if *i > 0 => Ok(*i as usize),
                _ => Err(Error::Config("N must list positive integers".into())),
            })
            .collect::<Result<_>>()?,
        _ => return Err(Error::Config("missing cluster sizes `N`".into())),
    };
    let l = sizes.len();
    if let Some(v) = t.get("labels") {
        if v.as_integer() != Some(l as i64) {
            return Err(Error::Config(format!("labels = {v} but N has {l} entries")));
        }
    }
    let mut given: Vec<(usize, &Value)> = Vec::new();
    for (key, v) in t {
        if let Some(k) = matrix_key(key) {
            given.push((k, v));
        } else if !matches!(key.as_str(), "N" | "labels" | "max_order") && !extra_keys.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown key {key:?} in SBTM spec")));
        }
    }
    let top = given.iter().map(|g| g.0).max().unwrap_or(1);
    let max_order = match t.get("max_order") {
        Some(v) => v
            .as_integer()
            .filter(|&m| m >= 2)
            .ok_or_else(|| Error::Config("max_order must be an integer ≥ 2".into()))? as usize,
        None => top,
    };
    if max_order < 2 {
        return Err(Error::Config("SBTM spec has no probability matrices".into()));
    }
    let mut mats = Vec::with_capacity(max_order - 1);
    for k in 2..=max_order {
        let v = given
            .iter()
            .find(|g| g.0 == k)
            .ok_or_else(|| Error::Config(format!("missing B{k}")))?
            .1;
        mats.push(parse_matrix(v, k, l)?);
    }
    if let Some(k) = given.iter().map(|g| g.0).find(|&k| k < 2 || k > max_order) {
        return Err(Error::Config(format!("B{k} outside 2..={max_order}")));
    }
    SbtmSpec::new(sizes, mats)
}

/// Parses a bare spec file, or the `[source]` table of an experiment file.
pub fn parse_spec(text: &str) -> Result<SbtmSpec> {
    let t: Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
    match t.get("source") {
        Some(Value::Table(src)) => spec_from_table(src, &SOURCE_KEYS),
        _ => spec_from_table(&t, &[]),
    }
}

pub fn read_spec(path: &Path) -> Result<SbtmSpec> {
    parse_spec(&read(path)?)
}

/// Full-matrix TOML for a spec; parses back to an equal spec.
pub fn format_spec(spec: &SbtmSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "labels = {}", spec.label_count());
    let sizes: Vec<String> = spec.label_sizes().iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "N = [{}]", sizes.join(", "));
    let _ = writeln!(s, "max_order = {}", spec.max_order());
    for k in 2..=spec.max_order() {
        let _ = writeln!(s, "B{k} = [");
        for row in spec.matrix(k) {
            let r: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(s, "  [{}],", r.join(", "));
        }
        s.push_str("]\n");
    }
    s
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    prior_ratio: Option<f64>,
    m_values: Option<Vec<usize>>,
    alpha_values: Option<Vec<f64>>,
    seeds: Option<Value>,
    parameter: Option<String>,
    points: Option<usize>,
    values: Option<Vec<f64>>,
    start: Option<Table>,
    end: Option<Table>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTrain {
    learning_rate: Option<f64>,
    epochs: Option<usize>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    adam_eps: Option<f64>,
    max_order: Option<usize>,
    init: Option<String>,
    noise_sigma: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    source: Table,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    train: RawTrain,
    #[serde(default)]
    output: RawOutput,
}

/// A parsed experiment config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFile {
    pub config: ExperimentConfig,
    pub sweep: Option<SweepParameter>,
    pub output_dir: Option<PathBuf>,
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn sweep_table(t: &Option<Table>, what: &str) -> Result<Vec<(usize, Value)>> {
    let t = t
        .as_ref()
        .ok_or_else(|| Error::Config(format!("sweep needs `{what}`")))?;
    let mut out: Vec<(usize, Value)> = t
        .iter()
        .map(|(k, v)| {
            matrix_key(k)
                .map(|k| (k, v.clone()))
                .ok_or_else(|| Error::Config(format!("sweep {what}: unknown key {k:?}")))
        })
        .collect::<Result<_>>()?;
    out.sort_by_key(|e| e.0);
    Ok(out)
}

/// Parses an experiment config. Relative paths resolve against `base`.
pub fn parse_experiment(text: &str, base: &Path) -> Result<ExperimentFile> {
    let raw: RawExperiment = toml::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
    let src = &raw.source;
    for key in src.keys() {
        if matrix_key(key).is_none()
            && !matches!(key.as_str(), "N" | "labels" | "max_order")
            && !SOURCE_KEYS.contains(&key.as_str())
        {
            return Err(Error::Config(format!("unknown key {key:?} in [source]")));
        }
    }
    let kind = src.get("kind").and_then(Value::as_str).unwrap_or("sbtm");
    let source = match kind {
        "sbtm" => {
            let spec = match src.get("spec").and_then(Value::as_str) {
                Some(p) => read_spec(&resolve(base, p))?,
                None => spec_from_table(src, &SOURCE_KEYS)?,
            };
            let shuffle = src.get("shuffle").map(|v| v.as_bool().unwrap_or(true)).unwrap_or(true);
            Source::Sbtm { spec, shuffle }
        }
        "dataset" => {
            let path = |key: &str| {
                src.get(key)
                    .and_then(Value::as_str)
                    .map(|p| resolve(base, p))
                    .ok_or_else(|| Error::Config(format!("dataset source needs `{key}`")))
            };
            Source::Dataset(load_dataset(&path("edges")?, &path("labels")?)?)
        }
        other => return Err(Error::Config(format!("unknown source kind {other:?}"))),
    };

    let mut cfg = ExperimentConfig::new(source);
    let s = &raw.sweep;
    if let Some(r) = s.prior_ratio {
        cfg.prior_ratio = r;
    }
    if let Some(m) = &s.m_values {
        cfg.m_values = m.clone();
    }
    if let Some(a) = &s.alpha_values {
        cfg.alpha_values = a.clone();
    }
    match &s.seeds {
        None => {}
        Some(Value::Integer(n)) if *n > 0 => cfg.seeds = (0..*n as u64).collect(),
        Some(Value::Array(a)) => {
            cfg.seeds = a
                .iter()
                .map(|v| {
                    v.as_integer()
                        .filter(|&x| x >= 0)
                        .map(|x| x as u64)
                        .ok_or_else(|| Error::Config("seeds must be non-negative integers".into()))
                })
                .collect::<Result<_>>()?
        }
        Some(_) => return Err(Error::Config("seeds must be a count or a list".into())),
    }
    let t = &raw.train;
    let d = TrainConfig::default();
    cfg.train = TrainConfig {
        learning_rate: t.learning_rate.unwrap_or(d.learning_rate),
        epochs: t.epochs.unwrap_or(d.epochs),
        beta1: t.beta1.unwrap_or(d.beta1),
        beta2: t.beta2.unwrap_or(d.beta2),
        adam_eps: t.adam_eps.unwrap_or(d.adam_eps),
        ..d
    };
    cfg.max_order = t.max_order.unwrap_or(DEFAULT_MAX_ORDER);
    cfg.init = match (t.init.as_deref(), t.noise_sigma) {
        (None | Some("rw"), None) => InitSource::RandomWalk,
        (Some("noisy_truth") | None, Some(sigma)) => InitSource::NoisyTruth { sigma },
        (Some(path), None) => InitSource::External(read_distribution(&resolve(base, path))?.0),
        (Some(other), Some(_)) => return Err(Error::Config(format!("noise_sigma conflicts with init = {other:?}"))),
    };

    let points = s.points.unwrap_or(5);
    let sweep = match s.parameter.as_deref() {
        None | Some("none") => None,
        Some("homo") => {
            let start = sweep_table(&s.start, "start")?;
            let end = sweep_table(&s.end, "end")?;
            let conv = |v: Vec<(usize, Value)>| -> Result<Vec<(usize, Vec<f64>)>> {
                v.into_iter().map(|(k, x)| Ok((k, value_vec(&x, "sweep")?))).collect()
            };
            Some(SweepParameter::Homo {
                start: conv(start)?,
                end: conv(end)?,
                points,
            })
        }
        Some("hetero") => {
            let conv = |v: Vec<(usize, Value)>| -> Result<Vec<(usize, f64)>> {
                v.into_iter().map(|(k, x)| Ok((k, value_f64(&x, "sweep")?))).collect()
            };
            Some(SweepParameter::Hetero {
                start: conv(sweep_table(&s.start, "start")?)?,
                end: conv(sweep_table(&s.end, "end")?)?,
                points,
            })
        }
        Some(p @ ("prior_ratio" | "alpha")) => {
            let v = s
                .values
                .clone()
                .ok_or_else(|| Error::Config(format!("{p} sweep needs `values`")))?;
            Some(if p == "alpha" {
                SweepParameter::Alpha(v)
            } else {
                SweepParameter::PriorRatio(v)
            })
        }
        Some(other) => return Err(Error::Config(format!("unknown sweep parameter {other:?}"))),
    };
    if let Some(sw) = &sweep {
        if sw.is_empty() {
            return Err(Error::Config("sweep has no points".into()));
        }
    }
    cfg.validate()?;
    Ok(ExperimentFile {
        config: cfg,
        sweep,
        output_dir: raw.output.dir.map(|d| resolve(base, &d)),
    })
}

pub fn read_experiment(path: &Path) -> Result<ExperimentFile> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_experiment(&read(path)?, base)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn format_report_rows(r: &ExperimentReport) -> String {
    let mut s = String::from("seed,method,alpha,m,accuracy,pi,gain,labelled,objective\n");
    for row in &r.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            row.seed,
            row.method,
            row.alpha,
            row.method.order(),
            row.accuracy,
            row.pi,
            row.gain,
            row.labelled,
            fmt_opt(row.objective)
        );
    }
    s
}

pub fn format_summary(r: &ExperimentReport) -> String {
    let mut s = String::from("method,alpha,m,runs,mean_accuracy,std_accuracy,mean_gain,std_gain\n");
    for row in &r.summary {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            row.method,
            row.alpha,
            row.method.order(),
            row.runs,
            row.mean_accuracy,
            row.std_accuracy,
            row.mean_gain,
            row.std_gain
        );
    }
    s
}

pub fn format_trajectories(r: &ExperimentReport) -> String {
    let mut s = String::from("seed,alpha,m,epoch,objective\n");
    for t in &r.trajectories {
        for (e, v) in t.values.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{e},{v}", t.seed, t.alpha, t.order);
        }
    }
    s
}

pub fn format_report_census(r: &ExperimentReport) -> String {
    let mut s = String::from("seed,k,total,intra,inter\n");
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for (seed, c) in &r.censuses {
        for row in &c.rows {
            let _ = writeln!(
                s,
                "{seed},{},{},{},{}",
                row.k,
                row.total,
                opt(row.intra),
                opt(row.inter)
            );
        }
    }
    s
}

/// Wide table with one row per alpha: mean PI accuracy and the mean gain of
/// every SI order.
pub fn format_gains(r: &ExperimentReport) -> String {
    let mut alphas: Vec<f64> = Vec::new();
    let mut orders: Vec<usize> = Vec::new();
    for row in &r.summary {
        if !alphas.contains(&row.alpha) {
            alphas.push(row.alpha);
        }
        if let Method::Si(m) = row.method {
            if !orders.contains(&m) {
                orders.push(m);
            }
        }
    }
    orders.sort_unstable();
    let mut s = String::from("alpha,mean_pi");
    for m in &orders {
        let _ = write!(s, ",mean_gain_SI-{m}");
    }
    s.push('\n');
    for &a in &alphas {
        let pis: Vec<f64> = r.rows_for(Method::Rw, a).map(|row| row.pi).collect();
        let pi = pis.iter().sum::<f64>() / pis.len().max(1) as f64;
        let _ = write!(s, "{a},{pi}");
        for &m in &orders {
            let _ = write!(s, ",{}", r.mean_gain(m, a).unwrap_or(f64::NAN));
        }
        s.push('\n');
    }
    s
}

fn format_warnings(w: &[String]) -> String {
    w.iter().map(|x| format!("{x}\n")).collect()
}

/// Writes `report.csv`, `summary.csv`, `gains.csv`, `trajectories.csv`,
/// `census.csv` and `warnings.txt` into `dir`.
pub fn write_report(dir: &Path, r: &ExperimentReport) -> Result<()> {
    write(&dir.join("report.csv"), &format_report_rows(r))?;
    write(&dir.join("summary.csv"), &format_summary(r))?;
    write(&dir.join("gains.csv"), &format_gains(r))?;
    write(&dir.join("trajectories.csv"), &format_trajectories(r))?;
    write(&dir.join("census.csv"), &format_report_census(r))?;
    write(&dir.join("warnings.txt"), &format_warnings(&r.warnings))
}

pub fn format_sweep(parameter: &str, points: &[SweepPoint]) -> String {
    let mut s =
        String::from("point,parameter,value,method,alpha,m,runs,mean_accuracy,std_accuracy,mean_gain,std_gain\n");
    for p in points {
        for row in &p.report.summary {
            let _ = writeln!(
                s,
                "{},{parameter},{},{},{},{},{},{},{},{},{}",
                p.index,
                p.description,
                row.method,
                row.alpha,
                row.method.order(),
                row.runs,
                row.mean_accuracy,
                row.std_accuracy,
                row.mean_gain,
                row.std_gain
            );
        }
    }
    s
}

/// Writes `sweep.csv` plus one report directory per point.
pub fn write_sweep(dir: &Path, parameter: &str, points: &[SweepPoint]) -> Result<()> {
    write(&dir.join("sweep.csv"), &format_sweep(parameter, points))?;
    let mut warnings = Vec::new();
    for p in points {
        write_report(&dir.join(format!("point_{}", p.index)), &p.report)?;
        warnings.extend(p.report.warnings.iter().map(|w| format!("point {}: {w}", p.index)));
    }
    write(&dir.join("warnings.txt"), &format_warnings(&warnings))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_tokens_and_comments() {
        let e = parse_edge_tokens("# header\n1 2\n\n2 3 # trailing\n").unwrap();
        assert_eq!(e, vec![("1".into(), "2".into()), ("2".into(), "3".into())]);
        let err = parse_edge_tokens("1 2\n3\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn labels_numeric_and_symbolic() {
        let (ids, names, labels) = parse_labels("a 2\nb 0\nc 2\n").unwrap();
        assert_eq!(ids, vec!["a", "b", "c"]);
        assert_eq!(names, vec!["0", "2"]);
        assert_eq!(labels, vec![1, 0, 1]);
        let (_, names, labels) = parse_labels("x Theory\ny AI\nz Theory\n").unwrap();
        assert_eq!(names, vec!["Theory", "AI"]);
        assert_eq!(labels, vec![0, 1, 0]);
        assert!(parse_labels("a 1\na 2\n").is_err());
    }

    #[test]
    fn distribution_round_trip_is_exact() {
        let d = LabelDistribution::new(2, 3, vec![0.1, 0.2, 0.7, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        let (back, w) = parse_distribution(&format_distribution(&d)).unwrap();
        assert!(w.is_empty());
        assert_eq!(back, d);
    }

    #[test]
    fn distribution_tolerances() {
        let (d, w) = parse_distribution("node,p_0,p_1\n0,0.5,0.5004\n").unwrap();
        assert_eq!(w.len(), 1);
        assert!((d.row(0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(parse_distribution("node,p_0,p_1\n0,0.5,0.6\n").is_err());
        assert!(parse_distribution("node,p_0,p_1\n0,NaN,1\n").is_err());
        assert!(parse_distribution("node,q_0\n0,1\n").is_err());
    }

    #[test]
    fn spec_forms() {
        let text = "N = [2, 3]\nB2 = [[0.5, 0.1], [0.1, 0.4]]\nB3 = { diag = [0.2, 0.3], off = 0.01 }\n";
        let spec = parse_spec(text).unwrap();
        assert_eq!(spec.max_order(), 3);
        assert_eq!(spec.matrix(3)[1][1], 0.3);
        assert_eq!(parse_spec(&format_spec(&spec)).unwrap(), spec);
        assert!(parse_spec("N = [2, 3]\nB3 = { diag = 0.1, off = 0.0 }\n").is_err());
        assert!(parse_spec("N = [2, 3]\nB2 = [[0.5, 0.2], [0.1, 0.4]]\n").is_err());
        assert!(parse_spec("N = [2, 3]\nlabels = 3\nB2 = { diag = 0.1, off = 0.0 }\n").is_err());
    }
}
