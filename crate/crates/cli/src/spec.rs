//! Problem specifications: JSON input, validation, and overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dirac_forge_core::{default_names, AutMatrix, Backend, Chart, Expr, Mode, ParseError, SampleBox};
use serde::Deserialize;

use crate::error::CliError;

/// Every check the pipeline knows, in the order it runs them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Orthogonal,
    Isotropy,
    Tau,
    Rank,
    IntegrableDirect,
    IntegrablePde,
    CrossCheck,
    Recover,
    Theta,
    Norm,
    Path,
    Component,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::Orthogonal,
        Check::Isotropy,
        Check::Tau,
        Check::Rank,
        Check::IntegrableDirect,
        Check::IntegrablePde,
        Check::CrossCheck,
        Check::Recover,
        Check::Theta,
        Check::Norm,
        Check::Path,
        Check::Component,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::Orthogonal => "orthogonal",
            Check::Isotropy => "isotropy",
            Check::Tau => "tau",
            Check::Rank => "rank",
            Check::IntegrableDirect => "integrable-direct",
            Check::IntegrablePde => "integrable-pde",
            Check::CrossCheck => "cross-check",
            Check::Recover => "recover",
            Check::Theta => "theta",
            Check::Norm => "norm",
            Check::Path => "path",
            Check::Component => "component",
        }
    }

    /// Checks that only make sense for an orthogonal matrix.
    pub fn needs_orthogonal(self) -> bool {
        !matches!(self, Check::Orthogonal | Check::Theta | Check::Norm)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown check {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeChoice {
    Exact,
    Numeric,
    /// Exact when every entry is polynomial, numeric otherwise.
    Auto,
}

impl ModeChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeChoice::Exact => "exact",
            ModeChoice::Numeric => "numeric",
            ModeChoice::Auto => "auto",
        }
    }
}

impl FromStr for ModeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(ModeChoice::Exact),
            "numeric" => Ok(ModeChoice::Numeric),
            "auto" => Ok(ModeChoice::Auto),
            _ => Err(format!("unknown backend mode {s:?} (expected exact, numeric or auto)")),
        }
    }
}

/// Command-line values that replace the corresponding spec fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<ModeChoice>,
    pub tolerance: Option<f64>,
    pub points: Option<usize>,
    pub sample_box: Option<Vec<(f64, f64)>>,
    pub checks: Option<Vec<Check>>,
    pub extended_pairs: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBackend {
    mode: Option<String>,
    #[serde(rename = "box")]
    sample_box: Option<serde_json::Value>,
    points: Option<usize>,
    tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    n: Option<usize>,
    vars: Option<Vec<String>>,
    matrix: Option<Vec<Vec<String>>>,
    checks: Option<Vec<String>>,
    backend: Option<RawBackend>,
    extended_pairs: Option<bool>,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub name: String,
    pub source: String,
    pub chart: Chart,
    /// Entry strings as written.
    pub entries: Vec<Vec<String>>,
    pub matrix: AutMatrix,
    /// Requested checks, deduplicated, in canonical order.
    pub checks: Vec<Check>,
    pub mode: ModeChoice,
    pub sample_box: Vec<(f64, f64)>,
    pub points: usize,
    pub tolerance: f64,
    pub extended_pairs: bool,
}

impl ProblemSpec {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// The backend the checks run under, with `auto` resolved.
    pub fn backend(&self) -> Result<Backend, CliError> {
        let mode = match self.mode {
            ModeChoice::Exact => Mode::Exact,
            ModeChoice::Numeric => Mode::Numeric,
            ModeChoice::Auto if self.matrix.is_polynomial() => Mode::Exact,
            ModeChoice::Auto => Mode::Numeric,
        };
        let sample_box = SampleBox::per_axis(self.sample_box.clone()).map_err(CliError::Backend)?;
        Backend::new(mode, sample_box, self.points, self.tolerance).map_err(CliError::Backend)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(t) = o.tolerance {
            self.tolerance = t;
        }
        if let Some(p) = o.points {
            self.points = p;
        }
        if let Some(b) = &o.sample_box {
            self.sample_box = b.clone();
        }
        if let Some(c) = &o.checks {
            self.checks = canonical_checks(c.iter().copied());
        }
        if let Some(e) = o.extended_pairs {
            self.extended_pairs = e;
        }
        validate_backend(self.mode, self.tolerance, self.points, &self.sample_box, self.dim())
    }
}

fn canonical_checks(checks: impl IntoIterator<Item = Check>) -> Vec<Check> {
    let mut v: Vec<Check> = checks.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn validate_backend(
    mode: ModeChoice,
    tol: f64,
    points: usize,
    sample_box: &[(f64, f64)],
    n: usize,
) -> Result<(), CliError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(schema(format!("tolerance {tol} must be a finite nonnegative number")));
    }
    if mode == ModeChoice::Numeric && tol <= 0.0 {
        return Err(schema("tolerance must be positive in numeric mode"));
    }
    if points == 0 {
        return Err(schema("points per axis must be positive"));
    }
    if sample_box.len() != 1 && sample_box.len() != n {
        return Err(schema(format!("box has {} intervals, expected 1 or {n}", sample_box.len())));
    }
    for &(lo, hi) in sample_box {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(schema(format!("invalid box interval [{lo}, {hi}]")));
        }
    }
    Ok(())
}

fn interval(v: &serde_json::Value) -> Option<(f64, f64)> {
    match v.as_array()?.as_slice() {
        [lo, hi] => Some((lo.as_f64()?, hi.as_f64()?)),
        _ => None,
    }
}

/// `[lo, hi]` for every axis, or one `[lo, hi]` per axis.
fn parse_box(v: &serde_json::Value) -> Result<Vec<(f64, f64)>, CliError> {
    if let Some(iv) = interval(v) {
        return Ok(vec![iv]);
    }
    v.as_array()
        .and_then(|axes| axes.iter().map(interval).collect::<Option<Vec<_>>>())
        .ok_or_else(|| schema("box must be [lo, hi] or a list of [lo, hi]"))
}

/// `"lo,hi"` or `"lo,hi;lo,hi;..."` from the command line.
pub fn parse_box_flag(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(';')
        .map(|axis| {
            let parts: Vec<&str> = axis.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [lo, hi] => {
                    let lo: f64 = lo.parse().map_err(|_| format!("bad bound {lo:?}"))?;
                    let hi: f64 = hi.parse().map_err(|_| format!("bad bound {hi:?}"))?;
                    Ok((lo, hi))
                }
                _ => Err(format!("expected lo,hi but got {axis:?}")),
            }
        })
        .collect()
}

fn from_raw(raw: RawSpec, source: &str, index: usize) -> Result<ProblemSpec, CliError> {
    let name = raw.name.unwrap_or_else(|| format!("spec-{index}"));
    let matrix = raw.matrix.ok_or_else(|| schema("missing field `matrix`"))?;
    let n = match raw.n {
        Some(n) => n,
        None => raw.vars.as_ref().map_or(matrix.len(), Vec::len),
    };
    if n == 0 {
        return Err(schema("dimension n must be positive"));
    }
    let vars = raw.vars.unwrap_or_else(|| default_names(n));
    if vars.len() != n {
        return Err(schema(format!("{} variable names for dimension {n}", vars.len())));
    }
    let chart = Chart::with_names(vars).map_err(|e| schema(e.to_string()))?;
    if matrix.len() != n {
        return Err(schema(format!("matrix has {} rows, expected {n}", matrix.len())));
    }
    for (r, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(schema(format!("matrix row {r} has {} entries, expected {n}", row.len())));
        }
    }
    let mut parsed = Vec::with_capacity(n);
    for (r, row) in matrix.iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (c, text) in row.iter().enumerate() {
            let e: Expr = chart.parse(text).map_err(|error: ParseError| CliError::Entry {
                row: r,
                col: c,
                text: text.clone(),
                error,
            })?;
            out.push(e);
        }
        parsed.push(out);
    }
    let aut = AutMatrix::from_rows(parsed).map_err(|e| schema(e.to_string()))?;

    let checks = match raw.checks {
        None => Check::ALL.to_vec(),
        Some(list) => {
            canonical_checks(list.iter().map(|s| s.parse::<Check>()).collect::<Result<Vec<_>, _>>().map_err(schema)?)
        }
    };
    let backend = raw.backend.unwrap_or(RawBackend { mode: None, sample_box: None, points: None, tol: None });
    let mode = match backend.mode {
        Some(m) => m.parse().map_err(schema)?,
        None => ModeChoice::Auto,
    };
    let sample_box = match &backend.sample_box {
        Some(v) => parse_box(v)?,
        None => vec![(-1.0, 1.0)],
    };
    let points = backend.points.unwrap_or(dirac_forge_core::DEFAULT_POINTS);
    let tolerance = backend.tol.unwrap_or(dirac_forge_core::DEFAULT_TOLERANCE);
    validate_backend(mode, tolerance, points, &sample_box, n)?;
    Ok(ProblemSpec {
        name,
        source: source.to_string(),
        chart,
        entries: matrix,
        matrix: aut,
        checks,
        mode,
        sample_box,
        points,
        tolerance,
        extended_pairs: raw.extended_pairs.unwrap_or(false),
    })
}

/// One entry of an input document: a validated spec or the reason it was rejected.
#[derive(Debug)]
pub struct Loaded {
    pub source: String,
    /// Name from the document (or `spec-<i>`), even if validation failed.
    pub name: Option<String>,
    pub spec: Result<ProblemSpec, CliError>,
}

/// Parse one document holding a single spec, an array of specs, or `{"specs": [...]}`.
pub fn load_str(text: &str, source: &str) -> Result<Vec<Loaded>, CliError> {
    if text.trim().is_empty() {
        return Err(schema("empty spec"));
    }
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let items = match doc {
        serde_json::Value::Array(items) => items,
        serde_json::Value::Object(mut map) if map.contains_key("specs") => match map.remove("specs") {
            Some(serde_json::Value::Array(items)) if map.is_empty() => items,
            _ => return Err(schema("`specs` must be the only field and hold an array")),
        },
        other => vec![other],
    };
    let multi = items.len() > 1;
    Ok(items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let source = if multi { format!("{source}#{i}") } else { source.to_string() };
            let name =
                Some(item.get("name").and_then(|v| v.as_str()).map_or_else(|| format!("spec-{i}"), str::to_string));
            let spec = serde_json::from_value::<RawSpec>(item)
                .map_err(|e| schema(e.to_string()))
                .and_then(|raw| from_raw(raw, &source, i));
            Loaded { source, name, spec }
        })
        .collect())
}

/// A file, or every `*.json` file in a directory in name order.
pub fn load_path(path: &Path) -> Result<Vec<Loaded>, CliError> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for file in files {
        let source = file.file_name().map_or_else(|| file.display().to_string(), |n| n.to_string_lossy().into_owned());
        match std::fs::read_to_string(&file) {
            Ok(text) => match load_str(&text, &source) {
                Ok(items) => out.extend(items),
                Err(e) => out.push(Loaded { source, name: None, spec: Err(e) }),
            },
            Err(e) => out.push(Loaded {
                source,
                name: None,
                spec: Err(CliError::Io { path: file.display().to_string(), message: e.to_string() }),
            }),
        }
    }
    Ok(out)
}
