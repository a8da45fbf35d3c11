//! Report serialization: canonical JSON or a plain-text summary.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::canonical::{format_float, to_canonical};
use crate::error::CliError;
use crate::pipeline::{Finding, RunReport, SpecReport, Status};
use crate::spec::Check;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format {s:?} (expected json or text)")),
        }
    }
}

fn error_json(e: &CliError) -> Value {
    let mut v = json!({ "kind": e.kind(), "message": e.to_string() });
    match e {
        CliError::Entry { row, col, error, .. } => {
            v["row"] = json!(row);
            v["col"] = json!(col);
            v["offset"] = json!(error.offset);
        }
        CliError::Json { line, column, .. } => {
            v["line"] = json!(line);
            v["column"] = json!(column);
        }
        _ => {}
    }
    v
}

fn finding_json(f: &Finding) -> Value {
    json!({ "kind": f.kind, "location": f.location, "fatal": f.fatal, "detail": f.detail })
}

pub fn spec_json(r: &SpecReport) -> Value {
    let mut verdicts = Map::new();
    for o in &r.outcomes {
        verdicts.insert(
            o.check.as_str().to_string(),
            json!({ "status": o.status.as_str(), "reason": o.reason, "detail": o.detail }),
        );
    }
    let mut v = json!({
        "index": r.index,
        "name": r.name,
        "source": r.source,
        "status": r.status(),
        "exit_code": r.exit_code(),
        "spec": r.spec,
        "backend": r.backend,
        "order": r.outcomes.iter().map(|o| o.check.as_str()).collect::<Vec<_>>(),
        "verdicts": Value::Object(verdicts),
        "audit": r.findings.iter().map(finding_json).collect::<Vec<_>>(),
        "error": r.error.as_ref().map(error_json),
    });
    if let Some(ms) = r.duration_ms {
        v["duration_ms"] = json!(ms);
    }
    v
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub specs: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub cross_checks: usize,
    pub agree: usize,
    pub disagree: usize,
    pub findings: usize,
    pub fatal_findings: usize,
}

pub fn summarize(run: &RunReport) -> Summary {
    let mut s = Summary { specs: run.reports.len(), ..Summary::default() };
    for r in &run.reports {
        match r.status() {
            "pass" => s.passed += 1,
            "fail" => s.failed += 1,
            _ => s.errors += 1,
        }
        if let Some(o) = r.outcome(Check::CrossCheck) {
            match o.status {
                Status::Pass => {
                    s.cross_checks += 1;
                    s.agree += 1;
                }
                Status::Fail => {
                    s.cross_checks += 1;
                    s.disagree += 1;
                }
                Status::Skipped | Status::Error => {}
            }
        }
        s.findings += r.findings.len();
        s.fatal_findings += r.findings.iter().filter(|f| f.fatal).count();
    }
    s
}

pub fn run_json(run: &RunReport) -> Value {
    let s = summarize(run);
    json!({
        "tool": "dirac-forge",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": run.seed,
        "reports": run.reports.iter().map(spec_json).collect::<Vec<_>>(),
        "summary": {
            "specs": s.specs,
            "passed": s.passed,
            "failed": s.failed,
            "errors": s.errors,
            "exit_code": run.exit_code(),
            "cross_check": { "run": s.cross_checks, "agree": s.agree, "disagree": s.disagree },
            "findings": s.findings,
            "fatal_findings": s.fatal_findings,
        },
    })
}

fn opt_float(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), format_float)
}

fn text_line(r: &SpecReport, out: &mut String) {
    let name = r.name.as_deref().unwrap_or("?");
    let _ = writeln!(out, "[{}] {} ({})", r.status(), name, r.source);
    if let Some(e) = &r.error {
        let _ = writeln!(out, "    error: {e}");
        return;
    }
    for o in &r.outcomes {
        let _ = write!(out, "    {:<18} {}", o.check.as_str(), o.status.as_str());
        if let Some(reason) = &o.reason {
            let _ = write!(out, ": {reason}");
        }
        if let Some(m) = o.detail.get("max_residual").and_then(Value::as_f64) {
            let _ = write!(out, "  max residual {}", format_float(m));
        }
        out.push('\n');
    }
    for f in &r.findings {
        let severity = if f.fatal { "fatal" } else { "note" };
        let _ = write!(out, "    audit [{severity}] {} at {}", f.kind, f.location);
        if let Some(m) = f.detail.get("max_residual").and_then(Value::as_object) {
            for (method, v) in m {
                let _ = write!(out, "  {method} {}", opt_float(v.as_f64()));
            }
        }
        out.push('\n');
    }
}

pub fn run_text(run: &RunReport) -> String {
    let s = summarize(run);
    let mut out = String::new();
    let _ = writeln!(out, "dirac-forge {}  seed: {}", env!("CARGO_PKG_VERSION"), run.seed.as_deref().unwrap_or("none"));
    for r in &run.reports {
        text_line(r, &mut out);
    }
    let _ = writeln!(
        out,
        "summary: {} specs, {} pass, {} fail, {} error; cross-check {} run, {} agree, {} disagree; {} findings ({} fatal); exit {}",
        s.specs,
        s.passed,
        s.failed,
        s.errors,
        s.cross_checks,
        s.agree,
        s.disagree,
        s.findings,
        s.fatal_findings,
        run.exit_code()
    );
    out
}

pub fn emit_report(run: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_canonical(&run_json(run)).into_bytes(),
        Format::Text => run_text(run).into_bytes(),
    }
}
