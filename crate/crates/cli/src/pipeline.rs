//! Runs the requested checks for one spec, in canonical order.

use std::time::Instant;

use dirac_forge_core::{
    build_generators, check_integrable_direct, check_rank, classify_component, is_orthogonal, isotropy_residuals,
    min_sampled_rank, pde_residual, recover_automorphism, sample_path, sup_norm_profile, tau_residuals, theta_map,
    AutMatrix, Backend, Chart, DiracGenerators, Error, IntegrabilityVerdict, Mode, Recovered, Residual, TestField,
};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{combine_exit, CliError, EXIT_BACKEND_ERROR, EXIT_CHECK_FAILED, EXIT_PASS};
use crate::spec::{Check, Loaded, ProblemSpec};

/// Path samples on `[0, 1]`, endpoints included.
pub const PATH_SAMPLES: usize = 101;
/// Allowed `|f(0) − I|` and `|f(1) − A|`.
pub const PATH_ENDPOINT_TOL: f64 = 1e-12;
/// Allowed `|f(t) f(t)ᵀ − I|` along the path.
pub const PATH_ORTHOGONALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Error => "error",
        }
    }

    fn of(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub check: Check,
    pub status: Status,
    pub reason: Option<String>,
    pub detail: Value,
}

/// Something a reader of the report should look at, independent of pass/fail.
#[derive(Clone, Debug, PartialEq)]
pub struct Finding {
    pub kind: &'static str,
    /// What is being instrumented, e.g. `pde-vs-direct`.
    pub location: &'static str,
    pub fatal: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecReport {
    pub index: usize,
    pub name: Option<String>,
    pub source: String,
    /// Echo of the validated spec; `None` when it was rejected.
    pub spec: Option<Value>,
    pub backend: Option<Value>,
    pub outcomes: Vec<CheckOutcome>,
    pub findings: Vec<Finding>,
    pub error: Option<CliError>,
    pub duration_ms: Option<f64>,
}

impl SpecReport {
    pub fn exit_code(&self) -> i32 {
        if let Some(e) = &self.error {
            return e.exit_code();
        }
        let mut code = EXIT_PASS;
        for o in &self.outcomes {
            code = combine_exit(
                code,
                match o.status {
                    Status::Error => EXIT_BACKEND_ERROR,
                    Status::Fail => EXIT_CHECK_FAILED,
                    Status::Pass | Status::Skipped => EXIT_PASS,
                },
            );
        }
        if self.findings.iter().any(|f| f.fatal) {
            code = combine_exit(code, EXIT_CHECK_FAILED);
        }
        code
    }

    pub fn status(&self) -> &'static str {
        match self.exit_code() {
            EXIT_PASS => "pass",
            EXIT_CHECK_FAILED => "fail",
            _ => "error",
        }
    }

    pub fn outcome(&self, check: Check) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.check == check)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub seed: Option<String>,
    pub reports: Vec<SpecReport>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.reports.iter().map(SpecReport::exit_code).fold(EXIT_PASS, combine_exit)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub timing: bool,
}

/// Runs every loaded spec; independent specs run in parallel, results stay in input order.
pub fn run_all(loaded: &[Loaded], seed: Option<String>, options: RunOptions) -> RunReport {
    let reports = loaded
        .par_iter()
        .enumerate()
        .map(|(index, item)| match &item.spec {
            Ok(spec) => run_spec(spec, index, options),
            Err(e) => SpecReport {
                index,
                name: item.name.clone(),
                source: item.source.clone(),
                spec: None,
                backend: None,
                outcomes: Vec::new(),
                findings: Vec::new(),
                error: Some(e.clone()),
                duration_ms: None,
            },
        })
        .collect();
    RunReport { seed, reports }
}

pub fn run_spec(spec: &ProblemSpec, index: usize, options: RunOptions) -> SpecReport {
    let started = Instant::now();
    let mut report = SpecReport {
        index,
        name: Some(spec.name.clone()),
        source: spec.source.clone(),
        spec: Some(spec_echo(spec)),
        backend: None,
        outcomes: Vec::new(),
        findings: Vec::new(),
        error: None,
        duration_ms: None,
    };
    match spec.backend() {
        Ok(backend) => {
            report.backend = Some(backend_echo(spec, &backend));
            let mut ctx = Context::new(spec, backend);
            for &check in &spec.checks {
                let outcome = ctx.run(check);
                report.outcomes.push(outcome);
            }
            report.findings = ctx.findings;
        }
        Err(e) => report.error = Some(e),
    }
    if options.timing {
        report.duration_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    report
}

fn spec_echo(spec: &ProblemSpec) -> Value {
    json!({
        "n": spec.dim(),
        "vars": spec.chart.names(),
        "matrix": spec.entries,
        "checks": spec.checks.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        "extended_pairs": spec.extended_pairs,
    })
}

fn backend_echo(spec: &ProblemSpec, backend: &Backend) -> Value {
    json!({
        "mode": backend.mode.as_str(),
        "requested_mode": spec.mode.as_str(),
        "box": spec.sample_box.iter().map(|&(lo, hi)| json!([lo, hi])).collect::<Vec<_>>(),
        "points": backend.points_per_axis,
        "tolerance": backend.tolerance,
    })
}

pub fn residual_json(r: &Residual) -> Value {
    json!({ "index": r.index, "zero": r.zero, "max_abs": r.max_abs })
}

fn residual_table(rs: &[Residual]) -> Value {
    Value::Array(rs.iter().map(residual_json).collect())
}

fn max_of(rs: &[Residual]) -> Option<f64> {
    rs.iter().filter_map(|r| r.max_abs).reduce(f64::max)
}

fn test_field_text(t: &TestField, chart: &Chart) -> String {
    let d = format!("d/d{}", chart.names()[t.direction]);
    match t.coefficient {
        Some(v) => format!("{}*{d}", chart.names()[v]),
        None => d,
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|r| json!((0..m.ncols()).map(|c| m[(r, c)]).collect::<Vec<_>>())).collect())
}

/// Results shared between checks of one spec.
struct Context<'a> {
    spec: &'a ProblemSpec,
    backend: Backend,
    orthogonal: Option<Result<bool, Error>>,
    generators: Option<Result<DiracGenerators, Error>>,
    direct: Option<Result<IntegrabilityVerdict, Error>>,
    pde: Option<Result<IntegrabilityVerdict, Error>>,
    findings: Vec<Finding>,
}

fn outcome(check: Check, status: Status, detail: Value) -> CheckOutcome {
    CheckOutcome { check, status, reason: None, detail }
}

fn skipped(check: Check, reason: impl Into<String>) -> CheckOutcome {
    CheckOutcome { check, status: Status::Skipped, reason: Some(reason.into()), detail: Value::Null }
}

fn errored(check: Check, e: &Error) -> CheckOutcome {
    CheckOutcome { check, status: Status::Error, reason: Some(e.to_string()), detail: Value::Null }
}

impl<'a> Context<'a> {
    fn new(spec: &'a ProblemSpec, backend: Backend) -> Self {
        Context { spec, backend, orthogonal: None, generators: None, direct: None, pde: None, findings: Vec::new() }
    }

    fn b(&self) -> &AutMatrix {
        &self.spec.matrix
    }

    fn orthogonal(&mut self) -> Result<bool, Error> {
        if self.orthogonal.is_none() {
            self.orthogonal = Some(is_orthogonal(&self.spec.matrix, &self.backend));
        }
        self.orthogonal.clone().unwrap()
    }

    fn generators(&mut self) -> Result<DiracGenerators, Error> {
        if self.generators.is_none() {
            self.generators = Some(build_generators(&self.spec.matrix, &self.backend));
        }
        self.generators.clone().unwrap()
    }

    fn direct(&mut self) -> Result<IntegrabilityVerdict, Error> {
        if self.direct.is_none() {
            let v = check_integrable_direct(&self.spec.matrix, &self.backend, self.spec.extended_pairs);
            if let Ok(v) = &v {
                self.record_direct_findings(v);
            }
            self.direct = Some(v);
        }
        self.direct.clone().unwrap()
    }

    fn pde(&mut self) -> Result<IntegrabilityVerdict, Error> {
        if self.pde.is_none() {
            self.pde = Some(pde_residual(&self.spec.matrix, &self.backend));
        }
        self.pde.clone().unwrap()
    }

    fn run(&mut self, check: Check) -> CheckOutcome {
        if check.needs_orthogonal() {
            match self.orthogonal() {
                Ok(true) => {}
                Ok(false) => return skipped(check, "matrix is not orthogonal"),
                Err(e) => return errored(check, &e),
            }
        }
        let result = match check {
            Check::Orthogonal => self.check_orthogonal(),
            Check::Isotropy => self.check_residuals(check, isotropy_residuals),
            Check::Tau => self.check_residuals(check, tau_residuals),
            Check::Rank => self.check_rank(),
            Check::IntegrableDirect => self.check_direct(),
            Check::IntegrablePde => self.check_pde(),
            Check::CrossCheck => self.check_cross(),
            Check::Recover => self.check_recover(),
            Check::Theta => return self.check_theta(),
            Check::Norm => self.check_norm(),
            Check::Path => return self.check_path(),
            Check::Component => return self.check_component(),
        };
        result.unwrap_or_else(|e| errored(check, &e))
    }

    fn check_orthogonal(&mut self) -> Result<CheckOutcome, Error> {
        let ok = self.orthogonal()?;
        let b = self.b();
        let defect = b.mul(&b.transpose())?.sub(&AutMatrix::identity(b.dim()))?;
        let n = b.dim();
        let residuals = (0..n * n)
            .map(|k| Residual::of(vec![k / n, k % n], &[defect.entries()[k].clone()], &self.backend))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(outcome(
            Check::Orthogonal,
            Status::of(ok),
            json!({ "orthogonal": ok, "max_residual": max_of(&residuals), "residuals": residual_table(&residuals) }),
        ))
    }

    fn check_residuals(
        &mut self,
        check: Check,
        f: fn(&DiracGenerators, &Backend) -> Result<Vec<Residual>, Error>,
    ) -> Result<CheckOutcome, Error> {
        let l = self.generators()?;
        let residuals = f(&l, &self.backend)?;
        let ok = residuals.iter().all(|r| r.zero);
        Ok(outcome(
            check,
            Status::of(ok),
            json!({ "max_residual": max_of(&residuals), "residuals": residual_table(&residuals) }),
        ))
    }

    fn check_rank(&mut self) -> Result<CheckOutcome, Error> {
        let l = self.generators()?;
        let ok = check_rank(&l, &self.backend)?;
        let sampled = match self.backend.mode {
            Mode::Numeric => Some(min_sampled_rank(&l, &self.backend)?),
            Mode::Exact => None,
        };
        Ok(outcome(
            Check::Rank,
            Status::of(ok),
            json!({ "expected": l.dim(), "generators": l.len(), "full_rank": ok, "min_sampled_rank": sampled }),
        ))
    }

    fn record_direct_findings(&mut self, v: &IntegrabilityVerdict) {
        if let Some(m) = &v.membership {
            if m.diverges {
                self.findings.push(Finding {
                    kind: "membership-divergence",
                    location: "closure-vs-membership",
                    fatal: true,
                    detail: json!({
                        "closure": v.integrable,
                        "membership": m.closed,
                        "max_residual": max_of(&m.residuals),
                    }),
                });
            }
        }
        if let Some(x) = &v.extended {
            if x.diverges {
                self.findings.push(Finding {
                    kind: "extended-pair-divergence",
                    location: "basis-vs-extended-pairs",
                    fatal: true,
                    detail: json!({ "basis": v.integrable, "extended": x.integrable }),
                });
            }
        }
    }

    fn check_direct(&mut self) -> Result<CheckOutcome, Error> {
        let v = self.direct()?;
        let chart = &self.spec.chart;
        let membership = v.membership.as_ref().map(|m| {
            json!({
                "closed": m.closed,
                "diverges": m.diverges,
                "max_residual": max_of(&m.residuals),
                "residuals": residual_table(&m.residuals),
            })
        });
        let extended = v.extended.as_ref().map(|x| {
            let nonzero: Vec<Value> = x
                .residuals
                .iter()
                .filter(|p| !p.residual.zero)
                .map(|p| {
                    json!({
                        "first": test_field_text(&p.first, chart),
                        "second": test_field_text(&p.second, chart),
                        "max_abs": p.residual.max_abs,
                    })
                })
                .collect();
            json!({
                "integrable": x.integrable,
                "diverges": x.diverges,
                "pairs": x.residuals.len(),
                "max_residual": x.residuals.iter().filter_map(|p| p.residual.max_abs).reduce(f64::max),
                "nonzero": nonzero,
            })
        });
        Ok(outcome(
            Check::IntegrableDirect,
            Status::of(v.integrable),
            json!({
                "integrable": v.integrable,
                "max_residual": v.max_residual(),
                "residuals": residual_table(&v.residuals),
                "membership": membership,
                "extended": extended,
            }),
        ))
    }

    fn check_pde(&mut self) -> Result<CheckOutcome, Error> {
        let v = self.pde()?;
        Ok(outcome(
            Check::IntegrablePde,
            Status::of(v.integrable),
            json!({
                "integrable": v.integrable,
                "max_residual": v.max_residual(),
                "residuals": residual_table(&v.residuals),
            }),
        ))
    }

    fn check_cross(&mut self) -> Result<CheckOutcome, Error> {
        let direct = self.direct()?;
        let pde = self.pde()?;
        let agree = direct.integrable == pde.integrable;
        let max = json!({
            "integrable-direct": direct.max_residual(),
            "integrable-pde": pde.max_residual(),
        });
        if !agree {
            self.findings.push(Finding {
                kind: "oracle-disagreement",
                location: "pde-vs-direct",
                fatal: false,
                detail: json!({
                    "methods": ["integrable-direct", "integrable-pde"],
                    "authoritative": "integrable-direct",
                    "verdicts": { "integrable-direct": direct.integrable, "integrable-pde": pde.integrable },
                    "max_residual": max.clone(),
                }),
            });
        }
        Ok(outcome(
            Check::CrossCheck,
            Status::of(agree),
            json!({
                "agree": agree,
                "authoritative": "integrable-direct",
                "integrable": direct.integrable,
                "verdicts": { "integrable-direct": direct.integrable, "integrable-pde": pde.integrable },
                "max_residual": max,
            }),
        ))
    }

    fn check_recover(&mut self) -> Result<CheckOutcome, Error> {
        let l = self.generators()?;
        let recovered = recover_automorphism(&l, &self.backend)?;
        let defect = recovered.defect_against(self.b(), &self.backend)?;
        let (kind, matrix) = match &recovered {
            Recovered::Exact(a) => {
                let rows: Vec<Vec<String>> =
                    a.rows().map(|row| row.iter().map(|e| self.spec.chart.render(e)).collect()).collect();
                ("exact", json!(rows))
            }
            Recovered::Sampled(s) => ("sampled", json!({ "points": s.len() })),
        };
        let ok = match recovered {
            Recovered::Exact(_) => defect == 0.0,
            Recovered::Sampled(_) => defect <= self.backend.tolerance,
        };
        Ok(outcome(Check::Recover, Status::of(ok), json!({ "kind": kind, "max_defect": defect, "recovered": matrix })))
    }

    fn check_theta(&mut self) -> CheckOutcome {
        let b = self.b();
        if b.dim() != 2 {
            return skipped(Check::Theta, "theta coordinates are defined for 2x2 matrices");
        }
        match theta_map(b) {
            Ok(th) => {
                let det = th.determinant();
                let round_trip = th.reassemble() == *b;
                if det.to_string() != "1" {
                    self.findings.push(Finding {
                        kind: "theta-determinant-not-one",
                        location: "theta-invertibility",
                        fatal: false,
                        detail: json!({ "determinant": det.to_string() }),
                    });
                }
                let constant: Vec<Vec<String>> =
                    th.constant.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect();
                outcome(
                    Check::Theta,
                    Status::of(round_trip),
                    json!({
                        "constant": constant,
                        "linear": th.linear.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "determinant": det.to_string(),
                        "round_trip": round_trip,
                    }),
                )
            }
            Err(Error::NotAffine { row, col }) => {
                skipped(Check::Theta, format!("entry ({row}, {col}) is not a polynomial of degree at most one"))
            }
            Err(Error::SingularConstantPart) => CheckOutcome {
                check: Check::Theta,
                status: Status::Fail,
                reason: Some("constant part is singular".into()),
                detail: json!({ "singular_constant_part": true }),
            },
            Err(e) => errored(Check::Theta, &e),
        }
    }

    fn check_norm(&mut self) -> Result<CheckOutcome, Error> {
        let p = sup_norm_profile(self.b(), &self.backend)?;
        if p.unbounded {
            self.findings.push(Finding {
                kind: "unbounded-norm",
                location: "sup-norm-refinement",
                fatal: false,
                detail: json!({ "value": p.value, "refined": p.refined }),
            });
        }
        Ok(outcome(
            Check::Norm,
            Status::Pass,
            json!({
                "value": p.value,
                "refined": p.refined,
                "points": self.backend.points_per_axis,
                "refined_points": 2 * self.backend.points_per_axis - 1,
                "unbounded": p.unbounded,
            }),
        ))
    }

    fn check_path(&mut self) -> CheckOutcome {
        let b = self.b();
        if !b.is_constant() {
            return skipped(Check::Path, "matrix is not constant");
        }
        let n = b.dim();
        let target = b.eval_f64(&vec![0.0; n]);
        let eye = DMatrix::<f64>::identity(n, n);
        let mut singular_at = Vec::new();
        let mut worst_orth = 0.0_f64;
        let mut start_defect = None;
        let mut end_defect = None;
        let samples = sample_path(b, PATH_SAMPLES);
        let last = samples.len() - 1;
        for (k, s) in samples.into_iter().enumerate() {
            match s {
                Ok(s) => {
                    worst_orth = worst_orth.max(s.defect);
                    if k == 0 {
                        start_defect = Some((&s.matrix - &eye).amax());
                    }
                    if k == last {
                        end_defect = Some((&s.matrix - &target).amax());
                    }
                }
                Err(Error::SingularDenominator { t }) => singular_at.push(t),
                Err(e) => return errored(Check::Path, &e),
            }
        }
        let ok = singular_at.is_empty()
            && start_defect.is_some_and(|d| d <= PATH_ENDPOINT_TOL)
            && end_defect.is_some_and(|d| d <= PATH_ENDPOINT_TOL)
            && worst_orth <= PATH_ORTHOGONALITY_TOL;
        outcome(
            Check::Path,
            Status::of(ok),
            json!({
                "samples": PATH_SAMPLES,
                "singular_at": singular_at,
                "start_defect": start_defect,
                "end_defect": end_defect,
                "max_orthogonality_defect": worst_orth,
                "target": matrix_rows(&target),
            }),
        )
    }

    fn check_component(&mut self) -> CheckOutcome {
        let b = self.b();
        if !b.is_constant() {
            return skipped(Check::Component, "matrix is not constant");
        }
        match classify_component(b) {
            Ok(c) => {
                if c.is_minus_identity {
                    self.findings.push(Finding {
                        kind: "minus-identity-component",
                        location: "component-classification",
                        fatal: false,
                        detail: json!({
                            "determinant_sign": c.determinant_sign,
                            "note": "-I has determinant +1 and is reported separately from the label",
                        }),
                    });
                }
                outcome(
                    Check::Component,
                    Status::Pass,
                    json!({
                        "determinant": c.determinant,
                        "determinant_sign": c.determinant_sign,
                        "is_minus_identity": c.is_minus_identity,
                        "label": c.label(),
                    }),
                )
            }
            Err(e) => errored(Check::Component, &e),
        }
    }
}
