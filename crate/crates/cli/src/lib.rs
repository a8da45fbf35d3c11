//! Batch front end for `dirac-forge-core`: JSON problem specs in, canonical
//! reports out.

pub mod canonical;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod spec;

pub use error::{CliError, EXIT_BACKEND_ERROR, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_SPEC_ERROR};
pub use pipeline::{run_all, run_spec, CheckOutcome, Finding, RunOptions, RunReport, SpecReport, Status};
pub use report::{emit_report, Format};
pub use spec::{load_path, load_str, Check, ModeChoice, Overrides, ProblemSpec};

/// Environment variable echoed into every report.
pub const SEED_VAR: &str = "DIRAC_FORGE_SEED";
