use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exact mode requires polynomial expressions")]
    NotPolynomial,
    #[error("invalid backend configuration: {0}")]
    Backend(String),
    #[error("invalid chart: {0}")]
    Chart(String),
    #[error("matrix is not orthogonal under the active backend")]
    NotOrthogonal,
    #[error("matrix entries must be constant")]
    NonConstant,
    #[error("matrix must be {expected}x{expected}, found {rows}x{cols}")]
    Shape { expected: usize, rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is not a polynomial of degree at most one")]
    NotAffine { row: usize, col: usize },
    #[error("constant part is singular")]
    SingularConstantPart,
    #[error("(P1 - P2) is singular on the generators{}", fmt_point(.point))]
    SingularGenerators { point: Option<Vec<f64>> },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("path denominator is singular at t = {t}")]
    SingularDenominator { t: f64 },
}

fn fmt_point(p: &Option<Vec<f64>>) -> String {
    match p {
        Some(p) => format!(" at {p:?}"),
        None => String::new(),
    }
}
