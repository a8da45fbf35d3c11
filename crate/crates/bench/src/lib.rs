//! Fixtures shared by the benchmarks.

use dirac_forge_core::{AutMatrix, Chart, Expr};

/// 2×2 rotation by the function written in `f` over `x, y`.
pub fn rotation_by(f: &str) -> AutMatrix {
    AutMatrix::rotation(Chart::new(2).unwrap().parse(f).unwrap())
}

/// Constant rotation with cosine 3/5 and sine 4/5.
pub fn rotation_3_4_5() -> AutMatrix {
    let c = Chart::new(2).unwrap();
    AutMatrix::parse(&c, &[vec!["3/5", "-4/5"], vec!["4/5", "3/5"]]).unwrap()
}

pub const EXPRESSIONS: [&str; 4] =
    ["(x + y)^6", "sin(x)^2 + cos(x)^2", "exp(x*y)*(1 - x)^3", "3/4*x^4 - 5/7*x*y^3 + y^2"];

pub fn parse_all(chart: &Chart) -> Vec<Expr> {
    EXPRESSIONS.iter().map(|s| chart.parse(s).unwrap()).collect()
}
