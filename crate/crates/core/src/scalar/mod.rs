//! Exact scalars: charts, polynomials and canonical rational functions.

mod chart;
mod expr;
mod parse;
pub mod poly;

pub use chart::{Chart, ChartRef};
#[allow(unused_imports)]
pub(crate) use chart::{ensure_same_chart, is_identifier, same_chart};
pub use expr::ScalarExpr;
pub use parse::parse_expr;
pub use poly::{fmt_rational, int, rat, Monomial, Poly, Rational};
