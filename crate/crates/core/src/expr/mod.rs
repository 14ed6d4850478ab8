//! Exact scalars, polynomials, rational functions and trigonometric
//! polynomials in group angles.

mod chart;
mod gcd;
mod parse;
mod poly;
mod ratfn;
mod subst;
mod trig;

use thiserror::Error;

pub(crate) use chart::is_identifier;
pub use chart::Chart;
pub use gcd::{gcd, lcm};
pub use parse::parse_expr;
pub(crate) use poly::rat_to_f64;
pub use poly::{Monomial, Poly, PolyRing};
pub use ratfn::RatFn;
pub use subst::{substitute, Binding, Substituted, TrigFraction};
pub use trig::{trig_integrate, AngleDomain, AngleMeasure, Harmonic, TrigPoly};

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
pub type Rat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("unknown coordinate {name:?}{}", position.map(|p| format!(" at {p}")).unwrap_or_default())]
    UnknownCoordinate { name: String, position: Option<usize> },
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("denominator became the zero polynomial after substitution")]
    ZeroDenominatorAfterSubstitution,
    #[error("substituted denominator depends on the group angles")]
    AngleDependentDenominator,
    #[error("weight integrates to {0}, not 1")]
    NonNormalizedWeight(String),
    #[error("integral has a non-rational part (power of pi {0})")]
    IrrationalIntegral(i64),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Shorthand for `n / d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Parses a rational literal such as `"3"`, `"-1/2"`.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if d == num_bigint::BigInt::from(0) {
        return None;
    }
    Some(Rat::new(n, d))
}
