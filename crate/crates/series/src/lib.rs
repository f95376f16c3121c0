//! Exact truncated multivariate formal power series.
//!
//! Coefficients are arbitrary-precision rationals; truncation is by total
//! degree. Binary operations require equal arity and equal cutoff and
//! report a mismatch instead of silently truncating.

mod compose;
mod latex;
mod log_series;
mod monomial;
pub mod rational;
mod series;
mod transcendental;

pub use compose::{compose_factor_maps, invert_factor_map, invert_map, substitute};
pub use latex::{latex_monomial, latex_names, latex_rational, latex_signed_term};
pub use log_series::LogSeries;
pub use monomial::Monomial;
pub use rational::Rational;
pub use series::{default_names, write_monomial, write_signed_term, MultiSeries, SeriesDisplay};
pub use transcendental::{exp, log1p, pow_int, pow_rational, reciprocal};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: u32, right: u32 },
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("series must have constant term 1")]
    NonUnitConstantTerm,
    #[error("series has zero constant term and is not invertible")]
    ZeroConstantTerm,
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("not a rational number: {0:?}")]
    BadRational(String),
}
