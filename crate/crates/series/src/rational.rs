//! Exact rational scalars and their canonical string form.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::SeriesError;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(text: &str) -> Result<Rational, SeriesError> {
    let text = text.trim();
    let bad = || SeriesError::BadRational(text.to_string());
    match text.split_once('/') {
        None => BigInt::from_str(text)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Canonical `"p/q"` form (`"p"` when the denominator is one).
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Factorial as an exact rational.
pub fn factorial(n: u64) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Rational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("20/3").unwrap(), ratio(20, 3));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational("35870").unwrap(), int(35870));
        assert_eq!(format_rational(&ratio(252, 5)), "252/5");
        assert_eq!(format_rational(&int(-3038)), "-3038");
        assert_eq!(format_rational(&ratio(4, -6)), "-2/3");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), int(1));
    }
}
