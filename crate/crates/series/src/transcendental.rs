//! exp, log(1+u), reciprocals and rational powers.
//!
//! All of these work degree by degree on homogeneous components, using the
//! total-degree operator `E = Σ θ_a` which is a derivation:
//! `E exp(s) = exp(s) E s`.

use num_traits::{One, Zero};

use crate::rational::{int, Rational};
use crate::series::MultiSeries;
use crate::SeriesError;

/// `exp(s)` for `s(0) = 0`.
pub fn exp(s: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    if !s.constant_term().is_zero() {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    let cutoff = s.cutoff();
    let es = s.degree_operator().graded_parts();
    let mut y: Vec<MultiSeries> = Vec::with_capacity(cutoff as usize + 1);
    y.push(MultiSeries::one(s.nvars(), cutoff));
    for k in 1..=cutoff as usize {
        // k y_k = Σ_{j=1}^{k} (E s)_j y_{k-j}
        let mut acc = MultiSeries::zero(s.nvars(), cutoff);
        for j in 1..=k {
            if es[j].is_zero() || y[k - j].is_zero() {
                continue;
            }
            acc = acc.add_unchecked(&es[j].mul_unchecked(&y[k - j]));
        }
        y.push(acc.scale(&int(k as i64).recip()));
    }
    Ok(sum(s.nvars(), cutoff, y))
}

/// `1/s` for `s(0) ≠ 0`.
pub fn reciprocal(s: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    let c0 = s.constant_term();
    if c0.is_zero() {
        return Err(SeriesError::ZeroConstantTerm);
    }
    let inv0 = c0.recip();
    let cutoff = s.cutoff();
    let parts = s.graded_parts();
    let mut y: Vec<MultiSeries> = Vec::with_capacity(cutoff as usize + 1);
    y.push(MultiSeries::constant(s.nvars(), cutoff, inv0.clone()));
    for k in 1..=cutoff as usize {
        let mut acc = MultiSeries::zero(s.nvars(), cutoff);
        for j in 1..=k {
            if parts[j].is_zero() || y[k - j].is_zero() {
                continue;
            }
            acc = acc.add_unchecked(&parts[j].mul_unchecked(&y[k - j]));
        }
        y.push(acc.scale(&-inv0.clone()));
    }
    Ok(sum(s.nvars(), cutoff, y))
}

/// `log(1 + u)` for `u(0) = 0`.
pub fn log1p(u: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    if !u.constant_term().is_zero() {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    let one_plus = u.add_unchecked(&MultiSeries::one(u.nvars(), u.cutoff()));
    let derivative = u.degree_operator().mul_unchecked(&reciprocal(&one_plus)?);
    Ok(integrate_degree(&derivative))
}

/// `s^e` for `s(0) = 1`, computed as `exp(e · log s)`.
pub fn pow_rational(s: &MultiSeries, e: &Rational) -> Result<MultiSeries, SeriesError> {
    if !s.constant_term().is_one() {
        return Err(SeriesError::NonUnitConstantTerm);
    }
    if e.is_zero() {
        return Ok(MultiSeries::one(s.nvars(), s.cutoff()));
    }
    let u = s.without_constant();
    exp(&log1p(&u)?.scale(e))
}

/// Integer power by repeated squaring; negative exponents go through the
/// reciprocal.
pub fn pow_int(s: &MultiSeries, e: i64) -> Result<MultiSeries, SeriesError> {
    let base = if e < 0 { reciprocal(s)? } else { s.clone() };
    let mut n = e.unsigned_abs();
    let mut acc = MultiSeries::one(s.nvars(), s.cutoff());
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul_unchecked(&sq);
        }
        n >>= 1;
        if n > 0 {
            sq = sq.mul_unchecked(&sq);
        }
    }
    Ok(acc)
}

/// Inverse of the degree operator on series without constant term.
fn integrate_degree(s: &MultiSeries) -> MultiSeries {
    MultiSeries::from_terms(
        s.nvars(),
        s.cutoff(),
        s.terms()
            .filter(|(m, _)| m.degree() > 0)
            .map(|(m, c)| (m.clone(), c / int(m.degree() as i64))),
    )
}

fn sum(nvars: usize, cutoff: u32, parts: Vec<MultiSeries>) -> MultiSeries {
    parts
        .iter()
        .fold(MultiSeries::zero(nvars, cutoff), |acc, p| {
            acc.add_unchecked(p)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{factorial, ratio};

    fn uni(cutoff: u32, coeffs: &[Rational]) -> MultiSeries {
        MultiSeries::from_coefficients(cutoff, coeffs)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn exp_of_zero_is_one() {
        let z = MultiSeries::zero(2, 6);
        assert_eq!(exp(&z).unwrap(), MultiSeries::one(2, 6));
    }

    #[test]
    fn exp_of_q_is_taylor() {
        let q = MultiSeries::var(1, 7, 0);
        let e = exp(&q).unwrap();
        for k in 0..=7u64 {
            assert_eq!(e.coeff_of(&[k as u32]), factorial(k).recip());
        }
    }

    #[test]
    fn mercator_series() {
        let q = MultiSeries::var(1, 6, 0);
        let l = log1p(&q).unwrap();
        for k in 1..=6i64 {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(l.coeff_of(&[k as u32]), ratio(sign, k));
        }
        assert!(l.constant_term().is_zero());
    }

    #[test]
    fn binomial_series() {
        let one_plus_q = uni(6, &ints(&[1, 1]));
        let p = pow_rational(&one_plus_q, &int(-2)).unwrap();
        assert_eq!(p, uni(6, &ints(&[1, -2, 3, -4, 5, -6, 7])));
        assert_eq!(pow_int(&one_plus_q, -2).unwrap(), p);
        let p0 = pow_rational(&one_plus_q, &int(0)).unwrap();
        assert_eq!(p0, MultiSeries::one(1, 6));
    }

    #[test]
    fn square_root() {
        // (1 + q)^{1/2} squared
        let s = uni(8, &ints(&[1, 1]));
        let r = pow_rational(&s, &ratio(1, 2)).unwrap();
        assert_eq!(r.coeff_of(&[2]), ratio(-1, 8));
        assert_eq!(r.mul(&r).unwrap(), s);
    }

    #[test]
    fn reciprocal_checks() {
        let s = uni(5, &ints(&[2, 1]));
        let r = reciprocal(&s).unwrap();
        assert_eq!(r.mul(&s).unwrap(), MultiSeries::one(1, 5));
        assert!(matches!(
            reciprocal(&MultiSeries::var(1, 5, 0)),
            Err(SeriesError::ZeroConstantTerm)
        ));
    }

    #[test]
    fn precondition_errors() {
        let s = uni(5, &ints(&[1, 1]));
        assert!(matches!(exp(&s), Err(SeriesError::NonzeroConstantTerm)));
        assert!(matches!(log1p(&s), Err(SeriesError::NonzeroConstantTerm)));
        let t = uni(5, &ints(&[2, 1]));
        assert!(matches!(
            pow_rational(&t, &ratio(1, 2)),
            Err(SeriesError::NonUnitConstantTerm)
        ));
    }

    /// Independent oracle: exp via the truncated Taylor sum Σ s^k / k!.
    fn exp_taylor(s: &MultiSeries) -> MultiSeries {
        let mut acc = MultiSeries::one(s.nvars(), s.cutoff());
        let mut power = MultiSeries::one(s.nvars(), s.cutoff());
        for k in 1..=s.cutoff() as u64 {
            power = power.mul(s).unwrap();
            acc = acc.add(&power.scale(&factorial(k).recip())).unwrap();
        }
        acc
    }

    #[test]
    fn exp_of_local_p2_period_matches_taylor_oracle() {
        // f = Σ (-1)^k/k (3k)!/(k!)^3 q^k through q^6
        let mut coeffs = vec![int(0)];
        for k in 1..=6u64 {
            let sign = if k % 2 == 1 { -1 } else { 1 };
            let c = factorial(3 * k) / (factorial(k) * factorial(k) * factorial(k));
            coeffs.push(c * ratio(sign, k as i64));
        }
        let f = uni(6, &coeffs);
        assert_eq!(f.coeff_of(&[1]), int(-6));
        assert_eq!(f.coeff_of(&[2]), int(45));
        assert_eq!(f.coeff_of(&[3]), int(-560));
        let e = exp(&f).unwrap();
        assert_eq!(e, exp_taylor(&f));
        assert_eq!(e.coeff_of(&[1]), int(-6));
        assert_eq!(e.coeff_of(&[2]), int(63));
    }
}
