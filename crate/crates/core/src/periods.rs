//! Single-logarithm periods of the GKZ system and differential operators in θ.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use syz_series::{exp, LogSeries, Monomial, MultiSeries, Rational, SeriesError};
use thiserror::Error;

use crate::toric_cy::ChargeMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodError {
    #[error("multi-index has a negative entry")]
    NegativeIndex,
    #[error("expected {expected} variables, got {got}")]
    VarCountMismatch { expected: usize, got: usize },
    #[error("row {row} out of range for {rows} charge rows")]
    BadRow { row: usize, rows: usize },
    #[error("operator parse error at byte {position}: {message}")]
    OperatorParse { position: usize, message: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Coefficient of `q̌^d` in `f_a`, where `Φ_a = −log q̌_a − f_a`.
///
/// With `ℓ_i = Σ_a Q^a_i d_a`: zero unless exactly one column is negative;
/// if `ℓ_{i*} = −n` is the only negative one the coefficient is
/// `Q^a_{i*} (−1)^{n−1} (n−1)! / Π_{i≠i*} ℓ_i!`.
pub fn gamma_log_coefficient(
    q: &ChargeMatrix,
    d: &[i64],
    a: usize,
) -> Result<Rational, PeriodError> {
    if d.len() != q.l() {
        return Err(PeriodError::VarCountMismatch {
            expected: q.l(),
            got: d.len(),
        });
    }
    if a >= q.l() {
        return Err(PeriodError::BadRow {
            row: a,
            rows: q.l(),
        });
    }
    if d.iter().any(|&x| x < 0) {
        return Err(PeriodError::NegativeIndex);
    }
    Ok(coefficient_from_ell(q, &ell(q, d), a))
}

fn ell(q: &ChargeMatrix, d: &[i64]) -> Vec<i64> {
    (0..q.m())
        .map(|i| d.iter().zip(q.rows()).map(|(x, r)| x * r[i]).sum())
        .collect()
}

fn coefficient_from_ell(q: &ChargeMatrix, ell: &[i64], a: usize) -> Rational {
    let mut negative = ell.iter().enumerate().filter(|(_, &x)| x < 0);
    let (Some((star, &ls)), None) = (negative.next(), negative.next()) else {
        return Rational::zero();
    };
    let n = -ls;
    let mut num = factorial(n - 1) * q.entry(a, star);
    if n % 2 == 0 {
        num = -num;
    }
    let den: BigInt = ell
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != star)
        .map(|(_, &x)| factorial(x))
        .product();
    Rational::new(num, den)
}

/// `Φ_a = −log q̌_a − f_a`, stored through `f_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogPeriod {
    pub index: usize,
    pub f: MultiSeries,
}

impl LogPeriod {
    pub fn phi(&self) -> LogSeries {
        let nvars = self.f.nvars();
        let cutoff = self.f.cutoff();
        LogSeries::log_var(nvars, cutoff, self.index, -Rational::one())
            .add_plain(&self.f.neg())
            .expect("same shape")
    }
}

/// The `l` single-logarithm solutions, with `f_a` summed over `1 ≤ |d| ≤ T`.
pub fn single_log_periods(q: &ChargeMatrix, cutoff: u32) -> Vec<LogPeriod> {
    let l = q.l();
    let mut fs: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); l];
    for m in Monomial::up_to_degree(l, cutoff) {
        if m.is_one() {
            continue;
        }
        let d: Vec<i64> = m.exponents().iter().map(|&e| i64::from(e)).collect();
        let e = ell(q, &d);
        for (a, terms) in fs.iter_mut().enumerate() {
            let c = coefficient_from_ell(q, &e, a);
            if !c.is_zero() {
                terms.push((m.clone(), c));
            }
        }
    }
    fs.into_iter()
        .enumerate()
        .map(|(index, terms)| LogPeriod {
            index,
            f: MultiSeries::from_terms(l, cutoff, terms),
        })
        .collect()
}

/// Exp-factors `exp(f_a)` of the mirror map `q_a = q̌_a · exp(f_a(q̌))`.
pub fn mirror_map_series(periods: &[LogPeriod]) -> Result<Vec<MultiSeries>, PeriodError> {
    periods
        .iter()
        .map(|p| exp(&p.f).map_err(PeriodError::from))
        .collect()
}

/// Polynomial in the Euler operators `θ_1, …, θ_l` (they commute).
type ThetaPoly = BTreeMap<Vec<u32>, Rational>;

fn theta_add(p: &mut ThetaPoly, m: Vec<u32>, c: Rational) {
    let slot = p.entry(m.clone()).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&m);
    }
}

fn theta_mul(a: &ThetaPoly, b: &ThetaPoly) -> ThetaPoly {
    let mut out = ThetaPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            theta_add(&mut out, m, ca * cb);
        }
    }
    out
}

/// `P(θ + shift)`.
fn theta_shift(p: &ThetaPoly, shift: &[u32]) -> ThetaPoly {
    let nvars = shift.len();
    let mut out = ThetaPoly::new();
    for (m, c) in p {
        let mut acc: ThetaPoly = BTreeMap::from([(vec![0u32; nvars], c.clone())]);
        for (var, (&e, &s)) in m.iter().zip(shift).enumerate() {
            // (θ + s)^e
            let mut binom = ThetaPoly::new();
            let mut coeff = BigInt::one();
            for k in 0..=e {
                let mut mono = vec![0u32; nvars];
                mono[var] = k;
                let power = BigInt::from(s).pow(e - k);
                theta_add(&mut binom, mono, Rational::from_integer(&coeff * power));
                coeff = coeff * (e - k) / (k + 1);
            }
            acc = theta_mul(&acc, &binom);
        }
        for (mm, cc) in acc {
            theta_add(&mut out, mm, cc);
        }
    }
    out
}

/// `Σ_m q̌^m · P_m(θ)`, each term acting by `θ` first and then multiplying by `q̌^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, ThetaPoly>,
}

impl DiffOperator {
    pub fn zero(nvars: usize) -> Self {
        DiffOperator {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut op = Self::zero(nvars);
        if !c.is_zero() {
            op.terms
                .insert(vec![0; nvars], BTreeMap::from([(vec![0; nvars], c)]));
        }
        op
    }

    /// Multiplication by `q̌_var`.
    pub fn q(nvars: usize, var: usize) -> Self {
        let mut m = vec![0u32; nvars];
        m[var] = 1;
        DiffOperator {
            nvars,
            terms: BTreeMap::from([(m, BTreeMap::from([(vec![0; nvars], Rational::one())]))]),
        }
    }

    /// `θ_var = q̌_var ∂/∂q̌_var`.
    pub fn theta(nvars: usize, var: usize) -> Self {
        let mut t = vec![0u32; nvars];
        t[var] = 1;
        DiffOperator {
            nvars,
            terms: BTreeMap::from([(vec![0; nvars], BTreeMap::from([(t, Rational::one())]))]),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, m: Vec<u32>, p: ThetaPoly) {
        let slot = self.terms.entry(m.clone()).or_default();
        for (tm, c) in p {
            theta_add(slot, tm, c);
        }
        if slot.is_empty() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.push(m.clone(), p.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DiffOperator {
        let mut out = Self::zero(self.nvars);
        for (m, p) in &self.terms {
            out.push(
                m.clone(),
                p.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            );
        }
        out
    }

    /// Composition `self ∘ other`, using `θ q̌^b = q̌^b (θ + b)`.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = Self::zero(self.nvars);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                let m = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.push(m, theta_mul(&theta_shift(pa, mb), pb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffOperator {
        let mut out = Self::constant(self.nvars, Rational::one());
        for _ in 0..e {
            out = out.compose(self);
        }
        out
    }

    /// Parses the text form, e.g. `T1^3 + 3*q1*T1*(3*T1+1)*(3*T1+2)`.
    pub fn parse(src: &str, nvars: usize) -> Result<DiffOperator, PeriodError> {
        Parser::new(src, nvars).parse()
    }

    /// Applies the operator; overflow beyond the cutoff is discarded.
    pub fn apply(&self, phi: &LogSeries) -> Result<LogSeries, PeriodError> {
        if phi.nvars() != self.nvars {
            return Err(PeriodError::VarCountMismatch {
                expected: self.nvars,
                got: phi.nvars(),
            });
        }
        let mut cache: BTreeMap<Vec<u32>, LogSeries> = BTreeMap::new();
        cache.insert(vec![0; self.nvars], phi.clone());
        let mut out = LogSeries::zero(phi.nvars(), phi.cutoff());
        for (m, p) in &self.terms {
            let mut inner = LogSeries::zero(phi.nvars(), phi.cutoff());
            for (t, c) in p {
                let s = theta_power(&mut cache, t);
                inner = inner.add(&s.scale(c))?;
            }
            out = out.add(&inner.mul_monomial(&Monomial::new(m.clone()), &Rational::one()))?;
        }
        Ok(out)
    }
}

fn theta_power(cache: &mut BTreeMap<Vec<u32>, LogSeries>, t: &[u32]) -> LogSeries {
    if let Some(s) = cache.get(t) {
        return s.clone();
    }
    let var = t.iter().rposition(|&e| e > 0).expect("nonzero exponent");
    let mut lower = t.to_vec();
    lower[var] -= 1;
    let s = theta_power(cache, &lower).euler(var);
    cache.insert(t.to_vec(), s.clone());
    s
}

/// `apply_operator` in free-function form.
pub fn apply_operator(op: &DiffOperator, phi: &LogSeries) -> Result<LogSeries, PeriodError> {
    op.apply(phi)
}

impl fmt::Display for DiffOperator {
    /// Expanded normal-ordered form, e.g. `T^2 - q*T^2`; parses back to the same operator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let qn = syz_series::default_names("q", self.nvars);
        let tn = syz_series::default_names("T", self.nvars);
        let mut out = String::new();
        let mut first = true;
        for (m, p) in &self.terms {
            let mut qm = String::new();
            syz_series::write_monomial(&mut qm, m, &qn);
            for (t, c) in p {
                let mut tm = String::new();
                syz_series::write_monomial(&mut tm, t, &tn);
                let mono = match (qm.is_empty(), tm.is_empty()) {
                    (true, _) => tm,
                    (false, true) => qm.clone(),
                    (false, false) => format!("{qm}*{tm}"),
                };
                syz_series::write_signed_term(&mut out, first, c, &mono);
                first = false;
            }
        }
        f.write_str(&out)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, nvars: usize) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            nvars,
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, PeriodError> {
        Err(PeriodError::OperatorParse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<BigInt, PeriodError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn parse(mut self) -> Result<DiffOperator, PeriodError> {
        let op = self.expr()?;
        if self.peek().is_some() {
            return self.error("unexpected trailing input");
        }
        Ok(op)
    }

    fn expr(&mut self) -> Result<DiffOperator, PeriodError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.scale(&-Rational::one()));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffOperator, PeriodError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.compose(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.number()?;
                    if d.is_zero() {
                        return self.error("division by zero");
                    }
                    acc = acc.scale(&Rational::new(BigInt::one(), d));
                }
                Some(c) if c == b'(' || c == b'q' || c == b'T' => {
                    acc = acc.compose(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<DiffOperator, PeriodError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.scale(&-Rational::one()));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.number()?;
            let Ok(e) = u32::try_from(e) else {
                return self.error("exponent too large");
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffOperator, PeriodError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(DiffOperator::constant(
                    self.nvars,
                    Rational::from_integer(n),
                ))
            }
            Some(c @ (b'q' | b'T')) => {
                self.pos += 1;
                let var = if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    let k = self.number()?;
                    match usize::try_from(k) {
                        Ok(k) if (1..=self.nvars).contains(&k) => k - 1,
                        _ => {
                            return self
                                .error(format!("variable index out of range 1..={}", self.nvars))
                        }
                    }
                } else if self.nvars == 1 {
                    0
                } else {
                    return self.error("variable needs an index");
                };
                Ok(if c == b'q' {
                    DiffOperator::q(self.nvars, var)
                } else {
                    DiffOperator::theta(self.nvars, var)
                })
            }
            Some(_) => self.error("unexpected character"),
            None => self.error("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use syz_series::rational::{int, ratio};

    fn single_row(row: Vec<i64>) -> ChargeMatrix {
        let m = row.len();
        let others = vec![m - 1];
        ChargeMatrix::from_rows(vec![row], (0..m - 1).collect(), others)
    }

    #[test]
    fn kp2_first_coefficient() {
        let q = single_row(vec![-3, 1, 1, 1]);
        assert_eq!(gamma_log_coefficient(&q, &[1], 0).unwrap(), int(-6));
        assert_eq!(gamma_log_coefficient(&q, &[0], 0).unwrap(), int(0));
        assert!(matches!(
            gamma_log_coefficient(&q, &[-1], 0),
            Err(PeriodError::NegativeIndex)
        ));
    }

    #[test]
    fn conifold_coefficients_vanish() {
        let q = single_row(vec![-1, -1, 1, 1]);
        for d in 0..6 {
            assert_eq!(gamma_log_coefficient(&q, &[d], 0).unwrap(), int(0));
        }
    }

    #[test]
    fn kp2_series_against_closed_form() {
        let q = single_row(vec![-3, 1, 1, 1]);
        let f = &single_log_periods(&q, 6)[0].f;
        // (−1)^k/k · (3k)!/(k!)^3
        for k in 1..=6i64 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let expected = Rational::new(
                BigInt::from(sign) * factorial(3 * k),
                BigInt::from(k) * factorial(k).pow(3),
            );
            assert_eq!(f.coeff_of(&[k as u32]), expected);
        }
        assert_eq!(f.coeff_of(&[3]), int(-560));
    }

    #[test]
    fn operator_composition_shifts_theta() {
        // θ ∘ q = q (θ + 1)
        let t = DiffOperator::theta(1, 0);
        let q = DiffOperator::q(1, 0);
        let lhs = t.compose(&q);
        let rhs = q.compose(&t.add(&DiffOperator::constant(1, int(1))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn parser_round_trip_shapes() {
        let a = DiffOperator::parse("T1^3 + 3*q1*T1*(3*T1+1)*(3*T1+2)", 1).unwrap();
        let b = DiffOperator::parse("T^3 + 3 q T (3T+1)(3T+2)", 1).unwrap();
        assert_eq!(a, b);
        let c = DiffOperator::parse("(1 - q1) * T1^2", 1).unwrap();
        assert_eq!(c.to_string(), "T^2 - q*T^2");
        assert_eq!(DiffOperator::parse(&a.to_string(), 1).unwrap(), a);
        assert!(DiffOperator::parse("T3", 2).is_err());
        assert!(DiffOperator::parse("T1 +", 1).is_err());
        assert_eq!(
            DiffOperator::parse("T/2", 1).unwrap(),
            DiffOperator::theta(1, 0).scale(&ratio(1, 2))
        );
    }

    #[test]
    fn theta_of_minus_log() {
        let phi = LogSeries::log_var(1, 4, 0, int(-1));
        let r = DiffOperator::theta(1, 0).apply(&phi).unwrap();
        assert_eq!(r.plain(), &MultiSeries::constant(1, 4, int(-1)));
    }

    #[test]
    fn conifold_operator_kills_minus_log() {
        let op = DiffOperator::parse("(1 - q1) * T1^2", 1).unwrap();
        let phi = LogSeries::log_var(1, 8, 0, int(-1));
        assert!(op.apply(&phi).unwrap().is_zero());
    }

    #[test]
    fn kp2_operator_kills_phi() {
        let q = single_row(vec![-3, 1, 1, 1]);
        let phi = single_log_periods(&q, 8)[0].phi();
        let op = DiffOperator::parse("T1^3 + 3*q1*T1*(3*T1+1)*(3*T1+2)", 1).unwrap();
        assert!(op.apply(&phi).unwrap().is_zero());
    }
}
