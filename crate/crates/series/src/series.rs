//! The truncated series type and its ring operations.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::monomial::Monomial;
use crate::rational::{int, Rational};
use crate::SeriesError;

/// Sparse truncated formal power series in `nvars` variables.
///
/// Every stored monomial has total degree `<= cutoff` and a nonzero
/// coefficient, so structural equality coincides with equality of the
/// truncated series.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiSeries {
    nvars: usize,
    cutoff: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiSeries {
    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        MultiSeries {
            nvars,
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, cutoff: u32, c: Rational) -> Self {
        let mut s = Self::zero(nvars, cutoff);
        s.add_term(Monomial::one(nvars), c);
        s
    }

    pub fn one(nvars: usize, cutoff: u32) -> Self {
        Self::constant(nvars, cutoff, Rational::one())
    }

    /// The coordinate series `q_var`.
    pub fn var(nvars: usize, cutoff: u32, var: usize) -> Self {
        Self::monomial(nvars, cutoff, Monomial::var(nvars, var), Rational::one())
    }

    pub fn monomial(nvars: usize, cutoff: u32, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.nvars(), nvars, "monomial arity");
        let mut s = Self::zero(nvars, cutoff);
        s.add_term(m, c);
        s
    }

    /// Builds a series from `(exponents, coefficient)` pairs; repeated
    /// exponents accumulate and terms beyond the cutoff are dropped.
    pub fn from_terms<I, M>(nvars: usize, cutoff: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (M, Rational)>,
        M: Into<Monomial>,
    {
        let mut s = Self::zero(nvars, cutoff);
        for (m, c) in terms {
            let m = m.into();
            assert_eq!(m.nvars(), nvars, "monomial arity");
            s.add_term(m, c);
        }
        s
    }

    /// Univariate convenience: coefficients of `q^0, q^1, ...`.
    pub fn from_coefficients(cutoff: u32, coeffs: &[Rational]) -> Self {
        Self::from_terms(
            1,
            cutoff,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (vec![k as u32], c.clone())),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient by raw exponent slice.
    pub fn coeff_of(&self, exponents: &[u32]) -> Rational {
        self.coeff(&Monomial::from(exponents))
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if m.degree() > self.cutoff || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub(crate) fn check_compatible(&self, other: &MultiSeries) -> Result<(), SeriesError> {
        if self.nvars != other.nvars {
            return Err(SeriesError::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        if self.cutoff != other.cutoff {
            return Err(SeriesError::CutoffMismatch {
                left: self.cutoff,
                right: other.cutoff,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn mul(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &MultiSeries) -> MultiSeries {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn mul_unchecked(&self, other: &MultiSeries) -> MultiSeries {
        let mut out = MultiSeries::zero(self.nvars, self.cutoff);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                // terms are degree-sorted, so the rest of `other` overflows too
                if da + mb.degree() > self.cutoff {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn neg(&self) -> MultiSeries {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> MultiSeries {
        let mut out = MultiSeries::zero(self.nvars, self.cutoff);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    /// Multiplies by `c * q^m`, discarding overflow beyond the cutoff.
    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> MultiSeries {
        let mut out = MultiSeries::zero(self.nvars, self.cutoff);
        for (k, v) in &self.terms {
            out.add_term(k.mul(m), v * c);
        }
        out
    }

    /// Euler operator `θ_var = q_var ∂/∂q_var`.
    pub fn euler(&self, var: usize) -> MultiSeries {
        let mut out = MultiSeries::zero(self.nvars, self.cutoff);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            out.add_term(m.clone(), c * int(e as i64));
        }
        out
    }

    /// Total-degree operator `Σ_a θ_a`.
    pub fn degree_operator(&self) -> MultiSeries {
        let mut out = MultiSeries::zero(self.nvars, self.cutoff);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * int(m.degree() as i64));
        }
        out
    }

    /// Homogeneous component of total degree `degree`.
    pub fn homogeneous(&self, degree: u32) -> MultiSeries {
        let mut out = MultiSeries::zero(self.nvars, self.cutoff);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.degree() == degree) {
            out.terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// Splits into homogeneous components `0..=cutoff`.
    pub fn graded_parts(&self) -> Vec<MultiSeries> {
        let mut parts = vec![MultiSeries::zero(self.nvars, self.cutoff); self.cutoff as usize + 1];
        for (m, c) in &self.terms {
            parts[m.degree() as usize]
                .terms
                .insert(m.clone(), c.clone());
        }
        parts
    }

    /// Explicitly lowers the cutoff, dropping terms above it.
    pub fn truncate(&self, cutoff: u32) -> MultiSeries {
        assert!(cutoff <= self.cutoff, "truncate can only lower the cutoff");
        let mut out = MultiSeries::zero(self.nvars, cutoff);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.degree() <= cutoff) {
            out.terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// Removes the constant term.
    pub fn without_constant(&self) -> MultiSeries {
        let mut out = self.clone();
        out.terms.remove(&Monomial::one(self.nvars));
        out
    }

    pub fn all_integer(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Renders with the given variable names, e.g. `1 - 6q + 63q^2`.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> SeriesDisplay<'a> {
        SeriesDisplay {
            series: self,
            names,
        }
    }
}

/// Default variable names: `q` for a single variable, `q1, q2, …` otherwise.
pub fn default_names(prefix: &str, nvars: usize) -> Vec<String> {
    if nvars == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=nvars).map(|i| format!("{prefix}{i}")).collect()
    }
}

pub struct SeriesDisplay<'a> {
    series: &'a MultiSeries,
    names: &'a [String],
}

/// Writes `q1^2q2`-style monomials; empty for the unit monomial.
pub fn write_monomial(out: &mut String, exponents: &[u32], names: &[String]) {
    for (e, name) in exponents.iter().zip(names) {
        match e {
            0 => {}
            1 => out.push_str(name),
            _ => out.push_str(&format!("{name}^{e}")),
        }
    }
}

/// Appends `sign coefficient monomial` in the canonical text style.
pub fn write_signed_term(out: &mut String, first: bool, c: &Rational, monomial: &str) {
    let negative = c.is_negative();
    if first {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    let a = c.abs();
    if monomial.is_empty() {
        out.push_str(&a.to_string());
    } else if a.is_one() {
        out.push_str(monomial);
    } else if a.is_integer() {
        out.push_str(&format!("{a}{monomial}"));
    } else {
        out.push_str(&format!("({a}){monomial}"));
    }
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.series.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.series.terms().enumerate() {
            let mut mono = String::new();
            write_monomial(&mut mono, m.exponents(), self.names);
            write_signed_term(&mut out, i == 0, c, &mono);
        }
        f.write_str(&out)
    }
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names("q", self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(deg {})", self, self.cutoff + 1)
    }
}
