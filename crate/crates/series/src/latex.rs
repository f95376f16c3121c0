//! LaTeX rendering of exact coefficients and series.

use num_traits::{One, Signed};

use crate::{MultiSeries, Rational};

/// `q` for one variable, `q_{1}, q_{2}, …` otherwise.
pub fn latex_names(prefix: &str, nvars: usize) -> Vec<String> {
    if nvars == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=nvars).map(|i| format!("{prefix}_{{{i}}}")).collect()
    }
}

/// `\frac{p}{q}` or `p`, for a nonnegative value.
pub fn latex_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// Product of `name^{e}` factors with nonnegative exponents; empty for the unit.
pub fn latex_monomial(exponents: &[u32], names: &[String]) -> String {
    let mut out = String::new();
    for (e, name) in exponents.iter().zip(names) {
        match e {
            0 => {}
            1 => out.push_str(name),
            _ => out.push_str(&format!("{name}^{{{e}}}")),
        }
    }
    out
}

/// Appends `± c·monomial` in LaTeX.
pub fn latex_signed_term(out: &mut String, first: bool, c: &Rational, monomial: &str) {
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
        out.push_str(&latex_rational(&a));
    } else if a.is_one() {
        out.push_str(monomial);
    } else {
        out.push_str(&latex_rational(&a));
        out.push_str(monomial);
    }
}

impl MultiSeries {
    pub fn to_latex(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            latex_signed_term(&mut out, i == 0, c, &latex_monomial(m.exponents(), names));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn renders_fractions_and_powers() {
        let s = MultiSeries::from_terms(
            2,
            3,
            vec![
                (vec![1u32, 0], int(2)),
                (vec![1, 1], ratio(-20, 3)),
                (vec![0, 2], int(1)),
            ],
        );
        let names = latex_names("q", 2);
        assert_eq!(
            s.to_latex(&names),
            "2q_{1} - \\frac{20}{3}q_{1}q_{2} + q_{2}^{2}"
        );
    }
}
