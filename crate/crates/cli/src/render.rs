//! Serialized forms of series, rationals and linear constraints.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use syz_core::polyhedron::Constraint;
use syz_series::rational::{format_rational, parse_rational};
use syz_series::{default_names, latex_names, MultiSeries, Rational};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

/// A truncated series: every coefficient of total degree up to `cutoff` not
/// listed is zero. Terms are in graded order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub nvars: usize,
    pub cutoff: u32,
    pub terms: Vec<TermDoc>,
}

impl SeriesDoc {
    pub fn from_series(s: &MultiSeries) -> Self {
        SeriesDoc {
            nvars: s.nvars(),
            cutoff: s.cutoff(),
            terms: s
                .terms()
                .map(|(m, c)| TermDoc {
                    exponents: m.exponents().to_vec(),
                    coefficient: format_rational(c),
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<MultiSeries, CliError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exponents.len() != self.nvars {
                return Err(CliError::Parse(format!(
                    "term {:?} has {} exponents, expected {}",
                    t.exponents,
                    t.exponents.len(),
                    self.nvars
                )));
            }
            let c = parse_rational(&t.coefficient).map_err(|e| CliError::Parse(e.to_string()))?;
            terms.push((t.exponents.clone(), c));
        }
        Ok(MultiSeries::from_terms(self.nvars, self.cutoff, terms))
    }
}

/// Variable names: `q`, `q1`, `q2`, … (or `q̌…`) in text and `q_{1}` in LaTeX.
pub fn text_names(checked: bool, n: usize) -> Vec<String> {
    default_names(if checked { "q̌" } else { "q" }, n)
}

pub fn tex_names(checked: bool, n: usize) -> Vec<String> {
    latex_names(if checked { "\\check{q}" } else { "q" }, n)
}

pub fn series_text(s: &MultiSeries, checked: bool) -> String {
    let names = text_names(checked, s.nvars());
    s.display_with(&names).to_string()
}

pub fn series_tex(s: &MultiSeries, checked: bool) -> String {
    let names = tex_names(checked, s.nvars());
    s.to_latex(&names)
}

pub fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn point(v: &[Rational]) -> String {
    format!("({})", rationals(v).join(", "))
}

pub fn int_vec(v: &[i64]) -> String {
    format!(
        "({})",
        v.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
    )
}

/// `a·y` written out, e.g. `y1 - 2y2`.
pub fn linear_form(a: &[Rational]) -> String {
    let mut out = String::new();
    for (j, c) in a.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag.is_integer() {
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
            }
        } else {
            out.push_str(&format!("({})", format_rational(&mag)));
        }
        out.push_str(&format!("y{}", j + 1));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn constraint(c: &Constraint, relation: &str) -> String {
    format!("{} {relation} {}", linear_form(&c.a), format_rational(&c.b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub a: Vec<String>,
    pub b: String,
}

impl ConstraintDoc {
    pub fn new(c: &Constraint) -> Self {
        ConstraintDoc {
            a: rationals(&c.a),
            b: format_rational(&c.b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use syz_series::rational::ratio;

    #[test]
    fn series_round_trip() {
        let s = MultiSeries::from_terms(
            2,
            3,
            vec![(vec![1u32, 0], ratio(2, 1)), (vec![1, 1], ratio(-20, 3))],
        );
        let doc = SeriesDoc::from_series(&s);
        assert_eq!(doc.terms[1].coefficient, "-20/3");
        assert_eq!(doc.to_series().unwrap(), s);
        assert_eq!(series_text(&s, false), "2q1 - (20/3)q1q2");
    }

    #[test]
    fn linear_forms() {
        assert_eq!(
            linear_form(&[ratio(-1, 1), ratio(0, 1), ratio(1, 2)]),
            "-y1 + (1/2)y3"
        );
        assert_eq!(linear_form(&[ratio(0, 1)]), "0");
    }
}
