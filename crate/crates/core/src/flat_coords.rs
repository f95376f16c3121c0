//! Inverse mirror map and the correction series it determines.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use syz_series::{
    exp, invert_map, pow_int, pow_rational, Monomial, MultiSeries, Rational, SeriesError,
};
use thiserror::Error;

use crate::periods::LogPeriod;
use crate::toric_cy::{compact_divisors, ChargeMatrix, CyFan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlatError {
    #[error("extraction needs exactly one compact divisor, found {0:?}")]
    UnderdeterminedExtraction(Vec<usize>),
    #[error("no charge row has a nonzero entry in the compact column")]
    NoUsableRow,
    #[error("row {row} out of range")]
    BadRow { row: usize },
    #[error("charge row {row} has zero entry in the compact column")]
    UnusableRow { row: usize },
    #[error("inverse map has {got} components, expected {expected}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `δ_i = Σ_{α≠0} n_{β_i+α} q^α` for one toric divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionSeries {
    pub divisor: usize,
    pub delta: MultiSeries,
}

impl CorrectionSeries {
    /// `1 + δ`.
    pub fn factor(&self) -> MultiSeries {
        self.delta
            .add(&MultiSeries::one(self.delta.nvars(), self.delta.cutoff()))
            .expect("same shape")
    }
}

/// `q̌_a = q_a · G_a(q)`, stored as the exp-factors `G_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseMirrorMap {
    pub components: Vec<MultiSeries>,
}

impl InverseMirrorMap {
    /// `q̌_a(q)` itself.
    pub fn coordinate(&self, a: usize) -> MultiSeries {
        let s = &self.components[a];
        let mut m = vec![0u32; s.nvars()];
        m[a] = 1;
        s.mul_monomial(&Monomial::new(m), &Rational::one())
    }
}

pub fn inverse_mirror_map(periods: &[LogPeriod]) -> Result<InverseMirrorMap, FlatError> {
    let f: Vec<MultiSeries> = periods.iter().map(|p| p.f.clone()).collect();
    let g = invert_map(&f)?;
    let components = g.iter().map(exp).collect::<Result<_, _>>()?;
    Ok(InverseMirrorMap { components })
}

fn single_compact(fan: &CyFan) -> Result<usize, FlatError> {
    let compact: Vec<usize> = compact_divisors(fan.valid()).into_iter().collect();
    match compact.as_slice() {
        [c] => Ok(*c),
        _ => Err(FlatError::UnderdeterminedExtraction(compact)),
    }
}

/// `1 + δ_c = (q̌_a/q_a)^{1/Q^a_c}` for the single compact divisor `c`, using
/// the first row with `Q^a_c ≠ 0`.
pub fn extract_delta(
    fan: &CyFan,
    q: &ChargeMatrix,
    inv: &InverseMirrorMap,
) -> Result<CorrectionSeries, FlatError> {
    let c = single_compact(fan)?;
    let row = (0..q.l())
        .find(|&a| q.entry(a, c) != 0)
        .ok_or(FlatError::NoUsableRow)?;
    extract_delta_from_row(fan, q, inv, row)
}

/// As [`extract_delta`], with an explicit choice of row.
pub fn extract_delta_from_row(
    fan: &CyFan,
    q: &ChargeMatrix,
    inv: &InverseMirrorMap,
    row: usize,
) -> Result<CorrectionSeries, FlatError> {
    let c = single_compact(fan)?;
    if inv.components.len() != q.l() {
        return Err(FlatError::ComponentMismatch {
            expected: q.l(),
            got: inv.components.len(),
        });
    }
    if row >= q.l() {
        return Err(FlatError::BadRow { row });
    }
    let e = q.entry(row, c);
    if e == 0 {
        return Err(FlatError::UnusableRow { row });
    }
    let factor = pow_rational(&inv.components[row], &Rational::new(1.into(), e.into()))?;
    Ok(CorrectionSeries {
        divisor: c,
        delta: factor.without_constant(),
    })
}

/// Corrections for every ray: `δ_i = 0` for noncompact divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corrections {
    nvars: usize,
    cutoff: u32,
    per_ray: Vec<Option<MultiSeries>>,
}

impl Corrections {
    pub fn zero(rays: usize, nvars: usize, cutoff: u32) -> Self {
        Corrections {
            nvars,
            cutoff,
            per_ray: vec![None; rays],
        }
    }

    pub fn from_delta(rays: usize, delta: &CorrectionSeries) -> Self {
        let mut c = Self::zero(rays, delta.delta.nvars(), delta.delta.cutoff());
        c.per_ray[delta.divisor] = Some(delta.delta.clone());
        c
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// `δ_i`, or `None` when it vanishes identically.
    pub fn delta(&self, i: usize) -> Option<&MultiSeries> {
        self.per_ray[i].as_ref()
    }

    /// `1 + δ_i`.
    pub fn factor(&self, i: usize) -> MultiSeries {
        let one = MultiSeries::one(self.nvars, self.cutoff);
        match &self.per_ray[i] {
            Some(d) => d.add(&one).expect("same shape"),
            None => one,
        }
    }

    pub fn num_rays(&self) -> usize {
        self.per_ray.len()
    }
}

/// Corrections implied by the inverse mirror map: all zero without compact
/// divisors, extracted when there is exactly one, refused otherwise.
pub fn corrections(
    fan: &CyFan,
    q: &ChargeMatrix,
    inv: &InverseMirrorMap,
) -> Result<Corrections, FlatError> {
    let compact = compact_divisors(fan.valid());
    let cutoff = inv.components.first().map_or(0, MultiSeries::cutoff);
    if compact.is_empty() {
        return Ok(Corrections::zero(fan.num_rays(), q.l(), cutoff));
    }
    let delta = extract_delta(fan, q, inv)?;
    Ok(Corrections::from_delta(fan.num_rays(), &delta))
}

/// Coefficients `n_{β_i+α}` of `δ_i`, keyed by `α`.
pub fn open_gw_coefficients(delta: &CorrectionSeries) -> BTreeMap<Vec<u32>, Rational> {
    delta
        .delta
        .terms()
        .map(|(m, c)| (m.exponents().to_vec(), c.clone()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowCheck {
    pub row: usize,
    pub consistent: bool,
    /// First differing coefficient in graded order: `(index, predicted, actual)`.
    pub first_difference: Option<(Vec<u32>, Rational, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub rows: Vec<RowCheck>,
}

impl RelationReport {
    pub fn all_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.consistent)
    }
}

/// Recomputes `q̌_a/q_a = Π_i (1+δ_i)^{Q^a_i}` for every row and compares it
/// with the inverse mirror map.
pub fn verify_conjecture_relations(
    q: &ChargeMatrix,
    inv: &InverseMirrorMap,
    corr: &Corrections,
) -> Result<RelationReport, FlatError> {
    if inv.components.len() != q.l() {
        return Err(FlatError::ComponentMismatch {
            expected: q.l(),
            got: inv.components.len(),
        });
    }
    let mut rows = Vec::new();
    for a in 0..q.l() {
        let actual = &inv.components[a];
        let mut predicted = MultiSeries::one(actual.nvars(), actual.cutoff());
        for i in 0..q.m() {
            let e = q.entry(a, i);
            if e != 0 && corr.delta(i).is_some() {
                predicted = predicted.mul(&pow_int(&corr.factor(i), e)?)?;
            }
        }
        let diff = predicted.sub(actual)?;
        let first_difference = diff
            .terms()
            .next()
            .map(|(m, _)| (m.exponents().to_vec(), predicted.coeff(m), actual.coeff(m)));
        rows.push(RowCheck {
            row: a,
            consistent: first_difference.is_none(),
            first_difference,
        });
    }
    Ok(RelationReport { rows })
}

/// Whether every coefficient is an integer.
pub fn is_integral(delta: &CorrectionSeries) -> bool {
    delta.delta.all_integer()
}

/// Constant term of `1 + δ`, the invariant of the basic disk class.
pub fn basic_invariant(delta: &CorrectionSeries) -> Rational {
    let f = delta.factor();
    let c = f.constant_term();
    debug_assert!(!c.is_zero());
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::single_log_periods;
    use crate::toric_cy::{charge_matrix, validate_fan, Fan};
    use syz_series::rational::int;

    fn kp2() -> CyFan {
        validate_fan(&Fan::new(
            3,
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]],
            vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1]],
        ))
        .unwrap()
    }

    #[test]
    fn kp2_delta_and_inverse() {
        let f = kp2();
        let q = charge_matrix(&f);
        let p = single_log_periods(&q, 6);
        let inv = inverse_mirror_map(&p).unwrap();
        let qcheck = inv.coordinate(0);
        // q^5 is forced negative by the delta values below
        for (k, c) in [(1, 1), (2, 6), (3, 9), (4, 56), (5, -300), (6, 3942)] {
            assert_eq!(qcheck.coeff_of(&[k]), int(c));
        }
        let d = extract_delta(&f, &q, &inv).unwrap();
        let expected = [-2, 5, -32, 286, -3038, 35870];
        for (k, c) in expected.iter().enumerate() {
            assert_eq!(d.delta.coeff_of(&[k as u32 + 1]), int(*c));
        }
        assert!(is_integral(&d));
        assert_eq!(basic_invariant(&d), int(1));
        let corr = Corrections::from_delta(4, &d);
        assert!(verify_conjecture_relations(&q, &inv, &corr)
            .unwrap()
            .all_consistent());
    }

    #[test]
    fn corrupted_delta_is_reported() {
        let f = kp2();
        let q = charge_matrix(&f);
        let inv = inverse_mirror_map(&single_log_periods(&q, 6)).unwrap();
        let mut d = extract_delta(&f, &q, &inv).unwrap();
        let bump = MultiSeries::monomial(1, 6, Monomial::new(vec![3]), int(1));
        d.delta = d.delta.add(&bump).unwrap();
        let report =
            verify_conjecture_relations(&q, &inv, &Corrections::from_delta(4, &d)).unwrap();
        assert!(!report.all_consistent());
        assert_eq!(report.rows[0].first_difference.as_ref().unwrap().0, vec![3]);
    }

    #[test]
    fn conifold_refuses_extraction() {
        let f = validate_fan(&Fan::new(
            3,
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, -1, 1]],
            vec![vec![0, 1, 2], vec![0, 1, 3]],
        ))
        .unwrap();
        let q = charge_matrix(&f);
        let inv = inverse_mirror_map(&single_log_periods(&q, 5)).unwrap();
        assert_eq!(inv.components[0], MultiSeries::one(1, 5));
        assert!(matches!(
            extract_delta(&f, &q, &inv),
            Err(FlatError::UnderdeterminedExtraction(v)) if v.is_empty()
        ));
        let corr = corrections(&f, &q, &inv).unwrap();
        assert!(corr.delta(0).is_none());
        assert!(verify_conjecture_relations(&q, &inv, &corr)
            .unwrap()
            .all_consistent());
    }
}
