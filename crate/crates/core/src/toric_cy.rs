//! Smooth toric Calabi-Yau fans and their polytope combinatorics.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Zero};
use syz_series::Rational;
use thiserror::Error;

use crate::lattice::{dot, dual_basis, int_det, int_to_rat, is_primitive, rat_dot};
use crate::polyhedron::{feasible_point, Constraint, Polyhedron};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("fan has no rays or no maximal cones")]
    EmptyFan,
    #[error("ray {ray} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        ray: usize,
        expected: usize,
        got: usize,
    },
    #[error("ray {index} is not primitive")]
    NonPrimitiveRay { index: usize },
    #[error("rays {first} and {second} coincide")]
    DuplicateRay { first: usize, second: usize },
    #[error("cone {cone} is malformed: {reason}")]
    InvalidCone { cone: usize, reason: String },
    #[error("ray {index} lies in no maximal cone")]
    UnusedRay { index: usize },
    #[error("cone {cone} has determinant {det}, expected ±1")]
    NonUnimodularCone { cone: usize, det: i64 },
    #[error("no covector pairs to 1 with every ray (fails at ray {ray})")]
    NoCYCovector { ray: usize },
    #[error("support is not convex: {0}")]
    NonConvexSupport(String),
    #[error("unsupported fan: {0}")]
    UnsupportedFan(String),
    #[error("new ray v'_{new} coincides with ray {existing}")]
    RayCollision { new: usize, existing: usize },
    #[error("{0:?} is not a maximal cone")]
    NotACone(Vec<usize>),
    #[error("base cone index {index} out of range")]
    BadBaseCone { index: usize },
    #[error("inconsistent polytope: {0}")]
    InconsistentPolytope(String),
    #[error("polytope does not have the fan as its normal fan: {0}")]
    PolytopeMismatch(String),
    #[error("modified fan is not smooth: {0}")]
    ModificationNotSmooth(String),
}

/// Raw fan data: rank, integer rays and maximal cones as ray-index lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        Fan {
            rank,
            rays,
            max_cones,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Index of the maximal cone with the given ray set, ignoring order.
    pub fn find_cone(&self, rays: &[usize]) -> Option<usize> {
        let want: BTreeSet<usize> = rays.iter().copied().collect();
        if want.len() != rays.len() {
            return None;
        }
        self.max_cones
            .iter()
            .position(|c| c.iter().copied().collect::<BTreeSet<_>>() == want)
    }
}

/// An interior wall shared by two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub cones: [usize; 2],
    pub rays: Vec<usize>,
    /// The ray of each cone not on the wall.
    pub opposite: [usize; 2],
}

/// A facet of a maximal cone lying on the boundary of the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryFacet {
    pub cone: usize,
    pub rays: Vec<usize>,
    /// Inward normal, pairing to 1 with the omitted ray.
    pub normal: Vec<i64>,
}

/// A fan checked to be smooth with convex support.
#[derive(Clone, Debug)]
pub struct ValidFan {
    fan: Fan,
    cone_duals: Vec<Vec<Vec<i64>>>,
    walls: Vec<Wall>,
    boundary: Vec<BoundaryFacet>,
}

impl ValidFan {
    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    /// Dual basis of maximal cone `c`, row `k` dual to ray `max_cones[c][k]`.
    pub fn cone_dual(&self, c: usize) -> &[Vec<i64>] {
        &self.cone_duals[c]
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn boundary(&self) -> &[BoundaryFacet] {
        &self.boundary
    }
}

/// Checks primitivity, smoothness, cone well-formedness and convex support.
pub fn check_smooth_convex(raw: &Fan) -> Result<ValidFan, FanError> {
    let n = raw.rank;
    if n == 0 || raw.rays.is_empty() || raw.max_cones.is_empty() {
        return Err(FanError::EmptyFan);
    }
    for (i, v) in raw.rays.iter().enumerate() {
        if v.len() != n {
            return Err(FanError::DimensionMismatch {
                ray: i,
                expected: n,
                got: v.len(),
            });
        }
        if !is_primitive(v) {
            return Err(FanError::NonPrimitiveRay { index: i });
        }
    }
    for (i, j) in (0..raw.rays.len()).tuple_combinations() {
        if raw.rays[i] == raw.rays[j] {
            return Err(FanError::DuplicateRay {
                first: i,
                second: j,
            });
        }
    }
    let mut seen_cones = BTreeSet::new();
    let mut used = vec![false; raw.rays.len()];
    for (c, cone) in raw.max_cones.iter().enumerate() {
        let invalid = |reason: String| FanError::InvalidCone { cone: c, reason };
        if cone.len() != n {
            return Err(invalid(format!("has {} rays, expected {n}", cone.len())));
        }
        let set: BTreeSet<usize> = cone.iter().copied().collect();
        if set.len() != n {
            return Err(invalid("repeated ray index".into()));
        }
        if let Some(&bad) = set.iter().find(|&&i| i >= raw.rays.len()) {
            return Err(invalid(format!("ray index {bad} out of range")));
        }
        if !seen_cones.insert(set) {
            return Err(invalid("listed twice".into()));
        }
        for &i in cone {
            used[i] = true;
        }
    }
    if let Some(index) = used.iter().position(|u| !u) {
        return Err(FanError::UnusedRay { index });
    }

    let mut cone_duals = Vec::with_capacity(raw.max_cones.len());
    for (c, cone) in raw.max_cones.iter().enumerate() {
        let vs: Vec<Vec<i64>> = cone.iter().map(|&i| raw.rays[i].clone()).collect();
        let det = int_det(&vs);
        if det.abs() != 1 {
            return Err(FanError::NonUnimodularCone { cone: c, det });
        }
        cone_duals.push(dual_basis(&vs).expect("unimodular"));
    }

    // group facets by their ray set
    let mut facets: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    for (c, cone) in raw.max_cones.iter().enumerate() {
        for k in 0..n {
            let mut f: Vec<usize> = cone
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &i)| i)
                .collect();
            f.sort_unstable();
            facets.entry(f).or_default().push((c, k));
        }
    }
    let mut walls = Vec::new();
    let mut boundary = Vec::new();
    for (rays, owners) in facets {
        match owners.as_slice() {
            [(c, k)] => {
                let normal = cone_duals[*c][*k].clone();
                if let Some(bad) = raw.rays.iter().position(|v| dot(&normal, v) < 0) {
                    return Err(FanError::NonConvexSupport(format!(
                        "ray {bad} lies beyond the boundary facet {rays:?} of cone {c}"
                    )));
                }
                boundary.push(BoundaryFacet {
                    cone: *c,
                    rays,
                    normal,
                });
            }
            [(c1, k1), (c2, k2)] => {
                let o1 = raw.max_cones[*c1][*k1];
                let o2 = raw.max_cones[*c2][*k2];
                if dot(&cone_duals[*c1][*k1], &raw.rays[o2]) >= 0 {
                    return Err(FanError::NonConvexSupport(format!(
                        "cones {c1} and {c2} overlap across the wall {rays:?}"
                    )));
                }
                walls.push(Wall {
                    cones: [*c1, *c2],
                    rays,
                    opposite: [o1, o2],
                });
            }
            many => {
                return Err(FanError::UnsupportedFan(format!(
                    "facet {rays:?} is shared by {} cones",
                    many.len()
                )));
            }
        }
    }

    // the cones must form a single wall-connected piece
    let mut reached = vec![false; raw.max_cones.len()];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(c) = stack.pop() {
        for w in &walls {
            for (a, b) in [(w.cones[0], w.cones[1]), (w.cones[1], w.cones[0])] {
                if a == c && !reached[b] {
                    reached[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    if let Some(c) = reached.iter().position(|r| !r) {
        return Err(FanError::NonConvexSupport(format!(
            "cone {c} is not connected to cone 0 through walls"
        )));
    }

    Ok(ValidFan {
        fan: raw.clone(),
        cone_duals,
        walls,
        boundary,
    })
}

/// Calabi-Yau covector and the dual basis of the chosen base cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyStructure {
    covector: Vec<i64>,
    base_cone: usize,
    base: Vec<usize>,
    dual_basis: Vec<Vec<i64>>,
}

impl CyStructure {
    pub fn covector(&self) -> &[i64] {
        &self.covector
    }

    pub fn base_cone(&self) -> usize {
        self.base_cone
    }

    /// Ray indices of the base cone, in order `v_0, …, v_{n-1}`.
    pub fn base(&self) -> &[usize] {
        &self.base
    }

    /// Rows `ν_0, …, ν_{n-1}`.
    pub fn dual_basis(&self) -> &[Vec<i64>] {
        &self.dual_basis
    }
}

/// A validated toric Calabi-Yau fan with a chosen base cone.
#[derive(Clone, Debug)]
pub struct CyFan {
    valid: ValidFan,
    cy: CyStructure,
}

impl CyFan {
    pub fn fan(&self) -> &Fan {
        &self.valid.fan
    }

    pub fn valid(&self) -> &ValidFan {
        &self.valid
    }

    pub fn cy(&self) -> &CyStructure {
        &self.cy
    }

    pub fn rank(&self) -> usize {
        self.valid.fan.rank
    }

    pub fn num_rays(&self) -> usize {
        self.valid.fan.rays.len()
    }

    /// `⟨ν_j, v_i⟩`.
    pub fn pairing(&self, j: usize, i: usize) -> i64 {
        dot(&self.cy.dual_basis[j], &self.valid.fan.rays[i])
    }

    /// Exponent vector `(⟨ν_1, v_i⟩, …, ⟨ν_{n-1}, v_i⟩)` of ray `i` in the mirror variables.
    pub fn projection(&self, i: usize) -> Vec<i64> {
        (1..self.rank()).map(|j| self.pairing(j, i)).collect()
    }

    /// Non-base rays in input order; ray `others()[a]` defines the curve class `S_a`.
    pub fn others(&self) -> Vec<usize> {
        (0..self.num_rays())
            .filter(|i| !self.cy.base.contains(i))
            .collect()
    }

    /// Same fan with a different base cone.
    pub fn with_base(&self, base_cone: usize) -> Result<CyFan, FanError> {
        validate_fan_with_base(&self.valid.fan, base_cone)
    }
}

/// Validates a fan, choosing the first maximal cone as base cone.
pub fn validate_fan(raw: &Fan) -> Result<CyFan, FanError> {
    validate_fan_with_base(raw, 0)
}

pub fn validate_fan_with_base(raw: &Fan, base_cone: usize) -> Result<CyFan, FanError> {
    let valid = check_smooth_convex(raw)?;
    if base_cone >= raw.max_cones.len() {
        return Err(FanError::BadBaseCone { index: base_cone });
    }
    let base = raw.max_cones[base_cone].clone();
    let dual = valid.cone_duals[base_cone].clone();
    let n = raw.rank;
    let covector: Vec<i64> = (0..n)
        .map(|c| dual.iter().map(|row| row[c]).sum())
        .collect();
    if let Some(ray) = raw.rays.iter().position(|v| dot(&covector, v) != 1) {
        return Err(FanError::NoCYCovector { ray });
    }
    Ok(CyFan {
        valid,
        cy: CyStructure {
            covector,
            base_cone,
            base,
            dual_basis: dual,
        },
    })
}

/// Integer charge vectors `Q^a`, one per non-base ray, indexed by original ray order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeMatrix {
    rows: Vec<Vec<i64>>,
    base: Vec<usize>,
    others: Vec<usize>,
}

impl ChargeMatrix {
    /// Builds a charge matrix from explicit rows; `others[a]` is the ray with `Q^a = 1`.
    pub fn from_rows(rows: Vec<Vec<i64>>, base: Vec<usize>, others: Vec<usize>) -> Self {
        ChargeMatrix { rows, base, others }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn row(&self, a: usize) -> &[i64] {
        &self.rows[a]
    }

    /// Number of rows `l = m − n`.
    pub fn l(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns `m`.
    pub fn m(&self) -> usize {
        self.base.len() + self.others.len()
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn others(&self) -> &[usize] {
        &self.others
    }

    pub fn entry(&self, a: usize, i: usize) -> i64 {
        self.rows[a][i]
    }

    /// `Σ_a α_a Q^a`, the ray-coordinates of a sphere class.
    pub fn class_vector(&self, alpha: &[i64]) -> Vec<i64> {
        (0..self.m())
            .map(|i| alpha.iter().zip(&self.rows).map(|(x, r)| x * r[i]).sum())
            .collect()
    }

    /// Writes `x = Σ_a α_a Q^a` if possible.
    pub fn decompose(&self, x: &[i64]) -> Option<Vec<i64>> {
        let alpha: Vec<i64> = self.others.iter().map(|&o| x[o]).collect();
        (self.class_vector(&alpha) == x).then_some(alpha)
    }
}

pub fn charge_matrix(fan: &CyFan) -> ChargeMatrix {
    let m = fan.num_rays();
    let base = fan.cy.base.clone();
    let others = fan.others();
    let rows = others
        .iter()
        .map(|&o| {
            let mut row = vec![0i64; m];
            row[o] = 1;
            for (j, &b) in base.iter().enumerate() {
                row[b] = -fan.pairing(j, o);
            }
            row
        })
        .collect();
    ChargeMatrix { rows, base, others }
}

/// Rays lying in the interior of the support; these give the compact toric divisors.
pub fn compact_divisors(fan: &ValidFan) -> BTreeSet<usize> {
    (0..fan.fan.num_rays())
        .filter(|&i| {
            fan.boundary
                .iter()
                .all(|f| dot(&f.normal, &fan.fan.rays[i]) > 0)
        })
        .collect()
}

/// Relation among the rays of the two cones adjacent to each interior wall,
/// normalized so the two opposite rays have coefficient 1. These are the
/// classes of the torus-invariant compact curves.
pub fn wall_relations(fan: &ValidFan) -> Vec<Vec<i64>> {
    let f = &fan.fan;
    fan.walls
        .iter()
        .map(|w| {
            let [c1, _] = w.cones;
            let [o1, o2] = w.opposite;
            let k1 = f.max_cones[c1]
                .iter()
                .position(|&i| i == o1)
                .expect("opposite ray");
            let mut r = vec![0i64; f.num_rays()];
            r[o1] = 1;
            r[o2] += 1;
            // v_{o2} = Σ_{i∈c1} ⟨ν_i, v_{o2}⟩ v_i, and ⟨ν_{k1}, v_{o2}⟩ = −1 for smooth walls
            for (k, &i) in f.max_cones[c1].iter().enumerate() {
                if k != k1 {
                    r[i] -= dot(&fan.cone_duals[c1][k], &f.rays[o2]);
                }
            }
            debug_assert_eq!(dot(&fan.cone_duals[c1][k1], &f.rays[o2]), -1);
            r
        })
        .collect()
}

/// Whether every compact torus-invariant curve is a nonnegative combination of
/// the `S_a`; if not, the nonnegative orthant is not the effective cone.
pub fn mori_orthant_check(fan: &CyFan, q: &ChargeMatrix) -> MoriCheck {
    let classes: Vec<Vec<i64>> = wall_relations(&fan.valid)
        .iter()
        .map(|r| {
            q.decompose(r)
                .expect("wall relations lie in the charge lattice")
        })
        .collect();
    let nonnegative = classes.iter().all(|c| c.iter().all(|&x| x >= 0));
    MoriCheck {
        classes,
        nonnegative,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoriCheck {
    /// Wall curve classes in the `S_a` basis.
    pub classes: Vec<Vec<i64>>,
    pub nonnegative: bool,
}

/// Constants `c_i` of `P = {ξ : ⟨v_i, ξ⟩ ≥ c_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentPolytope {
    constants: Vec<Rational>,
}

impl MomentPolytope {
    pub fn new(constants: Vec<Rational>) -> Self {
        MomentPolytope { constants }
    }

    pub fn constants(&self) -> &[Rational] {
        &self.constants
    }

    /// `0` on the base cone and `−1` elsewhere when that works, otherwise a
    /// strictly convex choice found by elimination.
    pub fn for_fan(fan: &CyFan) -> Result<MomentPolytope, FanError> {
        let m = fan.num_rays();
        let constants = (0..m)
            .map(|i| {
                if fan.cy.base.contains(&i) {
                    Rational::zero()
                } else {
                    -Rational::one()
                }
            })
            .collect();
        let p = MomentPolytope { constants };
        if p.check(fan.valid()).is_ok() {
            return Ok(p);
        }
        Self::search(fan)
    }

    fn search(fan: &CyFan) -> Result<MomentPolytope, FanError> {
        let others = fan.others();
        let col: BTreeMap<usize, usize> = others.iter().enumerate().map(|(a, &o)| (o, a)).collect();
        let f = fan.fan();
        let mut ineqs = Vec::new();
        for w in fan.valid.walls() {
            for side in 0..2 {
                let c = w.cones[side];
                let t = w.opposite[1 - side];
                let mut a = vec![Rational::zero(); others.len()];
                for (k, &i) in f.max_cones[c].iter().enumerate() {
                    if let Some(&slot) = col.get(&i) {
                        a[slot] += Rational::from_integer(
                            dot(&fan.valid.cone_duals[c][k], &f.rays[t]).into(),
                        );
                    }
                }
                if let Some(&slot) = col.get(&t) {
                    a[slot] -= Rational::one();
                }
                ineqs.push(Constraint::new(a, Rational::one()));
            }
        }
        let point =
            feasible_point(&Polyhedron::new(others.len(), vec![], ineqs)).ok_or_else(|| {
                FanError::PolytopeMismatch("no strictly convex support function exists".into())
            })?;
        let mut constants = vec![Rational::zero(); f.num_rays()];
        for (a, &o) in others.iter().enumerate() {
            constants[o] = point[a].clone();
        }
        let p = MomentPolytope { constants };
        p.check(fan.valid())?;
        Ok(p)
    }

    /// The vertex `ξ_σ` where the facets of cone `c` meet.
    pub fn vertex(&self, fan: &ValidFan, c: usize) -> Vec<Rational> {
        let n = fan.fan.rank;
        let mut xi = vec![Rational::zero(); n];
        for (k, &i) in fan.fan.max_cones[c].iter().enumerate() {
            for (x, &d) in xi.iter_mut().zip(&fan.cone_duals[c][k]) {
                *x += &self.constants[i] * Rational::from_integer(d.into());
            }
        }
        xi
    }

    /// Checks that the inward normal fan of the polytope is the given fan.
    pub fn check(&self, fan: &ValidFan) -> Result<(), FanError> {
        let f = &fan.fan;
        if self.constants.len() != f.num_rays() {
            return Err(FanError::InconsistentPolytope(format!(
                "{} constants for {} rays",
                self.constants.len(),
                f.num_rays()
            )));
        }
        for w in &fan.walls {
            for side in 0..2 {
                let xi = self.vertex(fan, w.cones[side]);
                let t = w.opposite[1 - side];
                if rat_dot(&int_to_rat(&f.rays[t]), &xi) <= self.constants[t] {
                    return Err(FanError::PolytopeMismatch(format!(
                        "vertex of cone {} does not lie strictly inside facet {t}",
                        w.cones[side]
                    )));
                }
            }
        }
        Ok(())
    }

    fn as_polyhedron(&self, fan: &Fan) -> Polyhedron {
        let ineqs = fan
            .rays
            .iter()
            .zip(&self.constants)
            .map(|(v, c)| Constraint::new(int_to_rat(v), c.clone()))
            .collect();
        Polyhedron::new(fan.rank, vec![], ineqs)
    }
}

/// The toric modification: the fan gains `v'_j = v_j − v_0` for `j = 1, …, n−1`.
#[derive(Clone, Debug)]
pub struct ModifiedFan {
    valid: ValidFan,
    original_rays: usize,
    k1: Rational,
    step: Rational,
    constants: Vec<Rational>,
}

impl ModifiedFan {
    pub fn valid(&self) -> &ValidFan {
        &self.valid
    }

    pub fn fan(&self) -> &Fan {
        &self.valid.fan
    }

    pub fn original_rays(&self) -> usize {
        self.original_rays
    }

    /// Index of `v'_j` (`j ≥ 1`) in the modified fan.
    pub fn new_ray(&self, j: usize) -> usize {
        self.original_rays + j - 1
    }

    /// Truncation depth: `⟨v'_j, ξ⟩ ≥ −(K₁ + (j − 1)s)` with `s` the [`step`](Self::step).
    pub fn k1(&self) -> &Rational {
        &self.k1
    }

    pub fn step(&self) -> &Rational {
        &self.step
    }

    pub fn constants(&self) -> &[Rational] {
        &self.constants
    }
}

pub fn modify_fan(fan: &CyFan) -> Result<ModifiedFan, FanError> {
    modify_fan_with(fan, &MomentPolytope::for_fan(fan)?)
}

pub fn modify_fan_with(fan: &CyFan, polytope: &MomentPolytope) -> Result<ModifiedFan, FanError> {
    polytope.check(fan.valid())?;
    let f = fan.fan();
    let n = f.rank;
    let m = f.num_rays();
    let base = fan.cy.base();
    let new_rays: Vec<Vec<i64>> = (1..n)
        .map(|j| {
            f.rays[base[j]]
                .iter()
                .zip(&f.rays[base[0]])
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    for (j, r) in new_rays.iter().enumerate() {
        if let Some(existing) = f.rays.iter().position(|v| v == r) {
            return Err(FanError::RayCollision {
                new: j + 1,
                existing,
            });
        }
    }
    let mut rays = f.rays.clone();
    rays.extend(new_rays.iter().cloned());

    // deep enough that every original vertex survives
    let mut depth = Rational::zero();
    for c in 0..f.max_cones.len() {
        let xi = polytope.vertex(fan.valid(), c);
        for r in &new_rays {
            depth = depth.max(-rat_dot(&int_to_rat(r), &xi));
        }
    }
    // K₁ large against every ratio of pairings, so which added facet cuts an
    // unbounded edge first is decided by the pairings alone, as for a common
    // K₁ → ∞. Staggered depths keep P' simple: a common depth, or an unlucky
    // step, lets the constants satisfy a linear relation among the facet
    // normals and four facets meet at one corner.
    let entry = rays.iter().flatten().map(|x| x.abs()).max().unwrap_or(1) + 1;
    let bound = num_bigint::BigInt::from(n as i64 * entry).pow(2 * n as u32);
    let steps = [
        (1, 1),
        (1, 2),
        (3, 2),
        (1, 3),
        (2, 3),
        (4, 3),
        (1, 4),
        (3, 4),
        (5, 4),
        (7, 5),
    ];
    let start = (depth.floor() + Rational::one()) * Rational::from_integer(bound);
    let mut last_problem = String::new();
    for extra in 0..2i64 {
        let k1 = &start + Rational::from_integer(extra.into());
        for (&(p, q), sign) in steps.iter().flat_map(|s| [(s, 1i64), (s, -1)]) {
            let step = Rational::new((sign * p).into(), q.into());
            // a negative step staggers the other way, from the deepest cut
            let k1 = if sign < 0 {
                &k1 - &step * Rational::from_integer((n as i64 - 2).into())
            } else {
                k1.clone()
            };
            let mut constants = polytope.constants.clone();
            constants.extend((0..n - 1).map(|j| -(&k1 + &step * Rational::from_integer(j.into()))));
            let cones = match truncated_normal_fan(n, &rays, &constants) {
                Ok(cones) => cones,
                Err(problem) => {
                    last_problem = problem;
                    continue;
                }
            };
            match check_smooth_convex(&Fan::new(n, rays.clone(), cones)) {
                Ok(valid) => {
                    return Ok(ModifiedFan {
                        valid,
                        original_rays: m,
                        k1,
                        step,
                        constants,
                    })
                }
                Err(e) => last_problem = e.to_string(),
            }
        }
    }
    Err(FanError::ModificationNotSmooth(last_problem))
}

/// Maximal cones of the inward normal fan of `{⟨v_i, ξ⟩ ≥ c_i}`, one per vertex.
fn truncated_normal_fan(
    n: usize,
    rays: &[Vec<i64>],
    constants: &[Rational],
) -> Result<Vec<Vec<usize>>, String> {
    let ineqs: Vec<Constraint> = rays
        .iter()
        .zip(constants)
        .map(|(v, c)| Constraint::new(int_to_rat(v), c.clone()))
        .collect();
    let p = Polyhedron::new(n, vec![], ineqs.clone());
    let mut cones = Vec::new();
    let mut used = vec![false; rays.len()];
    for xi in p.vertices() {
        let tight: Vec<usize> = (0..rays.len())
            .filter(|&i| ineqs[i].tight_at(&xi))
            .collect();
        if tight.len() != n {
            return Err(format!("vertex {} is not simple", format_point(&xi)));
        }
        for &i in &tight {
            used[i] = true;
        }
        cones.push(tight);
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(format!("inequality {i} is redundant"));
    }
    Ok(cones)
}

fn format_point(xi: &[Rational]) -> String {
    format!("({})", xi.iter().map(ToString::to_string).join(", "))
}

/// One codimension-two stratum `T_I` of the discriminant locus, in the
/// quotient coordinates `y_j = ⟨v'_j, ·⟩`, `j = 1, …, n−1`.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub pair: [usize; 2],
    pub region: Polyhedron,
    pub dimension: usize,
    pub vertices: Vec<Vec<Rational>>,
    pub rays: Vec<Vec<Rational>>,
}

/// The discriminant locus: the boundary of the base plus the strata `T_I`.
#[derive(Clone, Debug)]
pub struct Discriminant {
    /// Always present: the boundary `∂B`, image of the divisor `D_0`.
    pub boundary: bool,
    pub strata: Vec<Stratum>,
}

pub fn discriminant_locus(
    fan: &CyFan,
    polytope: &MomentPolytope,
) -> Result<Discriminant, FanError> {
    let f = fan.fan();
    if polytope.constants.len() != f.num_rays() {
        return Err(FanError::InconsistentPolytope(format!(
            "{} constants for {} rays",
            polytope.constants.len(),
            f.num_rays()
        )));
    }
    if polytope.as_polyhedron(f).is_empty() {
        return Err(FanError::InconsistentPolytope(
            "the polytope is empty".into(),
        ));
    }
    let n = f.rank;
    let coords: Vec<Vec<Rational>> = (0..f.num_rays())
        .map(|i| int_to_rat(&fan.projection(i)))
        .collect();
    let c = &polytope.constants;
    let pairs: BTreeSet<[usize; 2]> = f
        .max_cones
        .iter()
        .flat_map(|cone| {
            cone.iter()
                .copied()
                .tuple_combinations()
                .map(|(a, b)| [a.min(b), a.max(b)])
                .collect::<Vec<_>>()
        })
        .collect();
    let diff = |k: usize, i: usize| -> Vec<Rational> {
        coords[k]
            .iter()
            .zip(&coords[i])
            .map(|(a, b)| a - b)
            .collect()
    };
    let mut strata = Vec::new();
    for [i1, i2] in pairs {
        let eq = Constraint::new(diff(i2, i1), &c[i2] - &c[i1]);
        let ineqs = (0..f.num_rays())
            .filter(|&k| k != i1 && k != i2)
            .map(|k| Constraint::new(diff(k, i1), &c[k] - &c[i1]))
            .collect();
        let region = Polyhedron::new(n - 1, vec![eq], ineqs);
        let vertices = region.vertices();
        if vertices.is_empty() {
            continue;
        }
        let rays = region.extreme_rays();
        let dimension = region.affine_dimension().unwrap_or(0);
        strata.push(Stratum {
            pair: [i1, i2],
            region,
            dimension,
            vertices,
            rays,
        });
    }
    Ok(Discriminant {
        boundary: true,
        strata,
    })
}

/// Matrix `a` with `μ_j = a_{j0} ν̄ + Σ_k a_{jk} ν_k` relating the dual bases of
/// two ordered maximal cones; row 0 is `e_0`.
pub fn cone_change_matrix(
    fan: &CyFan,
    cone_a: &[usize],
    cone_b: &[usize],
) -> Result<Vec<Vec<i64>>, FanError> {
    let f = fan.fan();
    for cone in [cone_a, cone_b] {
        if f.find_cone(cone).is_none() {
            return Err(FanError::NotACone(cone.to_vec()));
        }
    }
    let n = f.rank;
    let vb: Vec<Vec<i64>> = cone_b.iter().map(|&i| f.rays[i].clone()).collect();
    let mu = dual_basis(&vb).expect("maximal cones are unimodular");
    let v0 = &f.rays[cone_a[0]];
    let mut a = vec![vec![0i64; n]; n];
    a[0][0] = 1;
    for j in 1..n {
        a[j][0] = dot(&mu[j], v0);
        for k in 1..n {
            let vk: Vec<i64> = f.rays[cone_a[k]]
                .iter()
                .zip(v0)
                .map(|(x, y)| x - y)
                .collect();
            a[j][k] = dot(&mu[j], &vk);
        }
    }
    Ok(a)
}

/// Determinant helper for callers that want to assert unimodularity.
pub fn matrix_det(a: &[Vec<i64>]) -> i64 {
    int_det(a)
}

/// Rational constants parsed for a polytope, checked for length.
pub fn polytope_from_constants(
    fan: &CyFan,
    constants: Vec<Rational>,
) -> Result<MomentPolytope, FanError> {
    let p = MomentPolytope::new(constants);
    if p.constants.len() != fan.num_rays() {
        return Err(FanError::InconsistentPolytope(format!(
            "{} constants for {} rays",
            p.constants.len(),
            fan.num_rays()
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kp2() -> Fan {
        Fan::new(
            3,
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]],
            vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1]],
        )
    }

    fn kp1() -> Fan {
        Fan::new(
            2,
            vec![vec![0, 1], vec![1, 1], vec![-1, 1]],
            vec![vec![0, 1], vec![0, 2]],
        )
    }

    fn conifold() -> Fan {
        Fan::new(
            3,
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, -1, 1]],
            vec![vec![0, 1, 2], vec![0, 1, 3]],
        )
    }

    #[test]
    fn kp2_validates() {
        let f = validate_fan(&kp2()).unwrap();
        assert_eq!(f.cy().covector(), &[0, 0, 1]);
        assert_eq!(charge_matrix(&f).rows(), &[vec![-3, 1, 1, 1]]);
        assert_eq!(compact_divisors(f.valid()), BTreeSet::from([0]));
    }

    #[test]
    fn p2_is_not_calabi_yau() {
        let p2 = Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        );
        assert!(matches!(
            validate_fan(&p2),
            Err(FanError::NoCYCovector { .. })
        ));
        assert!(check_smooth_convex(&p2).is_ok());
    }

    #[test]
    fn structural_errors() {
        let bad = Fan::new(2, vec![vec![0, 2], vec![1, 1]], vec![vec![0, 1]]);
        assert_eq!(
            validate_fan(&bad).unwrap_err(),
            FanError::NonPrimitiveRay { index: 0 }
        );
        let singular = Fan::new(2, vec![vec![1, 1], vec![-1, 1]], vec![vec![0, 1]]);
        assert!(matches!(
            validate_fan(&singular),
            Err(FanError::NonUnimodularCone { cone: 0, det: 2 })
        ));
        assert_eq!(
            validate_fan(&Fan::new(2, vec![], vec![])).unwrap_err(),
            FanError::EmptyFan
        );
        let overlapping = Fan::new(
            2,
            vec![vec![0, 1], vec![1, 1], vec![2, 1]],
            vec![vec![0, 1], vec![0, 2]],
        );
        assert!(matches!(
            validate_fan(&overlapping),
            Err(FanError::NonUnimodularCone { .. }) | Err(FanError::NonConvexSupport(_))
        ));
    }

    #[test]
    fn nonconvex_support_is_rejected() {
        // three cones of K_P2 minus one: an L-shaped support
        let f = Fan::new(
            3,
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]],
            vec![vec![0, 1, 2], vec![0, 2, 3]],
        );
        assert!(matches!(
            validate_fan(&f),
            Err(FanError::NonConvexSupport(_))
        ));
    }

    #[test]
    fn conifold_has_no_compact_divisor() {
        let f = validate_fan(&conifold()).unwrap();
        assert!(compact_divisors(f.valid()).is_empty());
        assert_eq!(charge_matrix(&f).rows(), &[vec![-1, -1, 1, 1]]);
    }

    #[test]
    fn kp1_modification_adds_one_ray() {
        let f = validate_fan(&kp1()).unwrap();
        let m = modify_fan(&f).unwrap();
        assert_eq!(m.fan().ray(3), &[1, 0]);
        assert_eq!(m.fan().num_rays(), 4);
    }

    #[test]
    fn kp2_modification_adds_two_rays() {
        let f = validate_fan(&kp2()).unwrap();
        let m = modify_fan(&f).unwrap();
        assert_eq!(m.fan().ray(4), &[1, 0, 0]);
        assert_eq!(m.fan().ray(5), &[0, 1, 0]);
        let compact = compact_divisors(m.valid());
        assert!(compact.contains(&0));
    }

    #[test]
    fn cone_change_identity_and_unimodular() {
        let f = validate_fan(&kp1()).unwrap();
        assert_eq!(
            cone_change_matrix(&f, &[0, 1], &[0, 1]).unwrap(),
            vec![vec![1, 0], vec![0, 1]]
        );
        let a = cone_change_matrix(&f, &[0, 1], &[0, 2]).unwrap();
        assert_eq!(matrix_det(&a).abs(), 1);
        assert!(matches!(
            cone_change_matrix(&f, &[1, 2], &[0, 1]),
            Err(FanError::NotACone(_))
        ));
    }

    #[test]
    fn default_polytope_matches_kp2() {
        let f = validate_fan(&kp2()).unwrap();
        let p = MomentPolytope::for_fan(&f).unwrap();
        assert_eq!(p.constants()[3], -Rational::one());
    }

    #[test]
    fn kp1_discriminant_is_two_points() {
        let f = validate_fan(&kp1()).unwrap();
        let p = MomentPolytope::for_fan(&f).unwrap();
        let d = discriminant_locus(&f, &p).unwrap();
        assert!(d.boundary);
        assert_eq!(d.strata.len(), 2);
        assert!(d
            .strata
            .iter()
            .all(|s| s.dimension == 0 && s.vertices.len() == 1));
    }
}
