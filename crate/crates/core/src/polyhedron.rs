//! Small exact polyhedra `{x : E x = e, A x >= b}` given by constraints.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use syz_series::Rational;

use crate::lattice::{nullspace, rank, rat_dot, solve_unique};

/// `a · x >= b`, or `a · x = b` when used as an equation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub a: Vec<Rational>,
    pub b: Rational,
}

impl Constraint {
    pub fn new(a: Vec<Rational>, b: Rational) -> Self {
        Constraint { a, b }
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        rat_dot(&self.a, x) >= self.b
    }

    pub fn tight_at(&self, x: &[Rational]) -> bool {
        rat_dot(&self.a, x) == self.b
    }

    /// Positive rescaling so that the first nonzero coefficient is ±1.
    fn normalized(&self) -> Constraint {
        match self.a.iter().find(|x| !x.is_zero()) {
            Some(lead) => {
                let s = lead.abs();
                Constraint {
                    a: self.a.iter().map(|x| x / &s).collect(),
                    b: &self.b / &s,
                }
            }
            None => self.clone(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Polyhedron {
    pub dim: usize,
    pub equations: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

impl Polyhedron {
    pub fn new(dim: usize, equations: Vec<Constraint>, inequalities: Vec<Constraint>) -> Self {
        Polyhedron {
            dim,
            equations,
            inequalities,
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equations.iter().all(|c| c.tight_at(x))
            && self.inequalities.iter().all(|c| c.holds_at(x))
    }

    fn equation_rank(&self) -> usize {
        let rows: Vec<_> = self.equations.iter().map(|c| c.a.clone()).collect();
        rank(&rows)
    }

    /// Vertices by brute force over tight constraint subsets.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let free = self.dim - self.equation_rank().min(self.dim);
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for subset in (0..self.inequalities.len()).combinations(free) {
            let rows: Vec<&Constraint> = self
                .equations
                .iter()
                .chain(subset.iter().map(|&i| &self.inequalities[i]))
                .collect();
            let a: Vec<_> = rows.iter().map(|c| c.a.clone()).collect();
            let b: Vec<_> = rows.iter().map(|c| c.b.clone()).collect();
            if a.is_empty() {
                // zero-dimensional ambient space
                if self.dim == 0 && self.contains(&[]) && out.is_empty() {
                    out.push(Vec::new());
                }
                continue;
            }
            if rank(&a) != self.dim {
                continue;
            }
            let Some(x) = least_squares_exact(&a, &b) else {
                continue;
            };
            if self.contains(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
        out.sort();
        out
    }

    /// Extreme rays of the recession cone, as primitive-direction rational vectors.
    pub fn extreme_rays(&self) -> Vec<Vec<Rational>> {
        let eq_rank = self.equation_rank();
        if eq_rank >= self.dim {
            return Vec::new();
        }
        let need = self.dim - eq_rank - 1;
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for subset in (0..self.inequalities.len()).combinations(need) {
            let a: Vec<_> = self
                .equations
                .iter()
                .chain(subset.iter().map(|&i| &self.inequalities[i]))
                .map(|c| c.a.clone())
                .collect();
            let ns = nullspace(&a, self.dim);
            if ns.len() != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                let r: Vec<Rational> = ns[0]
                    .iter()
                    .map(|x| x * Rational::from_integer(sign.into()))
                    .collect();
                let ok = self
                    .inequalities
                    .iter()
                    .all(|c| !rat_dot(&c.a, &r).is_negative());
                if ok {
                    let r = normalize_direction(&r);
                    if !out.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Dimension of the lineality space.
    pub fn lineality(&self) -> usize {
        let rows: Vec<_> = self
            .equations
            .iter()
            .chain(&self.inequalities)
            .map(|c| c.a.clone())
            .collect();
        self.dim - rank(&rows)
    }

    /// Affine dimension of a nonempty pointed polyhedron, from its vertices and rays.
    pub fn affine_dimension(&self) -> Option<usize> {
        let vs = self.vertices();
        let base = vs.first()?;
        let mut dirs: Vec<Vec<Rational>> = vs[1..]
            .iter()
            .map(|v| v.iter().zip(base).map(|(x, y)| x - y).collect())
            .collect();
        dirs.extend(self.extreme_rays());
        Some(if dirs.is_empty() { 0 } else { rank(&dirs) })
    }

    pub fn is_empty(&self) -> bool {
        feasible_point(self).is_none()
    }
}

/// Unique solution of a consistent system with full column rank.
fn least_squares_exact(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    // pick an independent square subsystem, then check the rest
    let dim = a[0].len();
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..a.len() {
        let mut rows: Vec<_> = chosen.iter().map(|&j| a[j].clone()).collect();
        rows.push(a[i].clone());
        if rank(&rows) == rows.len() {
            chosen.push(i);
        }
        if chosen.len() == dim {
            break;
        }
    }
    let sa: Vec<_> = chosen.iter().map(|&j| a[j].clone()).collect();
    let sb: Vec<_> = chosen.iter().map(|&j| b[j].clone()).collect();
    let x = solve_unique(&sa, &sb)?;
    a.iter()
        .zip(b)
        .all(|(r, bi)| &rat_dot(r, &x) == bi)
        .then_some(x)
}

fn normalize_direction(r: &[Rational]) -> Vec<Rational> {
    crate::lattice::primitive_direction(r)
        .into_iter()
        .map(Rational::from_integer)
        .collect()
}

/// A point of the polyhedron, found by Fourier–Motzkin elimination.
///
/// Equations are treated as pairs of opposite inequalities.
pub fn feasible_point(p: &Polyhedron) -> Option<Vec<Rational>> {
    let mut system: Vec<Constraint> = p.inequalities.clone();
    for e in &p.equations {
        system.push(e.clone());
        system.push(Constraint::new(
            e.a.iter().map(|x| -x).collect(),
            -e.b.clone(),
        ));
    }
    let d = p.dim;
    // stages[t] involves variables 0..d-t
    let mut stages: Vec<Vec<Constraint>> = vec![dedup(system)];
    for t in 0..d {
        let var = d - 1 - t;
        let current = &stages[t];
        let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in current {
            match c.a[var].cmp(&Rational::zero()) {
                std::cmp::Ordering::Greater => lower.push(c),
                std::cmp::Ordering::Less => upper.push(c),
                std::cmp::Ordering::Equal => rest.push(c.clone()),
            }
        }
        for l in &lower {
            for u in &upper {
                // l.a[var] > 0, u.a[var] < 0
                let sl = -&u.a[var];
                let su = l.a[var].clone();
                let a =
                    l.a.iter()
                        .zip(&u.a)
                        .map(|(x, y)| x * &sl + y * &su)
                        .collect();
                let b = &l.b * &sl + &u.b * &su;
                rest.push(Constraint::new(a, b));
            }
        }
        stages.push(dedup(rest));
    }
    if stages[d].iter().any(|c| c.b.is_positive()) {
        return None;
    }
    let mut x = vec![Rational::zero(); d];
    for var in 0..d {
        let stage = &stages[d - 1 - var];
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for c in stage {
            let coef = &c.a[var];
            if coef.is_zero() {
                continue;
            }
            let partial: Rational = (0..var).map(|k| &c.a[k] * &x[k]).sum();
            let bound = (&c.b - partial) / coef;
            if coef.is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            }
        }
        x[var] = pick_value(lo, hi)?;
    }
    p.contains(&x).then_some(x)
}

/// Prefers small integers inside the interval.
fn pick_value(lo: Option<Rational>, hi: Option<Rational>) -> Option<Rational> {
    match (lo, hi) {
        (None, None) => Some(Rational::zero()),
        (Some(l), None) => Some(if l.is_negative() {
            Rational::zero().max(l.ceil())
        } else {
            l.ceil()
        }),
        (None, Some(h)) => Some(if h.is_positive() {
            Rational::zero().min(h.floor())
        } else {
            h.floor()
        }),
        (Some(l), Some(h)) => {
            if l > h {
                return None;
            }
            let z = Rational::zero();
            if l <= z && z <= h {
                return Some(z);
            }
            let c = if l.is_positive() { l.ceil() } else { h.floor() };
            Some(if l <= c && c <= h {
                c
            } else {
                (l + h) / Rational::from_integer(2.into())
            })
        }
    }
}

fn dedup(cs: Vec<Constraint>) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = cs
        .iter()
        .map(Constraint::normalized)
        .filter(|c| !(c.a.iter().all(Zero::is_zero) && !c.b.is_positive()))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_to_rat;

    fn c(a: &[i64], b: i64) -> Constraint {
        Constraint::new(int_to_rat(a), Rational::from_integer(b.into()))
    }

    #[test]
    fn triangle_vertices() {
        let p = Polyhedron::new(
            2,
            vec![],
            vec![c(&[1, 0], 0), c(&[0, 1], 0), c(&[-1, -1], -1)],
        );
        let vs = p.vertices();
        assert_eq!(vs.len(), 3);
        assert!(p.extreme_rays().is_empty());
        assert_eq!(p.affine_dimension(), Some(2));
    }

    #[test]
    fn quadrant_has_two_rays() {
        let p = Polyhedron::new(2, vec![], vec![c(&[1, 0], 1), c(&[0, 1], 2)]);
        assert_eq!(p.vertices(), vec![int_to_rat(&[1, 2])]);
        assert_eq!(
            p.extreme_rays(),
            vec![int_to_rat(&[0, 1]), int_to_rat(&[1, 0])]
        );
    }

    #[test]
    fn half_line_with_equation() {
        let p = Polyhedron::new(2, vec![c(&[1, 0], 0)], vec![c(&[0, 1], 0)]);
        assert_eq!(p.vertices(), vec![int_to_rat(&[0, 0])]);
        assert_eq!(p.extreme_rays(), vec![int_to_rat(&[0, 1])]);
        assert_eq!(p.affine_dimension(), Some(1));
    }

    #[test]
    fn fourier_motzkin_feasibility() {
        let p = Polyhedron::new(
            2,
            vec![],
            vec![c(&[1, 1], 3), c(&[1, -1], 1), c(&[-1, 0], -5)],
        );
        let x = feasible_point(&p).unwrap();
        assert!(p.contains(&x));
        let empty = Polyhedron::new(1, vec![], vec![c(&[1], 2), c(&[-1], -1)]);
        assert!(empty.is_empty());
    }
}
