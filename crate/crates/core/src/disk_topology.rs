//! Disk classes over the fibration, chamber invariants, Fourier-transformed
//! coordinates and the corrected mirror equation.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use syz_series::{
    default_names, latex_monomial, latex_names, latex_rational, write_monomial, Monomial,
    MultiSeries, Rational, SeriesError,
};
use thiserror::Error;

use crate::flat_coords::Corrections;
use crate::toric_cy::{
    charge_matrix, cone_change_matrix, matrix_det, ChargeMatrix, CyFan, FanError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiskError {
    #[error("unknown divisor {0}")]
    UnknownDivisor(String),
    #[error("{what} has length {got}, expected {expected}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("no invariant available for divisor {divisor} at sphere class {alpha:?}")]
    MissingInvariantData { divisor: usize, alpha: Vec<u32> },
    #[error("{0}")]
    ChartMismatch(String),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `Σ k_i β_i + Σ k′_j β′_j + Σ α_a S_a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiskClass {
    pub k: Vec<i64>,
    /// Multiplicities of `β′_1, …, β′_{n-1}`; zero for classes in `X`.
    pub kprime: Vec<i64>,
    pub alpha: Vec<i64>,
}

impl DiskClass {
    pub fn zero(m: usize, n: usize, l: usize) -> Self {
        DiskClass {
            k: vec![0; m],
            kprime: vec![0; n - 1],
            alpha: vec![0; l],
        }
    }

    /// Basic class `β_i`.
    pub fn basic(m: usize, n: usize, l: usize, i: usize) -> Self {
        let mut c = Self::zero(m, n, l);
        c.k[i] = 1;
        c
    }

    /// Basic class `β′_k`, `k ≥ 1`.
    pub fn basic_prime(m: usize, n: usize, l: usize, k: usize) -> Self {
        let mut c = Self::zero(m, n, l);
        c.kprime[k - 1] = 1;
        c
    }

    pub fn with_sphere(mut self, alpha: &[i64]) -> Self {
        self.alpha = alpha.to_vec();
        self
    }

    pub fn add(&self, other: &DiskClass) -> DiskClass {
        let sum = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        DiskClass {
            k: sum(&self.k, &other.k),
            kprime: sum(&self.kprime, &other.kprime),
            alpha: sum(&self.alpha, &other.alpha),
        }
    }

    fn check(&self, fan: &CyFan, q: &ChargeMatrix) -> Result<(), DiskError> {
        check_len("k", fan.num_rays(), self.k.len())?;
        check_len("kprime", fan.rank() - 1, self.kprime.len())?;
        check_len("alpha", q.l(), self.alpha.len())
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), DiskError> {
    if expected == got {
        Ok(())
    } else {
        Err(DiskError::ShapeMismatch {
            what,
            expected,
            got,
        })
    }
}

/// Element of `π_1` of a fiber in the basis `λ_0, …, λ_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LoopClass {
    pub coords: Vec<i64>,
}

/// `∂β_j = λ_0 + Σ_i ⟨ν_i, v_j⟩ λ_i`, `∂β′_k = λ_k`; sphere classes bound nothing.
pub fn boundary_class(
    fan: &CyFan,
    q: &ChargeMatrix,
    c: &DiskClass,
) -> Result<LoopClass, DiskError> {
    c.check(fan, q)?;
    let n = fan.rank();
    let mut coords = vec![0i64; n];
    for (j, &kj) in c.k.iter().enumerate() {
        coords[0] += kj;
        for (slot, p) in coords[1..].iter_mut().zip(fan.projection(j)) {
            *slot += kj * p;
        }
    }
    for (k, &kk) in c.kprime.iter().enumerate() {
        coords[k + 1] += kk;
    }
    Ok(LoopClass { coords })
}

/// `μ(β) = 2(Σ k_i + Σ k′_j)`.
pub fn maslov_index(c: &DiskClass) -> i64 {
    2 * (c.k.iter().sum::<i64>() + c.kprime.iter().sum::<i64>())
}

/// Divisors of the modified fan. The pole divisor of the holomorphic volume
/// form is `D_0 + Σ_{k≥1} D_k` with `D_0` the boundary divisor and `D_k = 𝒟′_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Divisor {
    Boundary,
    Toric(usize),
    Modified(usize),
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divisor::Boundary => write!(f, "D0"),
            Divisor::Toric(i) => write!(f, "T{i}"),
            Divisor::Modified(k) => write!(f, "D{k}"),
        }
    }
}

/// The components `D_0, D_1, …, D_{n-1}` of the pole divisor.
pub fn pole_divisors(n: usize) -> Vec<Divisor> {
    std::iter::once(Divisor::Boundary)
        .chain((1..n).map(Divisor::Modified))
        .collect()
}

pub fn intersection_number(
    fan: &CyFan,
    q: &ChargeMatrix,
    c: &DiskClass,
    d: Divisor,
) -> Result<i64, DiskError> {
    c.check(fan, q)?;
    let n = fan.rank();
    match d {
        Divisor::Boundary => Ok(c.k.iter().sum()),
        Divisor::Toric(i) if i < fan.num_rays() => Ok(c.k[i] + q.class_vector(&c.alpha)[i]),
        Divisor::Modified(k) if (1..n).contains(&k) => Ok(c.kprime[k - 1]),
        _ => Err(DiskError::UnknownDivisor(d.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChamberLabel {
    BPlus,
    BMinus,
}

impl fmt::Display for ChamberLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChamberLabel::BPlus => "B+",
            ChamberLabel::BMinus => "B-",
        })
    }
}

/// Supplier of `n_{β_i+α}` for compact divisors.
pub trait DeltaSource {
    /// Coefficient of `q^α` in `δ_i`, or `None` when `α` lies beyond the data.
    fn open_invariant(&self, divisor: usize, alpha: &[u32]) -> Option<Rational>;
}

impl DeltaSource for Corrections {
    fn open_invariant(&self, divisor: usize, alpha: &[u32]) -> Option<Rational> {
        if alpha.len() != self.nvars() || alpha.iter().sum::<u32>() > self.cutoff() {
            return None;
        }
        Some(
            self.delta(divisor)
                .map_or_else(Rational::zero, |d| d.coeff_of(alpha)),
        )
    }
}

/// Writes the class as `β_j + α′` (in `X`) when possible; the decomposition is unique.
pub fn normalize_class(q: &ChargeMatrix, c: &DiskClass) -> Option<(usize, Vec<i64>)> {
    let total: Vec<i64> =
        c.k.iter()
            .zip(q.class_vector(&c.alpha))
            .map(|(k, s)| k + s)
            .collect();
    (0..total.len()).find_map(|j| {
        let mut rest = total.clone();
        rest[j] -= 1;
        q.decompose(&rest).map(|alpha| (j, alpha))
    })
}

/// Open invariant `n_β` in the given chamber.
pub fn chamber_invariant(
    fan: &CyFan,
    q: &ChargeMatrix,
    chamber: ChamberLabel,
    c: &DiskClass,
    source: &dyn DeltaSource,
) -> Result<Rational, DiskError> {
    c.check(fan, q)?;
    if maslov_index(c) != 2 {
        return Ok(Rational::zero());
    }
    let one = Ok(Rational::one());
    let zero = Ok(Rational::zero());
    let total: Vec<i64> =
        c.k.iter()
            .zip(q.class_vector(&c.alpha))
            .map(|(k, s)| k + s)
            .collect();
    if c.kprime.iter().any(|&x| x != 0) {
        let is_basic_prime =
            total.iter().all(|&x| x == 0) && c.kprime.iter().filter(|&&x| x == 1).count() == 1;
        return if is_basic_prime { one } else { zero };
    }
    let Some((j, alpha)) = normalize_class(q, c) else {
        return zero;
    };
    let basic = alpha.iter().all(|&a| a == 0);
    match chamber {
        ChamberLabel::BMinus => {
            if basic && j == fan.cy().base()[0] {
                one
            } else {
                zero
            }
        }
        ChamberLabel::BPlus => {
            if basic {
                return one;
            }
            if alpha.iter().any(|&a| a < 0)
                || !crate::toric_cy::compact_divisors(fan.valid()).contains(&j)
            {
                return zero;
            }
            let alpha: Vec<u32> = alpha.iter().map(|&a| a as u32).collect();
            source
                .open_invariant(j, &alpha)
                .ok_or(DiskError::MissingInvariantData { divisor: j, alpha })
        }
    }
}

/// Monomial in `z_0, …, z_{n-1}` and the area atoms `C_i`, `C′_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AreaMonomial {
    pub z: Vec<i64>,
    pub c: Vec<i64>,
    pub cprime: Vec<i64>,
}

/// Laurent polynomial in `z` and the symbolic area constants, with power-series
/// coefficients in the Kähler parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AreaLaurent {
    n: usize,
    m: usize,
    nvars: usize,
    cutoff: u32,
    terms: BTreeMap<AreaMonomial, MultiSeries>,
}

impl AreaLaurent {
    pub fn zero(n: usize, m: usize, nvars: usize, cutoff: u32) -> Self {
        AreaLaurent {
            n,
            m,
            nvars,
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(n: usize, m: usize, mono: AreaMonomial, coeff: MultiSeries) -> Self {
        let mut p = Self::zero(n, m, coeff.nvars(), coeff.cutoff());
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        p
    }

    fn unit_monomial(&self) -> AreaMonomial {
        AreaMonomial {
            z: vec![0; self.n],
            c: vec![0; self.m],
            cprime: vec![0; self.n - 1],
        }
    }

    /// `C_i` (ray index) as a polynomial.
    pub fn area(n: usize, m: usize, nvars: usize, cutoff: u32, i: usize) -> Self {
        let mut p = Self::zero(n, m, nvars, cutoff);
        let mut mono = p.unit_monomial();
        mono.c[i] = 1;
        p.terms.insert(mono, MultiSeries::one(nvars, cutoff));
        p
    }

    /// `C′_k`, `k ≥ 1`.
    pub fn area_prime(n: usize, m: usize, nvars: usize, cutoff: u32, k: usize) -> Self {
        let mut p = Self::zero(n, m, nvars, cutoff);
        let mut mono = p.unit_monomial();
        mono.cprime[k - 1] = 1;
        p.terms.insert(mono, MultiSeries::one(nvars, cutoff));
        p
    }

    /// `z^e` with `e` indexed from `z_0`.
    pub fn z_power(n: usize, m: usize, nvars: usize, cutoff: u32, e: &[i64]) -> Self {
        let mut p = Self::zero(n, m, nvars, cutoff);
        let mut mono = p.unit_monomial();
        mono.z = e.to_vec();
        p.terms.insert(mono, MultiSeries::one(nvars, cutoff));
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AreaMonomial, &MultiSeries)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &AreaLaurent) -> Result<AreaLaurent, DiskError> {
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            let sum = match out.terms.get(mono) {
                Some(a) => a.add(c)?,
                None => c.clone(),
            };
            if sum.is_zero() {
                out.terms.remove(mono);
            } else {
                out.terms.insert(mono.clone(), sum);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &AreaLaurent) -> Result<AreaLaurent, DiskError> {
        let mut out = Self::zero(self.n, self.m, self.nvars, self.cutoff);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let add = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(a, b)| a + b).collect();
                let mono = AreaMonomial {
                    z: add(&ma.z, &mb.z),
                    c: add(&ma.c, &mb.c),
                    cprime: add(&ma.cprime, &mb.cprime),
                };
                out = out.add(&Self::term(self.n, self.m, mono, ca.mul(cb)?))?;
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        self.render(false)
    }

    pub fn to_latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        let style = Style::new(latex, self.nvars);
        let pieces: Vec<Piece> = self
            .terms
            .iter()
            .map(|(mono, coeff)| {
                let mut factors = Factors::default();
                for (i, &e) in mono.c.iter().enumerate() {
                    factors.push_lead(&style.atom("C", i), e, latex);
                }
                for (k, &e) in mono.cprime.iter().enumerate() {
                    factors.push_lead(&style.atom("C'", k + 1), e, latex);
                }
                for (j, &e) in mono.z.iter().enumerate() {
                    factors.push(&style.atom("z", j), e, latex);
                }
                render_term(coeff, &style, &factors)
            })
            .collect();
        join_pieces(&pieces)
    }
}

/// `z̃_i` and the gluing data `u`, `v` of one chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierCoordinates {
    pub chamber: ChamberLabel,
    pub z_tilde: Vec<AreaLaurent>,
    pub u: AreaLaurent,
    pub v: AreaLaurent,
    /// `g(z) = Σ_i C_i(1+δ_i) z^{⟨ν,v_i⟩}`.
    pub g: AreaLaurent,
}

impl FourierCoordinates {
    /// Whether `u·v = g` holds identically.
    pub fn gluing_holds(&self) -> Result<bool, DiskError> {
        Ok(self.u.mul(&self.v)? == self.g)
    }
}

fn check_corrections(fan: &CyFan, corr: &Corrections) -> Result<(), DiskError> {
    check_len("corrections", fan.num_rays(), corr.num_rays())
}

/// `g(z)` as a polynomial in the area atoms.
pub fn area_polynomial(fan: &CyFan, corr: &Corrections) -> Result<AreaLaurent, DiskError> {
    check_corrections(fan, corr)?;
    let n = fan.rank();
    let m = fan.num_rays();
    let mut g = AreaLaurent::zero(n, m, corr.nvars(), corr.cutoff());
    for i in 0..m {
        let mut z = vec![0i64; n];
        z[1..].copy_from_slice(&fan.projection(i));
        let mut c = vec![0i64; m];
        c[i] = 1;
        let mono = AreaMonomial {
            z,
            c,
            cprime: vec![0; n - 1],
        };
        g = g.add(&AreaLaurent::term(n, m, mono, corr.factor(i)))?;
    }
    Ok(g)
}

/// `z̃_i = C′_i z_i` for `i ≥ 1`; `z̃_0 = C_0 z_0` on `B₋` and `z_0 g(z)` on `B₊`.
pub fn fourier_coordinates(
    fan: &CyFan,
    corr: &Corrections,
    chamber: ChamberLabel,
) -> Result<FourierCoordinates, DiskError> {
    let g = area_polynomial(fan, corr)?;
    let n = fan.rank();
    let m = fan.num_rays();
    let (nv, t) = (corr.nvars(), corr.cutoff());
    let unit = |j: usize, e: i64| {
        let mut v = vec![0i64; n];
        v[j] = e;
        AreaLaurent::z_power(n, m, nv, t, &v)
    };
    let c0 = fan.cy().base()[0];
    let (z0, u, v) = match chamber {
        ChamberLabel::BMinus => {
            let a = AreaLaurent::area(n, m, nv, t, c0);
            let mut inv = AreaLaurent::zero(n, m, nv, t);
            let mut mono = inv.unit_monomial();
            mono.c[c0] = -1;
            mono.z[0] = -1;
            inv.terms.insert(mono, MultiSeries::one(nv, t));
            let z0 = a.mul(&unit(0, 1))?;
            (z0.clone(), z0, inv.mul(&g)?)
        }
        ChamberLabel::BPlus => {
            let z0 = unit(0, 1).mul(&g)?;
            (z0.clone(), z0, unit(0, -1))
        }
    };
    let mut z_tilde = vec![z0];
    for i in 1..n {
        z_tilde.push(AreaLaurent::area_prime(n, m, nv, t, i).mul(&unit(i, 1))?);
    }
    Ok(FourierCoordinates {
        chamber,
        z_tilde,
        u,
        v,
        g,
    })
}

/// `W = z̃_0`.
pub fn superpotential(
    fan: &CyFan,
    corr: &Corrections,
    chamber: ChamberLabel,
) -> Result<AreaLaurent, DiskError> {
    Ok(fourier_coordinates(fan, corr, chamber)?
        .z_tilde
        .swap_remove(0))
}

/// `W′ = Σ_{i=0}^{n-1} z̃_i`, the superpotential of the modified space.
pub fn superpotential_prime(
    fan: &CyFan,
    corr: &Corrections,
    chamber: ChamberLabel,
) -> Result<AreaLaurent, DiskError> {
    let fc = fourier_coordinates(fan, corr, chamber)?;
    let mut w = AreaLaurent::zero(fan.rank(), fan.num_rays(), corr.nvars(), corr.cutoff());
    for z in &fc.z_tilde {
        w = w.add(z)?;
    }
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    /// `uv = Σ C_i(1+δ_i) z^{v_i}`.
    CForm,
    /// Area constants absorbed into `u`, `z_j` and the Kähler parameters.
    Flat,
}

/// One summand `(area or q-monomial)·(1+δ_i)·z^e` of the mirror equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorTerm {
    pub ray: usize,
    pub exponent: Vec<i64>,
    /// Exponents of the atoms `C_0, …, C_{m-1}`.
    pub area: Vec<i64>,
    /// Flat form: the same monomial in the Kähler parameters. Zero in C-form.
    pub q_power: Vec<i64>,
    /// `1 + δ_i`.
    pub correction: MultiSeries,
}

impl MirrorTerm {
    /// `q^{q_power}(1+δ_i)`; `None` if the q-power has a negative entry.
    pub fn coefficient(&self) -> Option<MultiSeries> {
        if self.q_power.iter().any(|&e| e < 0) {
            return None;
        }
        let m = Monomial::new(self.q_power.iter().map(|&e| e as u32).collect());
        Some(self.correction.mul_monomial(&m, &Rational::one()))
    }
}

/// `uv = G(z_1, …, z_{n-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorPolynomial {
    pub form: Form,
    pub base_cone: usize,
    pub terms: Vec<MirrorTerm>,
}

impl MirrorPolynomial {
    pub fn num_z(&self) -> usize {
        self.terms.first().map_or(0, |t| t.exponent.len())
    }

    pub fn term_for_ray(&self, ray: usize) -> Option<&MirrorTerm> {
        self.terms.iter().find(|t| t.ray == ray)
    }

    /// Right-hand side `G` as text.
    pub fn rhs_text(&self) -> String {
        self.render(false)
    }

    pub fn to_text(&self) -> String {
        format!("uv = {}", self.rhs_text())
    }

    pub fn to_latex(&self) -> String {
        format!("uv = {}", self.render(true))
    }

    fn render(&self, latex: bool) -> String {
        let nz = self.num_z();
        let nvars = self.terms.first().map_or(0, |t| t.q_power.len());
        let style = Style::new(latex, nvars);
        let znames = if latex {
            latex_names("z", nz)
        } else {
            default_names("z", nz)
        };
        let pieces: Vec<Piece> = self
            .terms
            .iter()
            .map(|t| {
                let mut factors = Factors::default();
                let mut coeff = t.correction.clone();
                match self.form {
                    Form::CForm => {
                        for (i, &e) in t.area.iter().enumerate() {
                            factors.push_lead(&style.atom("C", i), e, latex);
                        }
                    }
                    Form::Flat => match t.coefficient() {
                        Some(c) => coeff = c,
                        None => {
                            for (a, &e) in t.q_power.iter().enumerate() {
                                factors.push(&style.qnames[a], e, latex);
                            }
                        }
                    },
                }
                for (name, &e) in znames.iter().zip(&t.exponent) {
                    factors.push(name, e, latex);
                }
                render_term(&coeff, &style, &factors)
            })
            .collect();
        join_pieces(&pieces)
    }
}

/// Area exponent of ray `i` once `u` and the `z_j` absorb the base-cone constants:
/// `e_i − Σ_j ⟨ν_j, v_i⟩ e_{b_j}`.
pub fn flat_area(fan: &CyFan, i: usize) -> Vec<i64> {
    let mut area = vec![0i64; fan.num_rays()];
    area[i] += 1;
    for (j, &b) in fan.cy().base().iter().enumerate() {
        area[b] -= fan.pairing(j, i);
    }
    area
}

/// Canonical term order: base rays `v_0, …, v_{n-1}`, then the rest in fan order.
fn term_order(fan: &CyFan) -> Vec<usize> {
    fan.cy()
        .base()
        .iter()
        .copied()
        .chain(fan.others())
        .collect()
}

pub fn mirror_equation(
    fan: &CyFan,
    q: &ChargeMatrix,
    corr: &Corrections,
    form: Form,
) -> Result<MirrorPolynomial, DiskError> {
    check_corrections(fan, corr)?;
    if q.base() != fan.cy().base() {
        return Err(DiskError::ChartMismatch(format!(
            "charge matrix built on base {:?}, fan uses {:?}",
            q.base(),
            fan.cy().base()
        )));
    }
    let m = fan.num_rays();
    let terms = term_order(fan)
        .into_iter()
        .map(|i| {
            let (area, q_power) = match form {
                Form::CForm => {
                    let mut e = vec![0i64; m];
                    e[i] = 1;
                    (e, vec![0; q.l()])
                }
                Form::Flat => {
                    let area = flat_area(fan, i);
                    let alpha = q
                        .decompose(&area)
                        .expect("flat areas are charge combinations");
                    (area, alpha)
                }
            };
            MirrorTerm {
                ray: i,
                exponent: fan.projection(i),
                area,
                q_power,
                correction: corr.factor(i),
            }
        })
        .collect();
    Ok(MirrorPolynomial {
        form,
        base_cone: fan.cy().base_cone(),
        terms,
    })
}

/// `z_k = Π_j ζ_j^{a_{jk}}`, `u = ũ (Π_p ζ_p^{a_{p0}})^{-1}`, followed in flat form by
/// the rescalings `ũ ↦ C^{u_shift} ũ`, `ζ_p ↦ C^{z_shift[p]} ζ_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialTransform {
    pub matrix: Vec<Vec<i64>>,
    pub u_shift: Vec<i64>,
    pub z_shift: Vec<Vec<i64>>,
}

impl MonomialTransform {
    /// Image `A e + a_{·0}` of a chart-a exponent.
    pub fn apply_exponent(&self, e: &[i64]) -> Vec<i64> {
        let n = self.matrix.len();
        (1..n)
            .map(|j| self.matrix[j][0] + (1..n).map(|k| self.matrix[j][k] * e[k - 1]).sum::<i64>())
            .collect()
    }

    /// Determinant of the block `(a_{jk})_{j,k≥1}`.
    pub fn z_block_det(&self) -> i64 {
        let n = self.matrix.len();
        let block: Vec<Vec<i64>> = (1..n).map(|j| self.matrix[j][1..].to_vec()).collect();
        if block.is_empty() {
            1
        } else {
            matrix_det(&block)
        }
    }

    pub fn is_identity(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|j| (0..n).all(|k| self.matrix[j][k] == i64::from(j == k)))
            && self.u_shift.iter().all(|&x| x == 0)
            && self.z_shift.iter().flatten().all(|&x| x == 0)
    }
}

/// Rewrites a mirror polynomial built on `cone_a` in the chart of `cone_b`.
/// Correction series are carried over unchanged.
pub fn cone_change_mirror(
    fan: &CyFan,
    cone_a: usize,
    cone_b: usize,
    mp: &MirrorPolynomial,
) -> Result<(MirrorPolynomial, MonomialTransform), DiskError> {
    let cones = fan.fan().max_cones();
    for c in [cone_a, cone_b] {
        if c >= cones.len() {
            return Err(FanError::NotACone(vec![c]).into());
        }
    }
    if mp.base_cone != cone_a {
        return Err(DiskError::ChartMismatch(format!(
            "polynomial is written on cone {}, not {cone_a}",
            mp.base_cone
        )));
    }
    let matrix = cone_change_matrix(fan, &cones[cone_a], &cones[cone_b])?;
    let fa = fan.with_base(cone_a)?;
    let fb = fan.with_base(cone_b)?;
    let m = fan.num_rays();
    let n = fan.rank();
    let mut transform = MonomialTransform {
        matrix,
        u_shift: vec![0; m],
        z_shift: vec![vec![0; m]; n - 1],
    };
    if mp.form == Form::Flat {
        let shift = |i: usize| -> Vec<i64> {
            flat_area(&fb, i)
                .iter()
                .zip(flat_area(&fa, i))
                .map(|(b, a)| b - a)
                .collect()
        };
        let b = fb.cy().base();
        transform.u_shift = shift(b[0]);
        for p in 1..n {
            transform.z_shift[p - 1] = shift(b[p])
                .iter()
                .zip(&transform.u_shift)
                .map(|(x, y)| x - y)
                .collect();
        }
    }
    let qb = charge_matrix(&fb);
    let mut terms = Vec::with_capacity(mp.terms.len());
    for t in &mp.terms {
        let exponent = transform.apply_exponent(&t.exponent);
        let mut area = t.area.clone();
        for r in 0..m {
            area[r] += transform.u_shift[r];
            for (p, e) in exponent.iter().enumerate() {
                area[r] += e * transform.z_shift[p][r];
            }
        }
        let q_power = match mp.form {
            Form::CForm => t.q_power.clone(),
            Form::Flat => qb.decompose(&area).ok_or_else(|| {
                DiskError::ChartMismatch(format!("term of ray {} leaves the charge lattice", t.ray))
            })?,
        };
        terms.push(MirrorTerm {
            ray: t.ray,
            exponent,
            area,
            q_power,
            correction: t.correction.clone(),
        });
    }
    let order = term_order(&fb);
    terms.sort_by_key(|t| order.iter().position(|&r| r == t.ray));
    Ok((
        MirrorPolynomial {
            form: mp.form,
            base_cone: cone_b,
            terms,
        },
        transform,
    ))
}

struct Style {
    latex: bool,
    qnames: Vec<String>,
}

impl Style {
    fn new(latex: bool, nvars: usize) -> Self {
        let qnames = if latex {
            latex_names("q", nvars)
        } else {
            default_names("q", nvars)
        };
        Style { latex, qnames }
    }

    fn atom(&self, prefix: &str, i: usize) -> String {
        if self.latex {
            format!("{prefix}_{{{i}}}")
        } else {
            format!("{prefix}{i}")
        }
    }
}

/// Numerator and denominator factors of one term; `lead` factors are written
/// before a parenthesized series coefficient, `num` after it.
#[derive(Default)]
struct Factors {
    lead: Vec<String>,
    num: Vec<String>,
    den: Vec<String>,
}

impl Factors {
    fn push_lead(&mut self, name: &str, e: i64, latex: bool) {
        let before = self.num.len();
        self.push(name, e, latex);
        self.lead.extend(self.num.drain(before..));
    }

    fn push(&mut self, name: &str, e: i64, latex: bool) {
        let power = |e: i64| match (e, latex) {
            (1, _) => name.to_string(),
            (_, true) => format!("{name}^{{{e}}}"),
            (_, false) => format!("{name}^{e}"),
        };
        match e.signum() {
            1 => self.num.push(power(e)),
            -1 => self.den.push(power(-e)),
            _ => {}
        }
    }
}

struct Piece {
    negative: bool,
    body: String,
}

fn join_pieces(pieces: &[Piece]) -> String {
    if pieces.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, p) in pieces.iter().enumerate() {
        match (i, p.negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&p.body);
    }
    out
}

fn fraction(num: String, den: &[String], latex: bool) -> String {
    let num = if num.is_empty() { "1".to_string() } else { num };
    if den.is_empty() {
        num
    } else if latex {
        format!("\\frac{{{num}}}{{{}}}", den.concat())
    } else if den.len() == 1 {
        format!("{num}/{}", den[0])
    } else {
        format!("{num}/({})", den.concat())
    }
}

fn render_term(coeff: &MultiSeries, style: &Style, factors: &Factors) -> Piece {
    let latex = style.latex;
    let mono = |m: &Monomial| {
        if latex {
            latex_monomial(m.exponents(), &style.qnames)
        } else {
            let mut s = String::new();
            write_monomial(&mut s, m.exponents(), &style.qnames);
            s
        }
    };
    let lead = factors.lead.concat();
    let tail = factors.num.concat();
    if coeff.len() == 1 {
        let (m, c) = coeff.terms().next().expect("one term");
        let a = c.abs();
        let qm = mono(m);
        let mut num = String::new();
        let bare = qm.is_empty() && lead.is_empty() && tail.is_empty();
        if !a.is_one() || (bare && factors.den.is_empty()) {
            num.push_str(&match (latex, a.is_integer(), bare) {
                (true, _, _) => latex_rational(&a),
                (false, true, _) | (false, false, true) => a.to_string(),
                (false, false, false) => format!("({a})"),
            });
        }
        num.push_str(&qm);
        num.push_str(&lead);
        num.push_str(&tail);
        return Piece {
            negative: c.is_negative(),
            body: fraction(num, &factors.den, latex),
        };
    }
    let series = if latex {
        coeff.to_latex(&style.qnames)
    } else {
        coeff.display_with(&style.qnames).to_string()
    };
    if lead.is_empty() && tail.is_empty() && factors.den.is_empty() {
        return match series.strip_prefix('-') {
            Some(s) => Piece {
                negative: true,
                body: s.to_string(),
            },
            None => Piece {
                negative: false,
                body: series,
            },
        };
    }
    let (open, close) = if latex {
        ("\\left(", "\\right)")
    } else {
        ("(", ")")
    };
    let num = format!("{lead}{open}{series}{close}{tail}");
    Piece {
        negative: false,
        body: fraction(num, &factors.den, latex),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_coords::{corrections, inverse_mirror_map};
    use crate::periods::single_log_periods;
    use crate::toric_cy::{validate_fan, Fan};
    use syz_series::rational::int;

    fn setup(
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
        t: u32,
    ) -> (CyFan, ChargeMatrix, Corrections) {
        let n = rays[0].len();
        let fan = validate_fan(&Fan::new(n, rays, cones)).unwrap();
        let q = charge_matrix(&fan);
        let inv = inverse_mirror_map(&single_log_periods(&q, t)).unwrap();
        let corr = corrections(&fan, &q, &inv).unwrap();
        (fan, q, corr)
    }

    fn kp1() -> (CyFan, ChargeMatrix, Corrections) {
        setup(
            vec![vec![0, 1], vec![1, 1], vec![-1, 1]],
            vec![vec![0, 1], vec![0, 2]],
            6,
        )
    }

    fn kp2() -> (CyFan, ChargeMatrix, Corrections) {
        setup(
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]],
            vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1]],
            4,
        )
    }

    fn conifold() -> (CyFan, ChargeMatrix, Corrections) {
        setup(
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, -1, 1]],
            vec![vec![0, 1, 2], vec![0, 1, 3]],
            4,
        )
    }

    #[test]
    fn boundaries() {
        let (fan, q, _) = kp1();
        let b1 = DiskClass::basic(3, 2, 1, 1);
        assert_eq!(boundary_class(&fan, &q, &b1).unwrap().coords, vec![1, 1]);
        let b0 = DiskClass::basic(3, 2, 1, 0);
        assert_eq!(boundary_class(&fan, &q, &b0).unwrap().coords, vec![1, 0]);
        let bp = DiskClass::basic_prime(3, 2, 1, 1);
        assert_eq!(boundary_class(&fan, &q, &bp).unwrap().coords, vec![0, 1]);
        let sphere = DiskClass::zero(3, 2, 1).with_sphere(&[3]);
        assert_eq!(
            boundary_class(&fan, &q, &sphere).unwrap().coords,
            vec![0, 0]
        );
    }

    #[test]
    fn maslov_and_intersections() {
        let (fan, q, _) = kp2();
        let b0 = DiskClass::basic(4, 3, 1, 0);
        assert_eq!(maslov_index(&b0), 2);
        assert_eq!(maslov_index(&b0.add(&DiskClass::basic(4, 3, 1, 1))), 4);
        assert_eq!(maslov_index(&b0.clone().with_sphere(&[5])), 2);
        let b2 = DiskClass::basic(4, 3, 1, 2);
        assert_eq!(
            intersection_number(&fan, &q, &b2, Divisor::Toric(2)).unwrap(),
            1
        );
        assert_eq!(
            intersection_number(&fan, &q, &b0, Divisor::Boundary).unwrap(),
            1
        );
        let bp = DiskClass::basic_prime(4, 3, 1, 1);
        assert_eq!(
            intersection_number(&fan, &q, &bp, Divisor::Boundary).unwrap(),
            0
        );
        assert_eq!(
            intersection_number(&fan, &q, &bp, Divisor::Modified(1)).unwrap(),
            1
        );
        let line = DiskClass::zero(4, 3, 1).with_sphere(&[1]);
        assert_eq!(
            intersection_number(&fan, &q, &line, Divisor::Toric(0)).unwrap(),
            -3
        );
        assert!(matches!(
            intersection_number(&fan, &q, &b0, Divisor::Modified(3)),
            Err(DiskError::UnknownDivisor(_))
        ));
    }

    #[test]
    fn chamber_values() {
        let (fan, q, corr) = kp2();
        let b = |i| DiskClass::basic(4, 3, 1, i);
        let inv = |ch, c: &DiskClass| chamber_invariant(&fan, &q, ch, c, &corr).unwrap();
        assert_eq!(inv(ChamberLabel::BMinus, &b(1)), int(0));
        assert_eq!(inv(ChamberLabel::BMinus, &b(0)), int(1));
        assert_eq!(inv(ChamberLabel::BPlus, &b(2)), int(1));
        assert_eq!(inv(ChamberLabel::BPlus, &b(0).with_sphere(&[2])), int(5));
        assert_eq!(inv(ChamberLabel::BPlus, &b(0).with_sphere(&[1])), int(-2));
        assert_eq!(inv(ChamberLabel::BPlus, &b(1).with_sphere(&[1])), int(0));
        assert_eq!(inv(ChamberLabel::BPlus, &b(0).add(&b(1))), int(0));
        // β_0 + S written in the β basis alone
        let shifted = DiskClass {
            k: vec![-2, 1, 1, 1],
            kprime: vec![0, 0],
            alpha: vec![0],
        };
        assert_eq!(inv(ChamberLabel::BPlus, &shifted), int(-2));
        assert!(matches!(
            chamber_invariant(
                &fan,
                &q,
                ChamberLabel::BPlus,
                &b(0).with_sphere(&[9]),
                &corr
            ),
            Err(DiskError::MissingInvariantData { divisor: 0, .. })
        ));
    }

    #[test]
    fn fourier_and_gluing() {
        let (fan, q, corr) = conifold();
        let _ = q;
        for ch in [ChamberLabel::BMinus, ChamberLabel::BPlus] {
            let fc = fourier_coordinates(&fan, &corr, ch).unwrap();
            assert!(fc.gluing_holds().unwrap());
            assert_eq!(fc.z_tilde[1].to_text(), "C'1z1");
        }
        assert_eq!(
            superpotential(&fan, &corr, ChamberLabel::BMinus)
                .unwrap()
                .to_text(),
            "C0z0"
        );
        let w = superpotential(&fan, &corr, ChamberLabel::BPlus).unwrap();
        let mut names: Vec<String> = w.to_text().split(" + ").map(str::to_string).collect();
        names.sort();
        assert_eq!(names, ["C0z0", "C1z0z1", "C2z0z2", "C3z0z1/z2"]);
        let wp = superpotential_prime(&fan, &corr, ChamberLabel::BMinus).unwrap();
        assert_eq!(wp.len(), 3);
    }

    #[test]
    fn flat_equations() {
        let (fan, q, corr) = kp1();
        let flat = mirror_equation(&fan, &q, &corr, Form::Flat).unwrap();
        assert_eq!(flat.to_text(), "uv = 1 + q + z + q/z");
        assert_eq!(flat.to_latex(), "uv = 1 + q + z + \\frac{q}{z}");
        let (fan, q, corr) = conifold();
        assert_eq!(
            mirror_equation(&fan, &q, &corr, Form::Flat)
                .unwrap()
                .to_text(),
            "uv = 1 + z1 + z2 + qz1/z2"
        );
        assert_eq!(
            mirror_equation(&fan, &q, &corr, Form::CForm)
                .unwrap()
                .to_text(),
            "uv = C0 + C1z1 + C2z2 + C3z1/z2"
        );
        let (fan, q, corr) = kp2();
        assert_eq!(
            mirror_equation(&fan, &q, &corr, Form::Flat)
                .unwrap()
                .to_text(),
            "uv = 1 - 2q + 5q^2 - 32q^3 + 286q^4 + z1 + z2 + q/(z1z2)"
        );
        assert_eq!(
            mirror_equation(&fan, &q, &corr, Form::CForm)
                .unwrap()
                .to_text(),
            "uv = C0(1 - 2q + 5q^2 - 32q^3 + 286q^4) + C1z1 + C2z2 + C3/(z1z2)"
        );
    }

    #[test]
    fn kp1_cone_change_swaps_terms() {
        let (fan, q, corr) = kp1();
        let flat = mirror_equation(&fan, &q, &corr, Form::Flat).unwrap();
        let (moved, tr) = cone_change_mirror(&fan, 0, 1, &flat).unwrap();
        assert_eq!(tr.z_block_det().abs(), 1);
        let fb = fan.with_base(1).unwrap();
        let direct = mirror_equation(&fb, &charge_matrix(&fb), &corr, Form::Flat).unwrap();
        assert_eq!(moved, direct);
        assert_eq!(moved.to_text(), "uv = 1 + q + z + q/z");
        assert_eq!(moved.term_for_ray(1).unwrap().exponent, vec![-1]);
        let (back, _) = cone_change_mirror(&fan, 1, 0, &moved).unwrap();
        assert_eq!(back, flat);
        let (same, id) = cone_change_mirror(&fan, 0, 0, &flat).unwrap();
        assert!(id.is_identity());
        assert_eq!(same, flat);
    }
}
