//! Composition of series and inversion of maps tangent to the identity.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::series::MultiSeries;
use crate::transcendental::{exp, log1p};
use crate::SeriesError;

/// Formal composition `s(args_1, …, args_l)`, truncated at the common cutoff.
///
/// Every argument must have zero constant term so that the result is a
/// well-defined truncated series.
pub fn substitute(s: &MultiSeries, args: &[MultiSeries]) -> Result<MultiSeries, SeriesError> {
    if args.len() != s.nvars() {
        return Err(SeriesError::ArityMismatch {
            expected: s.nvars(),
            got: args.len(),
        });
    }
    let Some(first) = args.first() else {
        // zero variables: s is a constant
        return Ok(s.clone());
    };
    for a in args {
        first.check_compatible(a)?;
        if a.cutoff() != s.cutoff() {
            return Err(SeriesError::CutoffMismatch {
                left: s.cutoff(),
                right: a.cutoff(),
            });
        }
        if !a.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
    }
    let nvars = first.nvars();
    let cutoff = s.cutoff();

    // powers[a][k] = args[a]^k, built lazily up to the largest exponent used
    let mut max_exp = vec![0u32; s.nvars()];
    for (m, _) in s.terms() {
        for (slot, &e) in max_exp.iter_mut().zip(m.exponents()) {
            *slot = (*slot).max(e);
        }
    }
    let powers: Vec<Vec<MultiSeries>> = args
        .iter()
        .zip(&max_exp)
        .map(|(a, &top)| {
            let mut v = vec![MultiSeries::one(nvars, cutoff)];
            for k in 1..=top as usize {
                let next = v[k - 1].mul_unchecked(a);
                v.push(next);
            }
            v
        })
        .collect();

    // share partial products between monomials with a common prefix
    let mut prefix_cache: BTreeMap<Vec<u32>, MultiSeries> = BTreeMap::new();
    let mut out = MultiSeries::zero(nvars, cutoff);
    for (m, c) in s.terms() {
        let e = m.exponents();
        let product = product_for(e, &powers, &mut prefix_cache, nvars, cutoff);
        out = out.add_unchecked(&product.scale(c));
    }
    Ok(out)
}

fn product_for(
    e: &[u32],
    powers: &[Vec<MultiSeries>],
    cache: &mut BTreeMap<Vec<u32>, MultiSeries>,
    nvars: usize,
    cutoff: u32,
) -> MultiSeries {
    if e.is_empty() {
        return MultiSeries::one(nvars, cutoff);
    }
    if let Some(p) = cache.get(e) {
        return p.clone();
    }
    let k = e.len() - 1;
    let head = product_for(&e[..k], powers, cache, nvars, cutoff);
    let p = if e[k] == 0 {
        head
    } else {
        head.mul_unchecked(&powers[k][e[k] as usize])
    };
    cache.insert(e.to_vec(), p.clone());
    p
}

/// Applies the map `x_a ↦ x_a · factor_a(x)` to the coordinate arguments.
fn scaled_coordinates(factors: &[MultiSeries]) -> Vec<MultiSeries> {
    factors
        .iter()
        .enumerate()
        .map(|(a, f)| {
            let mut m = vec![0u32; f.nvars()];
            m[a] = 1;
            f.mul_monomial(&m.into(), &num_traits::One::one())
        })
        .collect()
}

fn check_tuple(fs: &[MultiSeries]) -> Result<(), SeriesError> {
    for f in fs {
        if f.nvars() != fs.len() {
            return Err(SeriesError::ArityMismatch {
                expected: fs.len(),
                got: f.nvars(),
            });
        }
        fs[0].check_compatible(f)?;
    }
    Ok(())
}

/// Inverts a map of the form `y_a = x_a · exp(f_a(x))` with `f_a(0) = 0`.
///
/// Returns `g` with `x_a = y_a · exp(g_a(y))`. The fixed point
/// `g = -f(y · exp(g))` is reached degree by degree: after iteration `k`
/// every coefficient of degree `<= k` is final.
pub fn invert_map(f: &[MultiSeries]) -> Result<Vec<MultiSeries>, SeriesError> {
    if f.is_empty() {
        return Ok(Vec::new());
    }
    check_tuple(f)?;
    if f.iter().any(|fa| !fa.constant_term().is_zero()) {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    let nvars = f.len();
    let cutoff = f[0].cutoff();
    let mut g = vec![MultiSeries::zero(nvars, cutoff); nvars];
    for _ in 0..=cutoff {
        let factors = g.iter().map(exp).collect::<Result<Vec<_>, _>>()?;
        let args = scaled_coordinates(&factors);
        let next = f
            .iter()
            .map(|fa| substitute(fa, &args).map(|s| s.neg()))
            .collect::<Result<Vec<_>, _>>()?;
        if next == g {
            break;
        }
        g = next;
    }
    Ok(g)
}

/// Inverse of a map given by exp-factors: `y_a = x_a · F_a(x)` with
/// `F_a(0) = 1`. Returns the factors `G_a` with `x_a = y_a · G_a(y)`.
pub fn invert_factor_map(factors: &[MultiSeries]) -> Result<Vec<MultiSeries>, SeriesError> {
    let logs = factors
        .iter()
        .map(|fa| {
            if !num_traits::One::is_one(&fa.constant_term()) {
                return Err(SeriesError::NonUnitConstantTerm);
            }
            log1p(&fa.without_constant())
        })
        .collect::<Result<Vec<_>, _>>()?;
    invert_map(&logs)?.iter().map(exp).collect()
}

/// Composes two maps given by exp-factors.
///
/// With `inner: x ↦ x · I(x)` and `outer: y ↦ y · O(y)`, returns the
/// factors of `outer ∘ inner`, namely `I(x) · O(x · I(x))`.
pub fn compose_factor_maps(
    outer: &[MultiSeries],
    inner: &[MultiSeries],
) -> Result<Vec<MultiSeries>, SeriesError> {
    if outer.len() != inner.len() {
        return Err(SeriesError::ArityMismatch {
            expected: outer.len(),
            got: inner.len(),
        });
    }
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    check_tuple(outer)?;
    check_tuple(inner)?;
    outer[0].check_compatible(&inner[0])?;
    let args = scaled_coordinates(inner);
    outer
        .iter()
        .zip(inner)
        .map(|(o, i)| substitute(o, &args)?.mul(i))
        .collect()
}
