mod common;

use proptest::prelude::*;
use syz_core::disk_topology::{
    boundary_class, cone_change_mirror, fourier_coordinates, intersection_number, maslov_index,
    mirror_equation, pole_divisors, ChamberLabel, DiskClass, Form,
};
use syz_core::flat_coords::{inverse_mirror_map, Corrections};
use syz_core::lattice::dot;
use syz_core::periods::{mirror_map_series, single_log_periods};
use syz_core::toric_cy::{
    charge_matrix, compact_divisors, cone_change_matrix, matrix_det, modify_fan, validate_fan, Fan,
    FanError,
};
use syz_series::{compose_factor_maps, MultiSeries};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn charge_rows_sum_to_zero((raw, _) in common::arb_fan()) {
        let fan = validate_fan(&raw).unwrap();
        let q = charge_matrix(&fan);
        prop_assert_eq!(q.l(), fan.num_rays() - fan.rank());
        for (a, row) in q.rows().iter().enumerate() {
            prop_assert_eq!(row.iter().sum::<i64>(), 0);
            prop_assert_eq!(row[q.others()[a]], 1);
            for c in 0..fan.rank() {
                let s: i64 = row.iter().zip(raw.rays()).map(|(x, v)| x * v[c]).sum();
                prop_assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn covector_and_dual_basis((raw, _) in common::arb_fan()) {
        let fan = validate_fan(&raw).unwrap();
        for v in raw.rays() {
            prop_assert_eq!(dot(fan.cy().covector(), v), 1);
        }
        for (j, nu) in fan.cy().dual_basis().iter().enumerate() {
            for (k, &b) in fan.cy().base().iter().enumerate() {
                prop_assert_eq!(dot(nu, raw.ray(b)), i64::from(j == k));
            }
        }
    }

    #[test]
    fn compact_divisors_follow_relabelling(kind in 0..6usize, ops in prop::collection::vec((0..3usize, 0..3usize, any::<bool>()), 0..6), seed in any::<u64>()) {
        let base = common::bundled()[kind].1.clone();
        let m = base.num_rays();
        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..m).collect();
            p.rotate_left((seed % m as u64) as usize);
            p
        };
        let cones: Vec<usize> = (0..base.max_cones().len()).collect();
        let moved = common::transform(&base, &ops, &perm, &cones);
        let before = compact_divisors(validate_fan(&base).unwrap().valid());
        let after = compact_divisors(validate_fan(&moved).unwrap().valid());
        let mapped: std::collections::BTreeSet<usize> = before.iter().map(|&i| perm[i]).collect();
        prop_assert_eq!(mapped, after);
    }

    #[test]
    fn flat_coefficient_is_kahler_parameter((raw, _) in common::arb_fan()) {
        let fan = validate_fan(&raw).unwrap();
        let q = charge_matrix(&fan);
        let corr = Corrections::zero(fan.num_rays(), q.l(), 3);
        let flat = mirror_equation(&fan, &q, &corr, Form::Flat).unwrap();
        prop_assert_eq!(flat.terms.len(), fan.num_rays());
        for t in &flat.terms {
            prop_assert_eq!(&t.exponent, &fan.projection(t.ray));
            // every exponent vector comes from a ray at height one
            let total: i64 = (0..fan.rank()).map(|j| fan.pairing(j, t.ray)).sum();
            prop_assert_eq!(total, 1);
            match q.others().iter().position(|&o| o == t.ray) {
                Some(a) => {
                    let mut e = vec![0i64; q.l()];
                    e[a] = 1;
                    prop_assert_eq!(&t.q_power, &e);
                    prop_assert_eq!(&t.area, &q.row(a).to_vec());
                }
                None => {
                    prop_assert!(t.q_power.iter().all(|&x| x == 0));
                    prop_assert!(t.area.iter().all(|&x| x == 0));
                }
            }
        }
    }

    #[test]
    fn cone_change_invariance((raw, _) in common::arb_fan(), pick in any::<(u16, u16)>()) {
        let fan = validate_fan(&raw).unwrap();
        let cones = raw.max_cones().len();
        let (a, b) = (pick.0 as usize % cones, pick.1 as usize % cones);
        let fa = fan.with_base(a).unwrap();
        let fb = fan.with_base(b).unwrap();
        let qa = charge_matrix(&fa);
        let corr = Corrections::zero(fan.num_rays(), qa.l(), 3);
        let mat = cone_change_matrix(&fan, &raw.max_cones()[a], &raw.max_cones()[b]).unwrap();
        prop_assert_eq!(matrix_det(&mat).abs(), 1);
        for form in [Form::CForm, Form::Flat] {
            let pa = mirror_equation(&fa, &qa, &corr, form).unwrap();
            let (moved, tr) = cone_change_mirror(&fan, a, b, &pa).unwrap();
            prop_assert_eq!(tr.z_block_det().abs(), 1);
            let direct = mirror_equation(&fb, &charge_matrix(&fb), &corr, form).unwrap();
            prop_assert_eq!(&moved, &direct);
            let (back, _) = cone_change_mirror(&fan, b, a, &moved).unwrap();
            prop_assert_eq!(&back, &pa);
        }
    }

    #[test]
    fn gluing_in_both_chambers((raw, _) in common::arb_fan()) {
        let fan = validate_fan(&raw).unwrap();
        let q = charge_matrix(&fan);
        let corr = Corrections::zero(fan.num_rays(), q.l(), 2);
        for ch in [ChamberLabel::BMinus, ChamberLabel::BPlus] {
            let fc = fourier_coordinates(&fan, &corr, ch).unwrap();
            prop_assert!(fc.gluing_holds().unwrap());
            prop_assert_eq!(fc.z_tilde.len(), fan.rank());
        }
    }

    #[test]
    fn maslov_is_twice_pole_intersection(
        (raw, _) in common::arb_fan(),
        coeffs in prop::collection::vec(-3i64..4, 16),
    ) {
        let fan = validate_fan(&raw).unwrap();
        let q = charge_matrix(&fan);
        let (m, n, l) = (fan.num_rays(), fan.rank(), q.l());
        let mut it = coeffs.iter().cycle().copied();
        let c = DiskClass {
            k: it.by_ref().take(m).collect(),
            kprime: it.by_ref().take(n - 1).collect(),
            alpha: it.by_ref().take(l).collect(),
        };
        let total: i64 = pole_divisors(n)
            .into_iter()
            .map(|d| intersection_number(&fan, &q, &c, d).unwrap())
            .sum();
        prop_assert_eq!(maslov_index(&c), 2 * total);
    }

    #[test]
    fn boundary_is_linear((raw, _) in common::arb_fan(), coeffs in prop::collection::vec(-3i64..4, 32)) {
        let fan = validate_fan(&raw).unwrap();
        let q = charge_matrix(&fan);
        let (m, n, l) = (fan.num_rays(), fan.rank(), q.l());
        let mut it = coeffs.iter().cycle().copied();
        let mut class = || DiskClass {
            k: it.by_ref().take(m).collect(),
            kprime: it.by_ref().take(n - 1).collect(),
            alpha: it.by_ref().take(l).collect(),
        };
        let (x, y) = (class(), class());
        let bx = boundary_class(&fan, &q, &x).unwrap().coords;
        let by = boundary_class(&fan, &q, &y).unwrap().coords;
        let bsum = boundary_class(&fan, &q, &x.add(&y)).unwrap().coords;
        let expected: Vec<i64> = bx.iter().zip(&by).map(|(a, b)| a + b).collect();
        prop_assert_eq!(bsum, expected);
        for j in 0..m {
            let b = boundary_class(&fan, &q, &DiskClass::basic(m, n, l, j)).unwrap();
            prop_assert_eq!(b.coords[0], 1);
        }
    }
}

/// A boundary edge of the moment polytope that a deep cut by the `v'_j`
/// meets at a non-unimodular corner. Rank 3 only.
fn forced_singular_corner(raw: &Fan, base: &[usize]) -> Option<(usize, usize)> {
    if raw.rank() != 3 {
        return None;
    }
    let v = |i: usize| raw.ray(i).to_vec();
    let new_rays: Vec<Vec<i64>> = (1..3)
        .map(|j| (0..3).map(|c| v(base[j])[c] - v(base[0])[c]).collect())
        .collect();
    let det3 = |a: &[i64], b: &[i64], c: &[i64]| {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
    };
    for cone in raw.max_cones() {
        for skip in 0..3 {
            let face: Vec<usize> = (0..3).filter(|&k| k != skip).map(|k| cone[k]).collect();
            let shared = raw
                .max_cones()
                .iter()
                .filter(|c| face.iter().all(|r| c.contains(r)))
                .count();
            if shared != 1 {
                continue;
            }
            let (a, b) = (v(face[0]), v(face[1]));
            let mut d = vec![
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            if dot(&d, &v(cone[skip])) < 0 {
                d.iter_mut().for_each(|x| *x = -*x);
            }
            // for deep cuts the edge meets first the facet it crosses fastest
            let fastest = new_rays.iter().map(|r| -dot(r, &d)).max().unwrap();
            let cutters: Vec<&Vec<i64>> =
                new_rays.iter().filter(|r| -dot(r, &d) == fastest).collect();
            if fastest > 0 && cutters.iter().all(|r| det3(&a, &b, r).abs() != 1) {
                return Some((face[0], face[1]));
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modification_keeps_compact_divisors((raw, _) in common::arb_fan()) {
        let fan = validate_fan(&raw).unwrap();
        let obstruction = forced_singular_corner(&raw, fan.cy().base());
        match modify_fan(&fan) {
            Ok(modified) => {
                prop_assert!(obstruction.is_none());
                prop_assert_eq!(modified.fan().num_rays(), fan.num_rays() + fan.rank() - 1);
                let before = compact_divisors(fan.valid());
                let after = compact_divisors(modified.valid());
                prop_assert!(before.is_subset(&after));
            }
            Err(e) => {
                prop_assert!(matches!(e, FanError::ModificationNotSmooth(_)), "{}", e);
                prop_assert!(obstruction.is_some(), "{}", e);
            }
        }
    }
}

#[test]
fn modification_of_bundled_fans() {
    for (name, raw) in common::bundled() {
        let fan = validate_fan(&raw).unwrap();
        let modified = modify_fan(&fan).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(
            compact_divisors(fan.valid()).is_subset(&compact_divisors(modified.valid())),
            "{name}"
        );
    }
}

#[test]
fn strip_with_forced_singular_corner() {
    let raw = common::strip(3, 1, &[false, true, true, true]);
    let fan = validate_fan(&raw).unwrap();
    assert!(forced_singular_corner(&raw, fan.cy().base()).is_some());
    assert!(matches!(
        modify_fan(&fan),
        Err(FanError::ModificationNotSmooth(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn inverse_map_round_trip(q in common::single_negative_column(), cutoff in 1u32..=8) {
        let periods = single_log_periods(&q, cutoff);
        let forward = mirror_map_series(&periods).unwrap();
        let inverse = inverse_mirror_map(&periods).unwrap().components;
        let l = q.l();
        let one = vec![MultiSeries::one(l, cutoff); l];
        prop_assert_eq!(compose_factor_maps(&forward, &inverse).unwrap(), one.clone());
        prop_assert_eq!(compose_factor_maps(&inverse, &forward).unwrap(), one);
    }
}
