#![allow(dead_code)]

use proptest::prelude::*;
use syz_core::toric_cy::{ChargeMatrix, Fan};

pub fn kp1() -> Fan {
    Fan::new(
        2,
        vec![vec![0, 1], vec![1, 1], vec![-1, 1]],
        vec![vec![0, 1], vec![0, 2]],
    )
}

pub fn kp2() -> Fan {
    Fan::new(
        3,
        vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]],
        vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1]],
    )
}

pub fn kp1xp1() -> Fan {
    Fan::new(
        3,
        vec![
            vec![0, 0, 1],
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![-1, 0, 1],
            vec![0, -1, 1],
        ],
        vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 1]],
    )
}

pub fn conifold() -> Fan {
    Fan::new(
        3,
        vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, -1, 1]],
        vec![vec![0, 1, 2], vec![0, 1, 3]],
    )
}

pub fn c3() -> Fan {
    Fan::new(
        3,
        vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        vec![vec![0, 1, 2]],
    )
}

/// Local F_1: the blow-up of P^2 at a point.
pub fn kf1() -> Fan {
    Fan::new(
        3,
        vec![
            vec![0, 0, 1],
            vec![1, 0, 1],
            vec![1, 1, 1],
            vec![0, 1, 1],
            vec![-1, -1, 1],
        ],
        vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 1]],
    )
}

pub fn bundled() -> Vec<(&'static str, Fan)> {
    vec![
        ("kp1", kp1()),
        ("kp2", kp2()),
        ("kp1xp1", kp1xp1()),
        ("conifold", conifold()),
        ("c3", c3()),
        ("kf1", kf1()),
    ]
}

/// Resolution of C^2/Z_{k+1}: rays (i, 1), i = 0..=k.
pub fn a_chain(k: usize) -> Fan {
    let rays = (0..=k as i64).map(|i| vec![i, 1]).collect();
    let cones = (0..k).map(|i| vec![i, i + 1]).collect();
    Fan::new(2, rays, cones)
}

/// Cone over a triangulated lattice strip with `a + 1` points on height 0 and
/// `b + 1` points on height 1. Every such triangle is unimodular.
pub fn strip(a: usize, b: usize, zigzag: &[bool]) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..=a as i64).map(|x| vec![x, 0, 1]).collect();
    rays.extend((0..=b as i64).map(|x| vec![x, 1, 1]));
    let top = |j: usize| a + 1 + j;
    let (mut i, mut j) = (0usize, 0usize);
    let mut cones = Vec::new();
    for step in 0..a + b {
        let take_bottom = i < a && (j == b || zigzag.get(step).copied().unwrap_or(true));
        if take_bottom {
            cones.push(vec![i, i + 1, top(j)]);
            i += 1;
        } else {
            cones.push(vec![i, top(j), top(j + 1)]);
            j += 1;
        }
    }
    Fan::new(3, rays, cones)
}

/// Applies `v ↦ g v` for an elementary `g ∈ GL(n, Z)` per op, then relabels
/// rays by `perm` and reorders cones by `cone_perm`.
pub fn transform(
    fan: &Fan,
    ops: &[(usize, usize, bool)],
    perm: &[usize],
    cone_perm: &[usize],
) -> Fan {
    let n = fan.rank();
    let mut rays: Vec<Vec<i64>> = fan.rays().to_vec();
    for &(i, j, positive) in ops {
        let (i, j) = (i % n, j % n);
        for v in rays.iter_mut() {
            if i == j {
                v[i] = -v[i];
            } else {
                v[i] += if positive { v[j] } else { -v[j] };
            }
        }
    }
    let mut permuted = vec![Vec::new(); rays.len()];
    for (old, v) in rays.into_iter().enumerate() {
        permuted[perm[old]] = v;
    }
    let cones: Vec<Vec<usize>> = cone_perm
        .iter()
        .map(|&c| fan.max_cones()[c].iter().map(|&r| perm[r]).collect())
        .collect();
    Fan::new(n, permuted, cones)
}

/// A base fan from the bundled list, the A_k chains or the strips.
pub fn arb_base_fan() -> impl Strategy<Value = Fan> {
    prop_oneof![
        (0..6usize).prop_map(|k| bundled()[k].1.clone()),
        (1..5usize).prop_map(a_chain),
        (
            0..4usize,
            0..4usize,
            prop::collection::vec(any::<bool>(), 8)
        )
            .prop_filter("needs a triangle", |(a, b, _)| a + b >= 1)
            .prop_map(|(a, b, z)| strip(a, b, &z)),
    ]
}

/// Random smooth CY fan: a base fan under a random unimodular change of
/// coordinates, ray relabelling and cone reordering.
pub fn arb_fan() -> impl Strategy<Value = (Fan, Vec<usize>)> {
    arb_base_fan().prop_flat_map(|f| {
        let m = f.num_rays();
        let c = f.max_cones().len();
        let ops = prop::collection::vec((0..3usize, 0..3usize, any::<bool>()), 0..6);
        let perm = Just((0..m).collect::<Vec<_>>()).prop_shuffle();
        let cone_perm = Just((0..c).collect::<Vec<_>>()).prop_shuffle();
        (Just(f), ops, perm, cone_perm)
            .prop_map(|(f, ops, perm, cp)| (transform(&f, &ops, &perm, &cp), perm))
    })
}

/// Charge matrix with base `0..n`, others `n..n+l`, and only column 0 negative.
pub fn single_negative_column() -> impl Strategy<Value = ChargeMatrix> {
    (1..=2usize, 1..=3usize).prop_flat_map(|(l, n)| {
        prop::collection::vec(prop::collection::vec(0i64..3, n - 1), l).prop_map(move |tails| {
            let m = n + l;
            let rows = tails
                .iter()
                .enumerate()
                .map(|(a, tail)| {
                    let mut row = vec![0i64; m];
                    row[1..n].copy_from_slice(tail);
                    row[n + a] = 1;
                    row[0] = -row.iter().sum::<i64>();
                    row
                })
                .collect();
            ChargeMatrix::from_rows(rows, (0..n).collect(), (n..m).collect())
        })
    })
}
