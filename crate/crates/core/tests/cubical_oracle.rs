mod common;

use std::collections::HashMap;

use gfh_core::cubical::{relative_homology, sample, Grid, ScalarField};
use gfh_core::expr::parse;
use gfh_core::z2::GHTable;
use proptest::prelude::*;

/// Elementary cube: start vertex and a 0/1 extent per axis.
type Cube = (Vec<usize>, Vec<usize>);

fn cubes(res: &[usize]) -> Vec<Cube> {
    let mut out: Vec<Cube> = vec![(vec![], vec![])];
    for &r in res {
        let mut next = Vec::new();
        for (s, e) in &out {
            for k in 0..r {
                for ext in 0..2 {
                    if k + ext < r {
                        let (mut s2, mut e2) = (s.clone(), e.clone());
                        s2.push(k);
                        e2.push(ext);
                        next.push((s2, e2));
                    }
                }
            }
        }
        out = next;
    }
    out
}

fn vertex_index(res: &[usize], v: &[usize]) -> usize {
    v.iter().zip(res).fold(0, |acc, (&k, &r)| acc * r + k)
}

/// Largest vertex value of a cube.
fn cube_value(res: &[usize], values: &[f64], (s, e): &Cube) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for corner in 0..(1usize << s.len()) {
        let v: Vec<usize> = (0..s.len()).map(|a| s[a] + (e[a] & (corner >> a))).collect();
        best = best.max(values[vertex_index(res, &v)]);
    }
    best
}

fn faces((s, e): &Cube) -> Vec<Cube> {
    let mut out = Vec::new();
    for a in 0..s.len() {
        if e[a] == 1 {
            let mut e2 = e.clone();
            e2[a] = 0;
            out.push((s.clone(), e2.clone()));
            let mut s2 = s.clone();
            s2[a] += 1;
            out.push((s2, e2));
        }
    }
    out
}

/// `H_*(sublevel(omega), sublevel(eps))` by enumerating every cube.
fn brute_force(res: &[usize], values: &[f64], eps: f64, omega: f64) -> GHTable {
    let cells: Vec<Cube> = cubes(res)
        .into_iter()
        .filter(|c| {
            let v = cube_value(res, values, c);
            v <= omega && v > eps
        })
        .collect();
    let index: HashMap<&Cube, usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let degrees: Vec<i64> = cells.iter().map(|(_, e)| e.iter().sum::<usize>() as i64).collect();
    let mut d = vec![vec![false; cells.len()]; cells.len()];
    for (i, c) in cells.iter().enumerate() {
        for f in faces(c) {
            if let Some(&j) = index.get(&f) {
                d[j][i] ^= true;
            }
        }
    }
    GHTable::from_pairs(common::homology(&degrees, &d))
}

fn field(res: &[usize], values: Vec<f64>) -> ScalarField<f64> {
    let axes = (1..=res.len()).map(|i| format!("x{i}")).collect();
    let bounds = vec![(0.0, 1.0); res.len()];
    ScalarField::new(Grid::new(axes, bounds, res.to_vec()).unwrap(), values).unwrap()
}

fn grid_and_values() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    prop_oneof![
        prop::collection::vec(2usize..12, 1..=1),
        prop::collection::vec(2usize..7, 2..=2),
        prop::collection::vec(2usize..4, 3..=3),
    ]
    .prop_flat_map(|res| {
        let n: usize = res.iter().product();
        (Just(res), prop::collection::vec((0u8..7).prop_map(f64::from), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_fields_match_brute_force((res, values) in grid_and_values(), a in 0u8..7, b in 0u8..7) {
        let (eps, omega) = (f64::from(a.min(b)) - 0.5, f64::from(a.max(b)) + 0.5);
        let got = relative_homology(&field(&res, values.clone()), eps, omega).unwrap();
        prop_assert_eq!(got, brute_force(&res, &values, eps, omega));
    }
}

fn sampled(expr: &str, bounds: Vec<(f64, f64)>, r: usize) -> ScalarField<f64> {
    let axes = (1..=bounds.len()).map(|i| format!("x{i}")).collect();
    sample(&parse(expr).unwrap(), &Grid::uniform(axes, bounds, r).unwrap()).unwrap()
}

#[test]
fn stabilization_by_a_quadratic() {
    // x^3 − 3x on [−2.2, 2.2]: the window (−1, 3] holds the local maximum 2
    // but not the boundary value 4.05 at the right end. sublevel(3) is an
    // interval and sublevel(−1) has two components, so the pair has rank 1 in
    // degree 1.
    let f = "x1^3 - 3*x1";
    let one = relative_homology(&sampled(f, vec![(-2.2, 2.2)], 81), -1.0, 3.0).unwrap();
    assert_eq!(one, GHTable::from_pairs([(1, 1)]));
    let bounds = vec![(-2.2, 2.2), (-3.0, 3.0)];
    let plus = relative_homology(&sampled(&format!("{f} + x2^2"), bounds.clone(), 61), -1.0, 3.0).unwrap();
    assert_eq!(plus, one);
    let minus = relative_homology(&sampled(&format!("{f} - x2^2"), bounds, 61), -1.0, 3.0).unwrap();
    assert_eq!(minus, one.shifted(1));
}

#[test]
fn double_well_suspended_twice() {
    // (x^2 − 1)^2 has two minima of value 0 separated by a maximum of value
    // 1; subtracting y^2 + z^2 shifts the pair up by two.
    let f = "(x1^2 - 1)^2";
    let b1 = vec![(-1.6, 1.6)];
    let one = relative_homology(&sampled(f, b1, 81), 0.5, 2.0).unwrap();
    assert_eq!(one, GHTable::from_pairs([(1, 1)]));
    let b3 = vec![(-1.6, 1.6), (-2.5, 2.5), (-2.5, 2.5)];
    let down = relative_homology(&sampled(&format!("{f} - x2^2 - x3^2"), b3, 25), 0.5, 2.0).unwrap();
    assert_eq!(down, one.shifted(2));
}
