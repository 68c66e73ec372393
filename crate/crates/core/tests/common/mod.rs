//! Dense ℤ/2 linear algebra written from scratch for the tests, so that
//! ranks and homology can be checked without the library's sparse reduction.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Rank of a dense 0/1 matrix given as rows.
pub fn rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c]) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] {
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Square 0/1 matrix with entries `(row, col)`.
pub fn dense(n_rows: usize, n_cols: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n_cols]; n_rows];
    for (r, c) in entries {
        m[r][c] ^= true;
    }
    m
}

/// Homology ranks of a complex with generator degrees `degrees` and
/// differential `d` (dense, rows are targets):
/// `dim C_k − rank d|C_k − rank d|C_{k+1}`.
pub fn homology(degrees: &[i64], d: &[Vec<bool>]) -> BTreeMap<i64, usize> {
    let block_rank = |k: i64| {
        let cols: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] == k).collect();
        let rows: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] == k - 1).collect();
        let sub: Vec<Vec<bool>> = rows.iter().map(|&r| cols.iter().map(|&c| d[r][c]).collect()).collect();
        rank(&sub)
    };
    let mut out = BTreeMap::new();
    let mut ks: Vec<i64> = degrees.to_vec();
    ks.sort_unstable();
    ks.dedup();
    for k in ks {
        let dim = degrees.iter().filter(|&&x| x == k).count();
        let h = dim - block_rank(k) - block_rank(k + 1);
        if h > 0 {
            out.insert(k, h);
        }
    }
    out
}

/// `a · b` over ℤ/2.
pub fn mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).fold(false, |acc, k| acc ^ (row[k] & b[k][c])))
                .collect()
        })
        .collect()
}
