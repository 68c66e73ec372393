use std::collections::HashMap;

use rayon::prelude::*;

use super::{CubicalError, ScalarField};
use crate::z2::GHTable;
use crate::Scalar;

/// Raw result of [`relative_homology_detailed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeHomology {
    pub table: GHTable,
    /// Number of cells of each dimension in the quotient complex.
    pub cells: Vec<usize>,
    /// `rank ∂_k` for `k = 0..=dim`.
    pub boundary_ranks: Vec<usize>,
}

/// Ranks of `H_*(sublevel(omega), sublevel(eps); ℤ/2)` in cubical degrees.
///
/// A cube of the grid belongs to `sublevel(c)` when all of its vertices have
/// value `≤ c`.
pub fn relative_homology<F: Scalar>(
    field: &ScalarField<F>,
    eps: F,
    omega: F,
) -> Result<GHTable, CubicalError> {
    relative_homology_detailed(field, eps, omega).map(|r| r.table)
}

const NONE: u32 = u32::MAX;

struct Refined {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Refined {
    #[inline]
    fn faces(&self, idx: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut rest = idx;
        for a in (0..self.dims.len()).rev() {
            let c = rest % self.dims[a];
            rest /= self.dims[a];
            if c % 2 == 1 {
                out.push(idx - self.strides[a]);
                out.push(idx + self.strides[a]);
            }
        }
    }

    #[inline]
    fn cell_dim(&self, idx: usize) -> usize {
        let mut rest = idx;
        let mut k = 0;
        for &d in self.dims.iter().rev() {
            k += (rest % d) & 1;
            rest /= d;
        }
        k
    }
}

#[inline]
fn pack(rank: u32, dim: usize, idx: usize) -> u64 {
    ((rank as u64) << 36) | ((dim as u64) << 32) | idx as u64
}

#[inline]
fn cell_of(key: u64) -> usize {
    (key & 0xffff_ffff) as usize
}

pub fn relative_homology_detailed<F: Scalar>(
    field: &ScalarField<F>,
    eps: F,
    omega: F,
) -> Result<RelativeHomology, CubicalError> {
    if !(eps < omega) {
        return Err(CubicalError::EpsNotBelowOmega {
            eps: eps.to_f64_lossy(),
            omega: omega.to_f64_lossy(),
        });
    }
    let grid = field.grid();
    let values = field.values();
    let d = grid.dim();
    let nv = values.len();
    if nv >= 1 << 28 {
        return Err(CubicalError::BadGrid("too many vertices".into()));
    }

    // Rank vertices by (value, index); sublevel(c) is then an initial segment.
    let mut order: Vec<u32> = (0..nv as u32).collect();
    order.par_sort_unstable_by(|&a, &b| {
        values[a as usize]
            .partial_cmp(&values[b as usize])
            .unwrap()
            .then(a.cmp(&b))
    });
    let k_eps = order.partition_point(|&i| values[i as usize] <= eps) as u32;
    let k_omega = order.partition_point(|&i| values[i as usize] <= omega) as u32;
    let mut rank = vec![0u32; nv];
    for (r, &i) in order.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    drop(order);

    // Refined grid: coordinate 2k is vertex k, 2k+1 the edge between k and k+1.
    let dims: Vec<usize> = grid.resolution.iter().map(|&r| 2 * r - 1).collect();
    let mut strides = vec![1usize; d];
    for a in (0..d - 1).rev() {
        strides[a] = strides[a + 1] * dims[a + 1];
    }
    let total: usize = dims.iter().product();
    let refined = Refined { dims, strides };
    let vstrides = grid.strides();

    // Key of a cell = max rank of its vertices, by separable max-dilation.
    let mut key = vec![0u32; total];
    key.par_chunks_mut(refined.dims[d - 1])
        .enumerate()
        .for_each(|(row, chunk)| {
            let mut rest = row;
            let mut vbase = 0usize;
            for a in (0..d - 1).rev() {
                let c = rest % refined.dims[a];
                rest /= refined.dims[a];
                if c % 2 == 1 {
                    return;
                }
                vbase += (c / 2) * vstrides[a];
            }
            for k in (0..chunk.len()).step_by(2) {
                chunk[k] = rank[vbase + k / 2];
            }
        });
    drop(rank);
    for a in 0..d {
        let sa = refined.strides[a];
        let block = refined.dims[a] * sa;
        // Positions with odd coordinate on axis a and even coordinates on all
        // later axes; earlier axes were already dilated.
        let inner: Vec<usize> = (0..sa)
            .filter(|&off| {
                let mut rest = off;
                (a + 1..d).rev().all(|b| {
                    let c = rest % refined.dims[b];
                    rest /= refined.dims[b];
                    c.is_multiple_of(2)
                })
            })
            .collect();
        key.par_chunks_mut(block).for_each(|chunk| {
            for ca in (1..refined.dims[a]).step_by(2) {
                for &off in &inner {
                    let i = ca * sa + off;
                    chunk[i] = chunk[i - sa].max(chunk[i + sa]);
                }
            }
        });
    }

    // Quotient cells grouped by dimension, sorted by (key, dim, index).
    let chunk = 1 << 16;
    let per_chunk: Vec<Vec<Vec<u64>>> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut out = vec![Vec::new(); d + 1];
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let k = key[idx];
                if k >= k_eps && k < k_omega {
                    let dim = refined.cell_dim(idx);
                    out[dim].push(pack(k, dim, idx));
                }
            }
            out
        })
        .collect();
    let mut cells: Vec<Vec<u64>> = vec![Vec::new(); d + 1];
    for part in per_chunk {
        for (dim, v) in part.into_iter().enumerate() {
            cells[dim].extend(v);
        }
    }
    for c in &mut cells {
        c.par_sort_unstable();
    }
    let counts: Vec<usize> = cells.iter().map(Vec::len).collect();

    // Column reduction from the top dimension down with clearing. The pivot
    // table is shared: rows of different passes are cells of different
    // dimensions, so they never collide.
    let mut pivot = vec![NONE; total];
    let mut ranks = vec![0usize; d + 2];
    let mut faces = Vec::with_capacity(2 * d);
    for k in (1..=d).rev() {
        let mut stored: HashMap<u32, Vec<u64>> = HashMap::new();
        let boundary = |idx: usize, faces: &mut Vec<usize>, out: &mut Vec<u64>| {
            refined.faces(idx, faces);
            out.clear();
            for &f in faces.iter() {
                let fk = key[f];
                if fk >= k_eps {
                    out.push(pack(fk, k - 1, f));
                }
            }
            out.sort_unstable();
        };
        let mut col = Vec::new();
        let mut other = Vec::new();
        let mut merged = Vec::new();
        let mut r = 0usize;
        for &ck in &cells[k] {
            let c = cell_of(ck);
            if pivot[c] != NONE {
                continue;
            }
            boundary(c, &mut faces, &mut col);
            let mut modified = false;
            while let Some(&low) = col.last() {
                let owner = pivot[cell_of(low)];
                if owner == NONE {
                    break;
                }
                match stored.get(&owner) {
                    Some(v) => other.clone_from(v),
                    None => boundary(owner as usize, &mut faces, &mut other),
                }
                xor_into(&col, &other, &mut merged);
                std::mem::swap(&mut col, &mut merged);
                modified = true;
            }
            if let Some(&low) = col.last() {
                pivot[cell_of(low)] = c as u32;
                r += 1;
                if modified {
                    stored.insert(c as u32, col.clone());
                }
            }
        }
        ranks[k] = r;
    }
    let mut table = GHTable::new();
    for k in 0..=d {
        let b = counts[k] as i64 - ranks[k] as i64 - ranks[k + 1] as i64;
        debug_assert!(b >= 0);
        table.set(k as i64, b as usize);
    }
    Ok(RelativeHomology {
        table,
        cells: counts,
        boundary_ranks: ranks[..=d].to_vec(),
    })
}

fn xor_into(a: &[u64], b: &[u64], out: &mut Vec<u64>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

#[cfg(test)]
mod tests {
    use super::super::{sample, Grid};
    use super::*;
    use crate::expr::parse;

    fn field(expr: &str, bounds: Vec<(f64, f64)>, r: usize) -> ScalarField<f64> {
        let axes = (1..=bounds.len()).map(|i| format!("x{i}")).collect();
        sample(&parse(expr).unwrap(), &Grid::uniform(axes, bounds, r).unwrap()).unwrap()
    }

    #[test]
    fn interval_mod_subinterval_is_acyclic() {
        let f = field("x1^2", vec![(-2.0, 2.0)], 41);
        assert!(relative_homology(&f, 1.0, 3.0).unwrap().is_empty());
    }

    #[test]
    fn interval_mod_endpoints() {
        let f = field("1 - x1^2", vec![(-2.0, 2.0)], 41);
        let t = relative_homology(&f, 0.5, 2.0).unwrap();
        assert_eq!(t, GHTable::from_pairs([(1, 1)]));
    }

    #[test]
    fn saddle_degree_one() {
        for r in [9, 17] {
            let f = field("x1^2 - x2^2", vec![(-2.0, 2.0); 2], r);
            assert_eq!(relative_homology(&f, -0.5, 5.0).unwrap(), GHTable::from_pairs([(1, 1)]));
            // With the saddle value below the window the lower set is contractible.
            assert!(relative_homology(&f, 0.5, 5.0).unwrap().is_empty());
        }
    }

    #[test]
    fn empty_pair_and_bad_window() {
        let f = field("x1 + 10", vec![(0.0, 1.0)], 5);
        assert!(relative_homology(&f, 0.0, 1.0).unwrap().is_empty());
        assert!(matches!(
            relative_homology(&f, 2.0, 1.0),
            Err(CubicalError::EpsNotBelowOmega { .. })
        ));
    }

    #[test]
    fn maximum_in_three_dimensions() {
        let f = field("-(x1^2 + x2^2 + x3^2)", vec![(-1.0, 1.0); 3], 11);
        // (ball, sphere-complement) carries a single class in degree 3.
        let t = relative_homology(&f, -0.5, 0.5).unwrap();
        assert_eq!(t, GHTable::from_pairs([(3, 1)]));
    }
}
