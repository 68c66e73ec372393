use std::collections::BTreeMap;
use std::fmt;

use super::vector::Z2Vec;

/// Sparse matrix over ℤ/2 stored column-major; each column is the sorted set of
/// rows holding a 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Z2Matrix {
    n_rows: usize,
    columns: Vec<Vec<usize>>,
}

/// Result of column-reducing a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub rank: usize,
    /// Basis of the null space, vectors of length `n_cols`.
    pub kernel_basis: Vec<Z2Vec>,
    /// Basis of the column space, vectors of length `n_rows`.
    pub image_basis: Vec<Z2Vec>,
}

impl Z2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            columns: vec![Vec::new(); n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            columns: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from `(row, col)` positions. Repeated positions are
    /// collapsed (set semantics). Panics on out-of-range positions.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize)>>(
        n_rows: usize,
        n_cols: usize,
        entries: I,
    ) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for (r, c) in entries {
            assert!(r < n_rows && c < n_cols, "entry ({r}, {c}) out of bounds");
            m.set(r, c, true);
        }
        m
    }

    pub fn from_columns(n_rows: usize, columns: &[Z2Vec]) -> Self {
        let cols = columns
            .iter()
            .map(|v| {
                assert_eq!(v.len(), n_rows);
                v.ones().collect()
            })
            .collect();
        Self {
            n_rows,
            columns: cols,
        }
    }

    /// Row-major 0/1 array, as used in the JSON interchange formats.
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(n_rows, n_cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                if v % 2 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.n_cols()]; self.n_rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                out[r][c] = 1;
            }
        }
        out
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].binary_search(&r).is_ok()
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let col = &mut self.columns[c];
        match (col.binary_search(&r), value) {
            (Ok(i), false) => {
                col.remove(i);
            }
            (Err(i), true) => col.insert(i, r),
            _ => {}
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        let current = self.get(r, c);
        self.set(r, c, !current);
    }

    pub fn column(&self, c: usize) -> &[usize] {
        &self.columns[c]
    }

    pub fn column_vec(&self, c: usize) -> Z2Vec {
        Z2Vec::from_support(self.n_rows, self.columns[c].iter().copied())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&r| (r, c)))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Z2Matrix {
        Z2Matrix::from_entries(self.n_cols(), self.n_rows, self.entries().map(|(r, c)| (c, r)))
    }

    pub fn apply(&self, v: &Z2Vec) -> Z2Vec {
        assert_eq!(v.len(), self.n_cols(), "dimension mismatch");
        let mut out = Z2Vec::zeros(self.n_rows);
        for c in v.ones() {
            for &r in &self.columns[c] {
                out.toggle(r);
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Z2Matrix) -> Z2Matrix {
        assert_eq!(self.n_cols(), rhs.n_rows, "dimension mismatch");
        let cols: Vec<Z2Vec> = (0..rhs.n_cols())
            .map(|c| self.apply(&rhs.column_vec(c)))
            .collect();
        Z2Matrix::from_columns(self.n_rows, &cols)
    }

    pub fn add(&self, rhs: &Z2Matrix) -> Z2Matrix {
        assert_eq!(
            (self.n_rows, self.n_cols()),
            (rhs.n_rows, rhs.n_cols()),
            "dimension mismatch"
        );
        let mut out = self.clone();
        for (r, c) in rhs.entries() {
            out.toggle(r, c);
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Z2Matrix {
        let row_pos: BTreeMap<usize, usize> =
            rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut out = Z2Matrix::zeros(rows.len(), cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in &self.columns[c] {
                if let Some(&i) = row_pos.get(r) {
                    out.columns[j].push(i);
                }
            }
            out.columns[j].sort_unstable();
        }
        out
    }

    pub fn pow(&self, k: u32) -> Z2Matrix {
        assert_eq!(self.n_rows, self.n_cols(), "pow of a non-square matrix");
        let mut out = Z2Matrix::identity(self.n_rows);
        for _ in 0..k {
            out = self.mul(&out);
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.reduce().rank
    }

    pub fn is_invertible(&self) -> bool {
        self.n_rows == self.n_cols() && self.rank() == self.n_rows
    }

    /// Column reduction with kernel tracking.
    ///
    /// Columns are processed left to right; the pivot of a column is its lowest
    /// nonzero row (largest row index). A column whose pivot is already owned is
    /// added to the owner and the scan repeats, so identical inputs always give
    /// identical bases.
    pub fn reduce(&self) -> Reduction {
        let n_cols = self.n_cols();
        let mut owner: Vec<Option<usize>> = vec![None; self.n_rows];
        let mut reduced: Vec<Z2Vec> = Vec::with_capacity(n_cols);
        let mut combos: Vec<Z2Vec> = Vec::with_capacity(n_cols);
        let mut kernel_basis = Vec::new();
        let mut image_basis = Vec::new();
        for c in 0..n_cols {
            let mut col = self.column_vec(c);
            let mut combo = Z2Vec::unit(n_cols, c);
            while let Some(low) = col.last_one() {
                match owner[low] {
                    Some(o) => {
                        col.add_assign(&reduced[o]);
                        combo.add_assign(&combos[o]);
                    }
                    None => break,
                }
            }
            match col.last_one() {
                Some(low) => {
                    owner[low] = Some(c);
                    image_basis.push(col.clone());
                }
                None => kernel_basis.push(combo.clone()),
            }
            reduced.push(col);
            combos.push(combo);
        }
        Reduction {
            rank: image_basis.len(),
            kernel_basis,
            image_basis,
        }
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Option<Z2Matrix> {
        let n = self.n_rows;
        if n != self.n_cols() {
            return None;
        }
        // Gauss-Jordan on [A | I] by rows.
        let mut rows: Vec<(Z2Vec, Z2Vec)> = (0..n)
            .map(|r| {
                let mut a = Z2Vec::zeros(n);
                for c in 0..n {
                    if self.get(r, c) {
                        a.set(c, true);
                    }
                }
                (a, Z2Vec::unit(n, r))
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| rows[r].0.get(col))?;
            rows.swap(col, pivot);
            let (pa, pb) = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != col && row.0.get(col) {
                    row.0.add_assign(&pa);
                    row.1.add_assign(&pb);
                }
            }
        }
        let mut inv = Z2Matrix::zeros(n, n);
        for (r, (_, b)) in rows.iter().enumerate() {
            for c in b.ones() {
                inv.set(r, c, true);
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for Z2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Z2Matrix {}x{} [", self.n_rows, self.n_cols())?;
        for row in self.to_dense() {
            let s: String = row.iter().map(|v| if *v == 1 { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}
