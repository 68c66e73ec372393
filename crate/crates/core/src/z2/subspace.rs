//! Subspace and quotient-space bookkeeping over ℤ/2.

use super::vector::Z2Vec;

/// A subspace `U` of `(ℤ/2)^dim` together with chosen representatives of a basis
/// of a quotient `W / U`.
///
/// Rows are kept in echelon form keyed by their highest set coordinate. Each
/// row carries a tag recording which representatives it is made of (the rows
/// coming from `U` carry a zero tag), so any `w ∈ W` can be written in
/// representative coordinates modulo `U`.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    dim: usize,
    rows: Vec<Option<(Z2Vec, Z2Vec)>>,
    reps: Vec<Z2Vec>,
    sub_dim: usize,
    max_reps: usize,
}

impl QuotientBasis {
    /// `max_reps` bounds the number of representatives (tag width).
    pub fn new(dim: usize, max_reps: usize) -> Self {
        Self {
            dim,
            rows: vec![None; dim],
            reps: Vec::new(),
            sub_dim: 0,
            max_reps,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &Z2Vec) -> (Z2Vec, Z2Vec) {
        let mut v = v.clone();
        let mut tag = Z2Vec::zeros(self.max_reps);
        while let Some(top) = v.last_one() {
            match &self.rows[top] {
                Some((row, row_tag)) => {
                    v.add_assign(row);
                    tag.add_assign(row_tag);
                }
                None => break,
            }
        }
        (v, tag)
    }

    /// Adds a vector to the subspace `U`. Must be called before any
    /// representative is pushed. Returns false when already spanned.
    pub fn add_to_subspace(&mut self, v: &Z2Vec) -> bool {
        assert!(self.reps.is_empty(), "subspace must be fixed before representatives");
        let (r, _) = self.reduce(v);
        match r.last_one() {
            Some(top) => {
                self.rows[top] = Some((r, Z2Vec::zeros(self.max_reps)));
                self.sub_dim += 1;
                true
            }
            None => false,
        }
    }

    /// Pushes `v` as a new representative if it is independent of `U` and the
    /// current representatives. Returns its index.
    pub fn push_representative(&mut self, v: &Z2Vec) -> Option<usize> {
        let (r, mut tag) = self.reduce(v);
        let top = r.last_one()?;
        let idx = self.reps.len();
        assert!(idx < self.max_reps, "representative capacity exceeded");
        tag.toggle(idx);
        self.rows[top] = Some((r, tag));
        self.reps.push(v.clone());
        Some(idx)
    }

    pub fn contains(&self, v: &Z2Vec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Coordinates of `v` in the representative basis, modulo `U`. `None` when
    /// `v` is outside `U + span(reps)`.
    pub fn coordinates(&self, v: &Z2Vec) -> Option<Z2Vec> {
        let (r, tag) = self.reduce(v);
        if !r.is_zero() {
            return None;
        }
        let mut out = Z2Vec::zeros(self.reps.len());
        for i in tag.ones() {
            out.set(i, true);
        }
        Some(out)
    }

    pub fn representatives(&self) -> &[Z2Vec] {
        &self.reps
    }

    pub fn quotient_dim(&self) -> usize {
        self.reps.len()
    }

    pub fn subspace_dim(&self) -> usize {
        self.sub_dim
    }
}

/// Dimension of the span of a family of vectors.
pub fn span_dim<'a, I: IntoIterator<Item = &'a Z2Vec>>(dim: usize, vectors: I) -> usize {
    let mut q = QuotientBasis::new(dim, 0);
    vectors.into_iter().filter(|v| q.add_to_subspace(v)).count()
}
