use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::matrix::Z2Matrix;
use super::subspace::QuotientBasis;
use super::table::GHTable;
use super::vector::Z2Vec;
use super::Z2Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
}

/// Interchange form of a [`GradedComplex`]. Ids absent from `differential`
/// have zero differential.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub differential: BTreeMap<String, Vec<String>>,
}

/// Finite chain complex over ℤ/2 with a degree −1 differential.
///
/// The differential is stored as a square matrix over all generators (rows are
/// targets). Construction checks ids and degrees but not `d∘d = 0`; use
/// [`GradedComplex::verify_d_squared`] for that, and [`GradedComplex::homology`]
/// refuses complexes that fail it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    generators: Vec<Generator>,
    index: HashMap<String, usize>,
    d: Z2Matrix,
}

/// Outcome of a `d∘d = 0` check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSquaredCheck {
    pub ok: bool,
    /// First generator (in generator order) with `d(d(x)) ≠ 0`.
    pub witness: Option<String>,
}

impl GradedComplex {
    /// Builds a complex from generators and a differential given as id → ids.
    /// Listing a target twice cancels it.
    pub fn new(
        generators: Vec<Generator>,
        differential: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self, Z2Error> {
        let index = Self::build_index(&generators)?;
        let n = generators.len();
        let mut d = Z2Matrix::zeros(n, n);
        for (src, targets) in differential {
            let &s = index
                .get(src)
                .ok_or_else(|| Z2Error::UnknownGenerator(src.clone()))?;
            for tgt in targets {
                let &t = index
                    .get(tgt)
                    .ok_or_else(|| Z2Error::UnknownGenerator(tgt.clone()))?;
                if generators[t].degree != generators[s].degree - 1 {
                    return Err(Z2Error::DegreeMismatch {
                        from: src.clone(),
                        to: tgt.clone(),
                        from_degree: generators[s].degree,
                        to_degree: generators[t].degree,
                    });
                }
                d.toggle(t, s);
            }
        }
        Ok(Self {
            generators,
            index,
            d,
        })
    }

    /// Builds a complex from a differential matrix over the generator list.
    pub fn from_matrix(generators: Vec<Generator>, d: Z2Matrix) -> Result<Self, Z2Error> {
        let index = Self::build_index(&generators)?;
        assert_eq!(d.n_rows(), generators.len());
        assert_eq!(d.n_cols(), generators.len());
        for (t, s) in d.entries() {
            if generators[t].degree != generators[s].degree - 1 {
                return Err(Z2Error::DegreeMismatch {
                    from: generators[s].id.clone(),
                    to: generators[t].id.clone(),
                    from_degree: generators[s].degree,
                    to_degree: generators[t].degree,
                });
            }
        }
        Ok(Self {
            generators,
            index,
            d,
        })
    }

    /// Zero-differential complex.
    pub fn free(generators: Vec<Generator>) -> Result<Self, Z2Error> {
        let n = generators.len();
        Self::from_matrix(generators, Z2Matrix::zeros(n, n))
    }

    fn build_index(generators: &[Generator]) -> Result<HashMap<String, usize>, Z2Error> {
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(Z2Error::DuplicateGenerator(g.id.clone()));
            }
        }
        Ok(index)
    }

    pub fn from_doc(doc: &ComplexDoc) -> Result<Self, Z2Error> {
        Self::new(doc.generators.clone(), &doc.differential)
    }

    pub fn to_doc(&self) -> ComplexDoc {
        let mut differential = BTreeMap::new();
        for (s, g) in self.generators.iter().enumerate() {
            let targets: Vec<String> = self
                .d
                .column(s)
                .iter()
                .map(|&t| self.generators[t].id.clone())
                .collect();
            if !targets.is_empty() {
                differential.insert(g.id.clone(), targets);
            }
        }
        ComplexDoc {
            generators: self.generators.clone(),
            differential,
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn degree_of(&self, i: usize) -> i64 {
        self.generators[i].degree
    }

    pub fn differential(&self) -> &Z2Matrix {
        &self.d
    }

    /// Distinct generator degrees, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.generators.iter().map(|g| g.degree).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// Global indices of generators in degree `k`, in generator order.
    pub fn in_degree(&self, k: i64) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.degree == k)
            .map(|(i, _)| i)
            .collect()
    }

    /// Generator counts per degree.
    pub fn chain_ranks(&self) -> GHTable {
        GHTable::from_pairs(self.generators.iter().map(|g| (g.degree, 1)))
    }

    /// `d_k : C_k → C_{k−1}` in the local bases of [`Self::in_degree`].
    pub fn block(&self, k: i64) -> Z2Matrix {
        self.d.submatrix(&self.in_degree(k - 1), &self.in_degree(k))
    }

    pub fn verify_d_squared(&self) -> DSquaredCheck {
        let dd = self.d.mul(&self.d);
        let witness = (0..self.len())
            .find(|&c| !dd.column(c).is_empty())
            .map(|c| self.generators[c].id.clone());
        DSquaredCheck {
            ok: witness.is_none(),
            witness,
        }
    }

    fn require_d_squared(&self) -> Result<(), Z2Error> {
        match self.verify_d_squared().witness {
            None => Ok(()),
            Some(w) => Err(Z2Error::DSquaredNonZero(w)),
        }
    }

    /// ℤ/2 Betti numbers: `dim ker d_k − dim im d_{k+1}`.
    pub fn homology(&self) -> Result<GHTable, Z2Error> {
        self.require_d_squared()?;
        let mut out = GHTable::new();
        for k in self.degrees() {
            let n_k = self.in_degree(k).len();
            let rank_out = self.block(k).rank();
            let rank_in = self.block(k + 1).rank();
            out.set(k, n_k - rank_out - rank_in);
        }
        Ok(out)
    }

    /// Homology together with explicit cycle representatives in every degree.
    pub fn homology_basis(&self) -> Result<HomologyBasis, Z2Error> {
        self.require_d_squared()?;
        let mut degrees = BTreeMap::new();
        for k in self.degrees() {
            let gens = self.in_degree(k);
            let cycles = self.block(k).reduce().kernel_basis;
            let boundaries = self.block(k + 1).reduce().image_basis;
            let mut q = QuotientBasis::new(gens.len(), cycles.len());
            for b in &boundaries {
                q.add_to_subspace(b);
            }
            for z in &cycles {
                q.push_representative(z);
            }
            degrees.insert(k, DegreeHomology { gens, quotient: q });
        }
        Ok(HomologyBasis {
            n_generators: self.len(),
            degrees,
        })
    }

    /// Complex with every degree raised by `by` and ids prefixed.
    pub fn shifted(&self, by: i64, prefix: &str) -> GradedComplex {
        let gens = self
            .generators
            .iter()
            .map(|g| Generator {
                id: format!("{prefix}{}", g.id),
                degree: g.degree + by,
            })
            .collect();
        GradedComplex::from_matrix(gens, self.d.clone()).expect("shift preserves validity")
    }

    pub fn direct_sum(&self, other: &GradedComplex) -> Result<GradedComplex, Z2Error> {
        let n = self.len();
        let m = other.len();
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let entries = self
            .d
            .entries()
            .chain(other.d.entries().map(|(r, c)| (r + n, c + n)));
        GradedComplex::from_matrix(gens, Z2Matrix::from_entries(n + m, n + m, entries))
    }

    /// Tensor product over ℤ/2; generator `x ⊗ y` gets id `"x*y"`.
    pub fn tensor(&self, other: &GradedComplex) -> GradedComplex {
        let n = self.len();
        let m = other.len();
        let pos = |i: usize, j: usize| i * m + j;
        let mut gens = Vec::with_capacity(n * m);
        for a in &self.generators {
            for b in &other.generators {
                gens.push(Generator {
                    id: format!("{}*{}", a.id, b.id),
                    degree: a.degree + b.degree,
                });
            }
        }
        let mut d = Z2Matrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..m {
                for &t in self.d.column(i) {
                    d.toggle(pos(t, j), pos(i, j));
                }
                for &t in other.d.column(j) {
                    d.toggle(pos(i, t), pos(i, j));
                }
            }
        }
        GradedComplex::from_matrix(gens, d).expect("tensor preserves validity")
    }
}

#[derive(Clone, Debug)]
pub struct DegreeHomology {
    /// Global generator indices spanning this degree's chains.
    pub gens: Vec<usize>,
    quotient: QuotientBasis,
}

impl DegreeHomology {
    pub fn rank(&self) -> usize {
        self.quotient.quotient_dim()
    }

    /// Representative cycles in local coordinates.
    pub fn representatives(&self) -> &[Z2Vec] {
        self.quotient.representatives()
    }

    /// Coordinates of a local cycle in the representative basis.
    pub fn coordinates(&self, local: &Z2Vec) -> Option<Z2Vec> {
        self.quotient.coordinates(local)
    }
}

/// Chosen homology bases of a complex, degree by degree.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    n_generators: usize,
    degrees: BTreeMap<i64, DegreeHomology>,
}

impl HomologyBasis {
    pub fn degree(&self, k: i64) -> Option<&DegreeHomology> {
        self.degrees.get(&k)
    }

    pub fn rank(&self, k: i64) -> usize {
        self.degrees.get(&k).map_or(0, DegreeHomology::rank)
    }

    pub fn table(&self) -> GHTable {
        GHTable::from_pairs(self.degrees.iter().map(|(k, h)| (*k, h.rank())))
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.degrees.keys().copied()
    }

    /// The `i`-th representative of degree `k` as a vector over all generators.
    pub fn representative_global(&self, k: i64, i: usize) -> Z2Vec {
        let h = &self.degrees[&k];
        let local = &h.representatives()[i];
        Z2Vec::from_support(self.n_generators, local.ones().map(|j| h.gens[j]))
    }

    /// Coordinates of a global cycle of degree `k`. Entries outside degree `k`
    /// must be zero.
    pub fn coordinates_global(&self, k: i64, v: &Z2Vec) -> Option<Z2Vec> {
        let Some(h) = self.degrees.get(&k) else {
            return v.is_zero().then(|| Z2Vec::zeros(0));
        };
        let mut local = Z2Vec::zeros(h.gens.len());
        let mut seen = 0;
        for (j, &g) in h.gens.iter().enumerate() {
            if v.get(g) {
                local.set(j, true);
                seen += 1;
            }
        }
        if seen != v.count_ones() {
            return None;
        }
        h.coordinates(&local)
    }

    /// Matrix of the map induced on homology by a chain map `f` from the
    /// complex of `self` to the complex of `target` raising degree by `shift`.
    /// Block `k` has columns indexed by `self`'s degree-`k` basis and rows by
    /// `target`'s degree-`k + shift` basis. Fails when `f` sends a cycle
    /// outside `Z + B` of the target.
    pub fn induced_map(
        &self,
        target: &HomologyBasis,
        f: &Z2Matrix,
        shift: i64,
    ) -> Option<BTreeMap<i64, Z2Matrix>> {
        let mut out = BTreeMap::new();
        for (&k, h) in &self.degrees {
            let rows = target.rank(k + shift);
            let mut cols = Vec::with_capacity(h.rank());
            for i in 0..h.rank() {
                let image = f.apply(&self.representative_global(k, i));
                let coords = target.coordinates_global(k + shift, &image)?;
                let mut col = Z2Vec::zeros(rows);
                for j in coords.ones() {
                    col.set(j, true);
                }
                cols.push(col);
            }
            if h.rank() > 0 || rows > 0 {
                out.insert(k, Z2Matrix::from_columns(rows, &cols));
            }
        }
        Some(out)
    }
}
