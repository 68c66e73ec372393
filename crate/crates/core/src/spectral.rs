//! Filtered bigraded complexes and their spectral sequences.
//!
//! A [`FilteredComplex`] has generators `(base point, fiber generator)` with a
//! bidegree `(l, j)`; component `d_n` sends `(l, j)` to `(l − n, j + n − 1)`.
//! Filtering the total complex by `l` gives the spectral sequence computed by
//! [`pages`]. Fiber degrees are stored in GH normalization, so the total degree
//! `l + j` of a trace generator is directly its GH degree.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::families::BaseDescriptor;
use crate::z2::{
    GHTable, Generator, GradedComplex, QuotientBasis, Z2Error, Z2Matrix, Z2Vec,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("component d_{n} sends {from:?} {from_bidegree:?} to {to:?} {to_bidegree:?}; expected target bidegree (l - {n}, j + {n} - 1)")]
    IllBigraded {
        n: usize,
        from: String,
        to: String,
        from_bidegree: (i64, i64),
        to_bidegree: (i64, i64),
    },
    #[error("component key {0:?} is not a non-negative integer")]
    BadComponentKey(String),
    #[error(transparent)]
    Complex(#[from] Z2Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredGenerator {
    pub id: String,
    pub base_point: String,
    /// Id of the fiber generator this one sits over. Defaults to `id`.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub fiber: String,
    pub base_degree: i64,
    pub fiber_degree: i64,
}

impl FilteredGenerator {
    pub fn new(base_point: &str, fiber: &str, base_degree: i64, fiber_degree: i64) -> Self {
        Self {
            id: format!("{base_point}:{fiber}"),
            base_point: base_point.to_string(),
            fiber: fiber.to_string(),
            base_degree,
            fiber_degree,
        }
    }

    pub fn total_degree(&self) -> i64 {
        self.base_degree + self.fiber_degree
    }

    pub fn fiber_id(&self) -> &str {
        if self.fiber.is_empty() {
            &self.id
        } else {
            &self.fiber
        }
    }
}

/// JSON form of a [`FilteredComplex`]. Each component maps a source id to its
/// target ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub base: BaseDescriptor,
    pub generators: Vec<FilteredGenerator>,
    #[serde(default)]
    pub components: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

/// Bigraded family complex with differential `d = Σ_n d_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    base: BaseDescriptor,
    generators: Vec<FilteredGenerator>,
    index: HashMap<String, usize>,
    components: BTreeMap<usize, Z2Matrix>,
}

impl FilteredComplex {
    /// Validates ids and the bidegree shift of every component entry. Zero
    /// components are dropped.
    pub fn new(
        base: BaseDescriptor,
        generators: Vec<FilteredGenerator>,
        components: BTreeMap<usize, Z2Matrix>,
    ) -> Result<Self, SpectralError> {
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(Z2Error::DuplicateGenerator(g.id.clone()).into());
            }
        }
        let n_gens = generators.len();
        let mut kept = BTreeMap::new();
        for (n, m) in components {
            assert_eq!((m.n_rows(), m.n_cols()), (n_gens, n_gens));
            for (t, s) in m.entries() {
                let (gs, gt) = (&generators[s], &generators[t]);
                let ni = n as i64;
                if gt.base_degree != gs.base_degree - ni || gt.fiber_degree != gs.fiber_degree + ni - 1
                {
                    return Err(SpectralError::IllBigraded {
                        n,
                        from: gs.id.clone(),
                        to: gt.id.clone(),
                        from_bidegree: (gs.base_degree, gs.fiber_degree),
                        to_bidegree: (gt.base_degree, gt.fiber_degree),
                    });
                }
            }
            if !m.is_zero() {
                kept.insert(n, m);
            }
        }
        Ok(Self {
            base,
            generators,
            index,
            components: kept,
        })
    }

    pub fn from_doc(doc: &FamilyDoc) -> Result<Self, SpectralError> {
        let n = doc.generators.len();
        let index: HashMap<&str, usize> = doc
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.id.as_str(), i))
            .collect();
        let mut components = BTreeMap::new();
        for (key, map) in &doc.components {
            let n_comp: usize = key
                .trim()
                .parse()
                .map_err(|_| SpectralError::BadComponentKey(key.clone()))?;
            let mut m = Z2Matrix::zeros(n, n);
            for (src, targets) in map {
                let &s = index
                    .get(src.as_str())
                    .ok_or_else(|| Z2Error::UnknownGenerator(src.clone()))?;
                for tgt in targets {
                    let &t = index
                        .get(tgt.as_str())
                        .ok_or_else(|| Z2Error::UnknownGenerator(tgt.clone()))?;
                    m.toggle(t, s);
                }
            }
            components.insert(n_comp, m);
        }
        Self::new(doc.base.clone(), doc.generators.clone(), components)
    }

    pub fn to_doc(&self) -> FamilyDoc {
        let mut components = BTreeMap::new();
        for (n, m) in &self.components {
            let mut map = BTreeMap::new();
            for s in 0..m.n_cols() {
                let targets: Vec<String> = m
                    .column(s)
                    .iter()
                    .map(|&t| self.generators[t].id.clone())
                    .collect();
                if !targets.is_empty() {
                    map.insert(self.generators[s].id.clone(), targets);
                }
            }
            components.insert(n.to_string(), map);
        }
        FamilyDoc {
            base: self.base.clone(),
            generators: self.generators.clone(),
            components,
        }
    }

    pub fn base(&self) -> &BaseDescriptor {
        &self.base
    }

    pub fn generators(&self) -> &[FilteredGenerator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Index of the generator over `base_point` with fiber generator `fiber`.
    pub fn find(&self, base_point: &str, fiber: &str) -> Option<usize> {
        self.generators
            .iter()
            .position(|g| g.base_point == base_point && g.fiber_id() == fiber)
    }

    pub fn component(&self, n: usize) -> Option<&Z2Matrix> {
        self.components.get(&n)
    }

    pub fn components(&self) -> &BTreeMap<usize, Z2Matrix> {
        &self.components
    }

    /// `max l − min l` over the generators.
    pub fn base_degree_spread(&self) -> usize {
        let ls = self.generators.iter().map(|g| g.base_degree);
        match (ls.clone().min(), ls.max()) {
            (Some(lo), Some(hi)) => (hi - lo) as usize,
            _ => 0,
        }
    }

    /// Total differential `Σ_n d_n`.
    pub fn total_differential(&self) -> Z2Matrix {
        let n = self.len();
        self.components
            .values()
            .fold(Z2Matrix::zeros(n, n), |acc, m| acc.add(m))
    }

    /// The totalized complex, graded by `l + j`.
    pub fn total(&self) -> GradedComplex {
        let gens = self
            .generators
            .iter()
            .map(|g| Generator {
                id: g.id.clone(),
                degree: g.total_degree(),
            })
            .collect();
        GradedComplex::from_matrix(gens, self.total_differential())
            .expect("bigraded components lower total degree by one")
    }

    /// Generators over one base point, in generator order.
    pub fn column(&self, base_point: &str) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.base_point == base_point)
            .map(|(i, _)| i)
            .collect()
    }

    /// The fiber complex over one base point: generators graded by fiber
    /// degree with `d_0` restricted to the column. Ids are the fiber ids.
    pub fn fiber_complex(&self, base_point: &str) -> GradedComplex {
        let col = self.column(base_point);
        let gens = col
            .iter()
            .map(|&i| Generator {
                id: self.generators[i].fiber_id().to_string(),
                degree: self.generators[i].fiber_degree,
            })
            .collect();
        let d0 = self
            .components
            .get(&0)
            .map(|m| m.submatrix(&col, &col))
            .unwrap_or_else(|| Z2Matrix::zeros(col.len(), col.len()));
        GradedComplex::from_matrix(gens, d0).expect("d_0 preserves base point")
    }
}

/// Homology of the totalized complex, graded by total degree.
pub fn total_homology(fc: &FilteredComplex) -> Result<GHTable, SpectralError> {
    Ok(fc.total().homology()?)
}

/// One page `E^r`: ranks by bidegree `(l, j)` and the blocks of `d^r`, keyed by
/// source bidegree and mapping `(l, j) → (l − r, j + r − 1)` in the page's
/// chosen bases.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Page {
    pub ranks: BTreeMap<(i64, i64), usize>,
    pub differentials: BTreeMap<(i64, i64), Z2Matrix>,
}

impl Page {
    pub fn rank(&self, l: i64, j: i64) -> usize {
        self.ranks.get(&(l, j)).copied().unwrap_or(0)
    }

    pub fn differential_is_zero(&self) -> bool {
        self.differentials.values().all(Z2Matrix::is_zero)
    }

    /// Σ_l rank at total degree ν.
    pub fn total_ranks(&self) -> GHTable {
        GHTable::from_pairs(self.ranks.iter().map(|(&(l, j), &r)| (l + j, r)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPages {
    pub pages: BTreeMap<usize, Page>,
    pub e_infinity: BTreeMap<(i64, i64), usize>,
    /// First page index from which every later page equals `E^∞`.
    pub stable_from: usize,
}

impl SpectralPages {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.get(&r)
    }

    pub fn e_infinity_rank(&self, l: i64, j: i64) -> usize {
        self.e_infinity.get(&(l, j)).copied().unwrap_or(0)
    }

    pub fn e_infinity_total(&self) -> GHTable {
        GHTable::from_pairs(self.e_infinity.iter().map(|(&(l, j), &r)| (l + j, r)))
    }

    /// Flat table keyed `"r/l/j"`, with `"inf/l/j"` for `E^∞`.
    pub fn to_json_table(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for (r, page) in &self.pages {
            for (&(l, j), &rank) in &page.ranks {
                out.insert(format!("{r}/{l}/{j}"), rank);
            }
        }
        for (&(l, j), &rank) in &self.e_infinity {
            out.insert(format!("inf/{l}/{j}"), rank);
        }
        out
    }
}

/// Per-total-degree data used to evaluate the `Z^r` / `B^r` recursion.
struct DegreeSlice {
    /// Global generator indices of degree ν.
    gens: Vec<usize>,
    /// Base degree of each local generator.
    levels: Vec<i64>,
}

struct Engine<'a> {
    fc: &'a FilteredComplex,
    d: Z2Matrix,
    slices: BTreeMap<i64, DegreeSlice>,
}

impl<'a> Engine<'a> {
    fn new(fc: &'a FilteredComplex) -> Self {
        let d = fc.total_differential();
        let mut slices: BTreeMap<i64, DegreeSlice> = BTreeMap::new();
        for (i, g) in fc.generators.iter().enumerate() {
            let s = slices.entry(g.total_degree()).or_insert(DegreeSlice {
                gens: Vec::new(),
                levels: Vec::new(),
            });
            s.gens.push(i);
            s.levels.push(g.base_degree);
        }
        Self { fc, d, slices }
    }

    fn dim(&self, nu: i64) -> usize {
        self.slices.get(&nu).map_or(0, |s| s.gens.len())
    }

    /// `{ y ∈ F_q C_ν : d y ∈ F_s C_{ν−1} }` in local coordinates of degree ν.
    fn zgen(&self, nu: i64, q: i64, s: i64) -> Vec<Z2Vec> {
        let Some(src) = self.slices.get(&nu) else {
            return Vec::new();
        };
        let cols: Vec<usize> = (0..src.gens.len()).filter(|&i| src.levels[i] <= q).collect();
        if cols.is_empty() {
            return Vec::new();
        }
        let rows: Vec<usize> = match self.slices.get(&(nu - 1)) {
            Some(tgt) => tgt
                .gens
                .iter()
                .zip(&tgt.levels)
                .filter(|(_, &l)| l > s)
                .map(|(&g, _)| g)
                .collect(),
            None => Vec::new(),
        };
        let global_cols: Vec<usize> = cols.iter().map(|&i| src.gens[i]).collect();
        let block = self.d.submatrix(&rows, &global_cols);
        block
            .reduce()
            .kernel_basis
            .into_iter()
            .map(|k| Z2Vec::from_support(src.gens.len(), k.ones().map(|c| cols[c])))
            .collect()
    }

    /// Image under `d` of local vectors of degree ν, as local vectors of ν − 1.
    fn apply_d(&self, nu: i64, vs: &[Z2Vec]) -> Vec<Z2Vec> {
        let src = &self.slices[&nu];
        let tgt_dim = self.dim(nu - 1);
        let tgt_pos: HashMap<usize, usize> = self
            .slices
            .get(&(nu - 1))
            .map(|t| t.gens.iter().enumerate().map(|(i, &g)| (g, i)).collect())
            .unwrap_or_default();
        vs.iter()
            .map(|v| {
                let mut out = Z2Vec::zeros(tgt_dim);
                for c in v.ones() {
                    for &r in self.d.column(src.gens[c]) {
                        out.toggle(tgt_pos[&r]);
                    }
                }
                out
            })
            .collect()
    }

    /// Quotient `Z^r_p / (Z^{r−1}_{p−1} + B^r_p)` at total degree ν; `r = None`
    /// means `r = ∞`.
    fn term(&self, nu: i64, p: i64, r: Option<i64>) -> QuotientBasis {
        const NEG: i64 = i64::MIN / 4;
        const POS: i64 = i64::MAX / 4;
        let dim = self.dim(nu);
        let (z, z_prev, b) = match r {
            Some(r) => {
                let z = self.zgen(nu, p, p - r);
                let z_prev = self.zgen(nu, p - 1, p - r);
                let b = if self.slices.contains_key(&(nu + 1)) {
                    self.apply_d(nu + 1, &self.zgen(nu + 1, p + r - 1, p))
                } else {
                    Vec::new()
                };
                (z, z_prev, b)
            }
            None => {
                let z = self.zgen(nu, p, NEG);
                let z_prev = self.zgen(nu, p - 1, NEG);
                let b = if self.slices.contains_key(&(nu + 1)) {
                    self.apply_d(nu + 1, &self.zgen(nu + 1, POS, p))
                } else {
                    Vec::new()
                };
                (z, z_prev, b)
            }
        };
        let mut q = QuotientBasis::new(dim, z.len());
        for v in z_prev.iter().chain(&b) {
            q.add_to_subspace(v);
        }
        for v in &z {
            q.push_representative(v);
        }
        q
    }

    fn levels(&self) -> Vec<i64> {
        let mut ls: Vec<i64> = self.fc.generators.iter().map(|g| g.base_degree).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    fn page(&self, r: i64) -> Page {
        let mut terms: BTreeMap<(i64, i64), QuotientBasis> = BTreeMap::new();
        let levels = self.levels();
        for &nu in self.slices.keys() {
            for &p in &levels {
                let q = self.term(nu, p, Some(r));
                if q.quotient_dim() > 0 {
                    terms.insert((p, nu), q);
                }
            }
        }
        let mut page = Page::default();
        for (&(p, nu), q) in &terms {
            page.ranks.insert((p, nu - p), q.quotient_dim());
        }
        for (&(p, nu), q) in &terms {
            let images = self.apply_d(nu, q.representatives());
            let target = terms.get(&(p - r, nu - 1));
            let rows = target.map_or(0, QuotientBasis::quotient_dim);
            let cols: Vec<Z2Vec> = images
                .iter()
                .map(|y| match target {
                    Some(t) => t
                        .coordinates(y)
                        .expect("d of a Z^r representative lies in Z^r of the target"),
                    None => {
                        debug_assert!(
                            self.dim(nu - 1) == 0 || {
                                // Target term vanishes: y must die in the quotient.
                                let tq = self.term(nu - 1, p - r, Some(r));
                                tq.coordinates(y).is_some()
                            }
                        );
                        Z2Vec::zeros(0)
                    }
                })
                .collect();
            page.differentials
                .insert((p, nu - p), Z2Matrix::from_columns(rows, &cols));
        }
        page
    }

    fn infinity(&self) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        let levels = self.levels();
        for &nu in self.slices.keys() {
            for &p in &levels {
                let q = self.term(nu, p, None);
                if q.quotient_dim() > 0 {
                    out.insert((p, nu - p), q.quotient_dim());
                }
            }
        }
        out
    }
}

/// Spectral sequence of the filtration by base degree: pages `1..=max(r_max, 2)`
/// and `E^∞`.
pub fn pages(fc: &FilteredComplex, r_max: usize) -> Result<SpectralPages, SpectralError> {
    if let Some(w) = fc.total().verify_d_squared().witness {
        return Err(Z2Error::DSquaredNonZero(w).into());
    }
    let engine = Engine::new(fc);
    let last = r_max.max(2);
    let pages: BTreeMap<usize, Page> = (1..=last)
        .map(|r| (r, engine.page(r as i64)))
        .collect();
    let e_infinity = engine.infinity();
    // Ranks never grow with r, so the first page with the ranks of E^∞ is
    // where the sequence stops. Past the base spread every page is E^∞.
    let bound = fc.base_degree_spread() + 1;
    let stable_from = pages
        .iter()
        .find(|(_, p)| p.ranks == e_infinity)
        .map_or(bound, |(&r, _)| r.min(bound));
    Ok(SpectralPages {
        pages,
        e_infinity,
        stable_from,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceCheck {
    pub ok: bool,
    pub failing_degree: Option<i64>,
}

/// Checks `Σ_l rank E^∞_{l, ν−l} = rank H_ν(total)` for every ν.
pub fn convergence_check(p: &SpectralPages, t: &GHTable) -> ConvergenceCheck {
    let e_inf = p.e_infinity_total();
    let mut degrees: Vec<i64> = e_inf.iter().map(|(k, _)| k).chain(t.iter().map(|(k, _)| k)).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let failing_degree = degrees.into_iter().find(|&nu| e_inf.rank(nu) != t.rank(nu));
    ConvergenceCheck {
        ok: failing_degree.is_none(),
        failing_degree,
    }
}

/// True when every page from `E^2` on equals `E^2`.
///
/// Ranks are non-increasing in `r`, so this holds exactly when `E^2` and
/// `E^∞` have the same ranks at every bidegree.
pub fn collapse_check(p: &SpectralPages) -> bool {
    let Some(e2) = p.page(2) else {
        return false;
    };
    e2.ranks == p.e_infinity
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere1() -> BaseDescriptor {
        BaseDescriptor::Sphere { m: 1 }
    }

    #[test]
    fn trivial_filtration_page_one_is_fiber_homology() {
        // Single column: x (1) -> y (0), plus z (2) free.
        let gens = vec![
            FilteredGenerator::new("b", "x", 0, 1),
            FilteredGenerator::new("b", "y", 0, 0),
            FilteredGenerator::new("b", "z", 0, 2),
        ];
        let d0 = Z2Matrix::from_entries(3, 3, [(1, 0)]);
        let fc = FilteredComplex::new(sphere1(), gens, BTreeMap::from([(0, d0)])).unwrap();
        let sp = pages(&fc, 3).unwrap();
        let e1 = &sp.pages[&1].ranks;
        assert_eq!(e1, &BTreeMap::from([((0, 2), 1)]));
        assert_eq!(&sp.e_infinity, e1);
        assert_eq!(sp.stable_from, 1);
        assert!(collapse_check(&sp));
        let t = total_homology(&fc).unwrap();
        assert!(convergence_check(&sp, &t).ok);
    }

    #[test]
    fn constant_circle_family_two_generator_elimination() {
        // (a, x) at (1, k), (b, x) at (0, k), d_1 (a,x) = (b, x + x) = 0.
        let k = 3;
        let gens = vec![
            FilteredGenerator::new("a", "x", 1, k),
            FilteredGenerator::new("b", "x", 0, k),
        ];
        let fc = FilteredComplex::new(sphere1(), gens, BTreeMap::new()).unwrap();
        let t = total_homology(&fc).unwrap();
        assert_eq!(t, GHTable::from_pairs([(k, 1), (k + 1, 1)]));
    }

    #[test]
    fn rejects_ill_bigraded_component() {
        let gens = vec![
            FilteredGenerator::new("a", "x", 1, 0),
            FilteredGenerator::new("b", "x", 0, 0),
        ];
        // d_1 must raise fiber degree by 0, so (1,0) -> (0,0) is fine for n=1,
        // but listing it under d_2 is not.
        let m = Z2Matrix::from_entries(2, 2, [(1, 0)]);
        let err = FilteredComplex::new(sphere1(), gens, BTreeMap::from([(2, m)]));
        match err {
            Err(SpectralError::IllBigraded { from, to, .. }) => {
                assert_eq!(from, "a:x");
                assert_eq!(to, "b:x");
            }
            other => panic!("expected IllBigraded, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_d2_does_not_collapse() {
        // x at (2, 0) hits y at (0, 1) through d_2 only.
        let gens = vec![
            FilteredGenerator::new("p", "x", 2, 0),
            FilteredGenerator::new("q", "y", 0, 1),
        ];
        let d2 = Z2Matrix::from_entries(2, 2, [(1, 0)]);
        let fc = FilteredComplex::new(
            BaseDescriptor::Sphere { m: 2 },
            gens,
            BTreeMap::from([(2, d2)]),
        )
        .unwrap();
        let sp = pages(&fc, 3).unwrap();
        assert_eq!(sp.pages[&2].rank(2, 0), 1);
        assert!(!sp.pages[&2].differential_is_zero());
        assert!(sp.e_infinity.is_empty());
        assert_eq!(sp.stable_from, 3);
        assert!(!collapse_check(&sp));
        assert!(convergence_check(&sp, &total_homology(&fc).unwrap()).ok);
    }

    #[test]
    fn corrupted_e_infinity_fails_at_that_degree() {
        let gens = vec![FilteredGenerator::new("b", "x", 0, 5)];
        let fc = FilteredComplex::new(sphere1(), gens, BTreeMap::new()).unwrap();
        let mut sp = pages(&fc, 2).unwrap();
        sp.e_infinity.insert((0, 7), 1);
        let c = convergence_check(&sp, &total_homology(&fc).unwrap());
        assert!(!c.ok);
        assert_eq!(c.failing_degree, Some(7));
    }

    #[test]
    fn json_table_keys() {
        let gens = vec![FilteredGenerator::new("b", "x", 0, -1)];
        let fc = FilteredComplex::new(sphere1(), gens, BTreeMap::new()).unwrap();
        let table = pages(&fc, 2).unwrap().to_json_table();
        assert_eq!(table.get("1/0/-1"), Some(&1));
        assert_eq!(table.get("inf/0/-1"), Some(&1));
    }
}
