use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::monodromy::{check_chain_map, check_invertible};
use super::{BaseDescriptor, FamilyError, MonodromyData};
use crate::spectral::{FilteredComplex, FilteredGenerator};
use crate::z2::{GradedComplex, HomologyBasis, Z2Matrix};

/// Family over `S^m` with maximum `a` and minimum `b`: two copies of the
/// fiber, `d_0` the fiber differential on each, and
/// `d_1(a, x) = (b, x + μx)` for `m = 1`, `d_m(a, x) = (b, θx)` for `m ≥ 2`.
pub fn sphere_family(
    fiber: &GradedComplex,
    m: usize,
    data: &MonodromyData,
) -> Result<FilteredComplex, FamilyError> {
    if m == 0 {
        return Err(FamilyError::Precondition("sphere dimension m must be at least 1".into()));
    }
    if let Some(w) = fiber.verify_d_squared().witness {
        return Err(crate::z2::Z2Error::DSquaredNonZero(w).into());
    }
    let map = data.to_matrix(fiber, m as i64 - 1, m == 1)?;
    check_chain_map(fiber, fiber, &map)?;
    if m == 1 {
        check_invertible(fiber, &map)?;
    }
    let n = fiber.len();
    let mut gens = Vec::with_capacity(2 * n);
    for (point, l) in [("a", m as i64), ("b", 0)] {
        for g in fiber.generators() {
            gens.push(FilteredGenerator::new(point, &g.id, l, g.degree));
        }
    }
    let d = fiber.differential();
    let d0 = Z2Matrix::from_entries(
        2 * n,
        2 * n,
        d.entries().flat_map(|(r, c)| [(r, c), (r + n, c + n)]),
    );
    let mut dm = Z2Matrix::zeros(2 * n, 2 * n);
    for (r, c) in map.entries() {
        dm.toggle(n + r, c);
    }
    if m == 1 {
        for i in 0..n {
            dm.toggle(n + i, i);
        }
    }
    let comps = BTreeMap::from([(0, d0), (m, dm)]);
    Ok(FilteredComplex::new(BaseDescriptor::Sphere { m }, gens, comps)?)
}

/// Fiber complex over one base point.
pub fn fiber_of(fc: &FilteredComplex, base_point: &str) -> GradedComplex {
    fc.fiber_complex(base_point)
}

fn sphere_dim(fc: &FilteredComplex) -> Result<usize, FamilyError> {
    match fc.base() {
        BaseDescriptor::Sphere { m } => Ok(*m),
        other => Err(FamilyError::WrongBase {
            expected: "sphere".into(),
            found: format!("{other:?}"),
        }),
    }
}

/// The chain map `ψ(x) = ⟨d_m(a, x), b⟩ (+ x when m = 1)` on the fiber,
/// after checking `d_0ψ = ψd_0`.
pub fn psi_chain(fc: &FilteredComplex) -> Result<(GradedComplex, Z2Matrix), FamilyError> {
    let m = sphere_dim(fc)?;
    let fa = fc.fiber_complex("a");
    let fb = fc.fiber_complex("b");
    if fa != fb {
        return Err(FamilyError::Malformed(
            "fiber complexes over a and b differ".into(),
        ));
    }
    let (ca, cb) = (fc.column("a"), fc.column("b"));
    if ca.len() + cb.len() != fc.len() {
        return Err(FamilyError::Malformed(
            "generators over points other than a and b".into(),
        ));
    }
    let mut psi = fc
        .component(m)
        .map(|d| d.submatrix(&cb, &ca))
        .unwrap_or_else(|| Z2Matrix::zeros(cb.len(), ca.len()));
    if m == 1 {
        psi = psi.add(&Z2Matrix::identity(ca.len()));
    }
    check_chain_map(&fa, &fb, &psi)?;
    Ok((fa, psi))
}

/// `Ψ` on fiber homology in the bases chosen by
/// [`GradedComplex::homology_basis`]: block `k` maps `GH_k` to
/// `GH_{k+m−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiMap {
    pub m: usize,
    /// Target degree minus source degree, `m − 1`.
    pub degree_shift: i64,
    #[serde(with = "super::dense_blocks")]
    pub blocks: BTreeMap<i64, Z2Matrix>,
    /// Labels of the homology basis in each degree (cycle supports joined
    /// by `+`).
    pub basis: BTreeMap<i64, Vec<String>>,
}

impl PsiMap {
    pub fn rank(&self, k: i64) -> usize {
        self.basis.get(&k).map_or(0, Vec::len)
    }

    /// Block `k`, zero when absent.
    pub fn block(&self, k: i64) -> Z2Matrix {
        self.blocks
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Z2Matrix::zeros(self.rank(k + self.degree_shift), self.rank(k)))
    }

    pub fn identity(m: usize, basis: BTreeMap<i64, Vec<String>>) -> Self {
        let blocks = if m == 1 {
            basis.iter().map(|(&k, v)| (k, Z2Matrix::identity(v.len()))).collect()
        } else {
            BTreeMap::new()
        };
        Self {
            m,
            degree_shift: m as i64 - 1,
            blocks,
            basis,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.degree_shift == 0
            && self
                .basis
                .iter()
                .all(|(&k, v)| self.block(k) == Z2Matrix::identity(v.len()))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Z2Matrix::is_zero)
    }

    /// `Ψ^k` for a degree-preserving map.
    pub fn pow(&self, k: u32) -> PsiMap {
        assert_eq!(self.degree_shift, 0);
        let blocks = self
            .basis
            .keys()
            .map(|&d| (d, self.block(d).pow(k)))
            .filter(|(_, b)| b.n_rows() > 0)
            .collect();
        PsiMap {
            blocks,
            ..self.clone()
        }
    }

    pub fn check_shape(&self) -> Result<(), FamilyError> {
        if self.degree_shift != self.m as i64 - 1 {
            return Err(FamilyError::DegreeShift {
                m: self.m,
                expected: self.m as i64 - 1,
                found: self.degree_shift,
            });
        }
        for (&k, b) in &self.blocks {
            let want = (self.rank(k + self.degree_shift), self.rank(k));
            if (b.n_rows(), b.n_cols()) != want && !(b.n_rows() == 0 && want.0 == 0) {
                return Err(FamilyError::Malformed(format!(
                    "Ψ block {k} is {}x{}, basis needs {}x{}",
                    b.n_rows(),
                    b.n_cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn basis_labels(fiber: &GradedComplex, basis: &HomologyBasis) -> BTreeMap<i64, Vec<String>> {
    let mut out = BTreeMap::new();
    for k in basis.degrees() {
        let r = basis.rank(k);
        if r == 0 {
            continue;
        }
        let labels = (0..r)
            .map(|i| {
                basis
                    .representative_global(k, i)
                    .ones()
                    .map(|g| fiber.generators()[g].id.as_str())
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect();
        out.insert(k, labels);
    }
    out
}

/// Map induced on homology by a chain map `f` of the given degree shift.
pub(crate) fn induced(
    fiber: &GradedComplex,
    f: &Z2Matrix,
    shift: i64,
) -> Result<(BTreeMap<i64, Z2Matrix>, BTreeMap<i64, Vec<String>>), FamilyError> {
    let basis = fiber.homology_basis()?;
    let blocks = basis
        .induced_map(&basis, f, shift)
        .ok_or_else(|| FamilyError::NotChainMap {
            witness: "cycle mapped outside Z + B".into(),
        })?
        .into_iter()
        .filter(|(_, b)| b.n_rows() > 0 && b.n_cols() > 0)
        .collect();
    Ok((blocks, basis_labels(fiber, &basis)))
}

pub fn psi(fc: &FilteredComplex) -> Result<PsiMap, FamilyError> {
    let m = sphere_dim(fc)?;
    let (fiber, chain) = psi_chain(fc)?;
    let (blocks, basis) = induced(&fiber, &chain, m as i64 - 1)?;
    Ok(PsiMap {
        m,
        degree_shift: m as i64 - 1,
        blocks,
        basis,
    })
}

/// `p1 ∘ p2` for loops (`m = 1`), `p1 + p2` for higher spheres.
pub fn compose(p1: &PsiMap, p2: &PsiMap) -> Result<PsiMap, FamilyError> {
    p1.check_shape()?;
    p2.check_shape()?;
    if p1.m != p2.m {
        return Err(FamilyError::BasisMismatch(format!("m = {} vs m = {}", p1.m, p2.m)));
    }
    if p1.basis != p2.basis {
        return Err(FamilyError::BasisMismatch("homology bases differ".into()));
    }
    let blocks = p1
        .basis
        .keys()
        .map(|&k| {
            let b = if p1.m == 1 {
                p1.block(k).mul(&p2.block(k))
            } else {
                p1.block(k).add(&p2.block(k))
            };
            (k, b)
        })
        .filter(|(_, b)| b.n_rows() > 0 && b.n_cols() > 0)
        .collect();
    Ok(PsiMap {
        blocks,
        ..p1.clone()
    })
}

/// Non-contractibility verdict derived from `Ψ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub nontrivial: bool,
    pub order_lower_bound: usize,
    /// Basis of the highest degree where `Ψ` is not the trivial map.
    pub basis: String,
    pub paper_claim: String,
    pub m: usize,
    /// Degrees carrying homology on which `Ψ` acts trivially.
    pub trivial_degrees: Vec<i64>,
}

const ORDER_CAP: u32 = 1 << 12;

pub fn certificate(p: &PsiMap) -> Certificate {
    let trivial_block = |k: i64| {
        if p.m == 1 {
            p.block(k) == Z2Matrix::identity(p.rank(k))
        } else {
            p.block(k).is_zero()
        }
    };
    let degrees: Vec<i64> = p.basis.keys().copied().collect();
    let trivial_degrees: Vec<i64> = degrees.iter().copied().filter(|&k| trivial_block(k)).collect();
    let highest = degrees.iter().rev().find(|&&k| !trivial_block(k));
    let nontrivial = highest.is_some();
    let basis = highest.map(|k| p.basis[k].join(",")).unwrap_or_default();
    let order_lower_bound = if p.m == 1 && nontrivial {
        let invertible = degrees.iter().all(|&k| p.block(k).is_invertible());
        if invertible {
            (2..=ORDER_CAP)
                .find(|&k| p.pow(k).is_identity())
                .unwrap_or(ORDER_CAP) as usize
        } else {
            // A non-invertible Ψ cannot come from a loop; the best bound is
            // that no power is the identity.
            ORDER_CAP as usize
        }
    } else {
        1
    };
    let paper_claim = match (nontrivial, p.m) {
        (true, 1) => "loop not contractible in Legendrian category".to_string(),
        (true, m) => format!("map of S^{m} not null-homotopic in Legendrian category"),
        (false, 1) => "no obstruction: Ψ is the identity".to_string(),
        (false, _) => "no obstruction: Ψ is zero".to_string(),
    };
    Certificate {
        nontrivial,
        order_lower_bound,
        basis,
        paper_claim,
        m: p.m,
        trivial_degrees,
    }
}

/// Pullback of a circle family along the `k`-fold cover: `μ ↦ μ^k`.
pub fn cover_pullback(fc: &FilteredComplex, k: u32) -> Result<FilteredComplex, FamilyError> {
    let m = sphere_dim(fc)?;
    if m != 1 {
        return Err(FamilyError::Precondition(format!(
            "cover pullback needs a family over S^1, got S^{m}"
        )));
    }
    if k == 0 {
        return Err(FamilyError::Precondition("cover degree must be at least 1".into()));
    }
    // For m = 1, ψ(x) = x + (x + μx) = μx.
    let (fiber, mu) = psi_chain(fc)?;
    sphere_family(&fiber, 1, &MonodromyData::from_matrix(&fiber, &mu.pow(k), 0))
}
