use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::monodromy::check_chain_map;
use super::sphere::psi_chain;
use super::{interval_sphere_point, BaseDescriptor, FamilyError};
use crate::spectral::{FilteredComplex, FilteredGenerator};
use crate::z2::{GradedComplex, Z2Matrix};

/// Family over `[−1, 1]` whose fibers over `−1` and `0` are `source` and over
/// `1` is `target`, with `d_1(0, x) = (−1, x) + (1, αx)`.
pub fn interval_family(
    source: &GradedComplex,
    target: &GradedComplex,
    alpha: &Z2Matrix,
) -> Result<FilteredComplex, FamilyError> {
    if (alpha.n_rows(), alpha.n_cols()) != (target.len(), source.len()) {
        return Err(FamilyError::Malformed(format!(
            "α is {}x{}, fibers need {}x{}",
            alpha.n_rows(),
            alpha.n_cols(),
            target.len(),
            source.len()
        )));
    }
    check_chain_map(source, target, alpha)?;
    let (ns, nt) = (source.len(), target.len());
    let mut gens = Vec::with_capacity(2 * ns + nt);
    for (point, l, fiber) in [("-1", 0, source), ("0", 1, source), ("1", 0, target)] {
        for g in fiber.generators() {
            gens.push(FilteredGenerator::new(point, &g.id, l, g.degree));
        }
    }
    let total = gens.len();
    let offsets = [0, ns, 2 * ns];
    let mut d0 = Z2Matrix::zeros(total, total);
    for (fiber, off) in [(source, offsets[0]), (source, offsets[1]), (target, offsets[2])] {
        for (r, c) in fiber.differential().entries() {
            d0.toggle(off + r, off + c);
        }
    }
    let mut d1 = Z2Matrix::zeros(total, total);
    for i in 0..ns {
        d1.toggle(i, ns + i);
    }
    for (r, c) in alpha.entries() {
        d1.toggle(2 * ns + r, ns + c);
    }
    let comps = BTreeMap::from([(0, d0), (1, d1)]);
    Ok(FilteredComplex::new(BaseDescriptor::Interval, gens, comps)?)
}

/// The continuation map of an interval family and what it does on homology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Continuation {
    pub source: GradedComplex,
    pub target: GradedComplex,
    /// `α(x) = ⟨d_1(0, x), 1⟩`.
    pub alpha: Z2Matrix,
    /// Induced map on homology, block `k` from `H_k(source)` to `H_k(target)`.
    pub induced: BTreeMap<i64, Z2Matrix>,
    pub quasi_isomorphism: bool,
}

pub fn continuation(fc: &FilteredComplex) -> Result<Continuation, FamilyError> {
    if *fc.base() != BaseDescriptor::Interval {
        return Err(FamilyError::WrongBase {
            expected: "interval".into(),
            found: format!("{:?}", fc.base()),
        });
    }
    if let Some(w) = fc.total().verify_d_squared().witness {
        return Err(FamilyError::NotChainMap { witness: w });
    }
    let (c0, c1) = (fc.column("0"), fc.column("1"));
    let source = fc.fiber_complex("0");
    let target = fc.fiber_complex("1");
    let alpha = fc
        .component(1)
        .map(|d| d.submatrix(&c1, &c0))
        .unwrap_or_else(|| Z2Matrix::zeros(c1.len(), c0.len()));
    check_chain_map(&source, &target, &alpha)?;
    let hs = source.homology_basis()?;
    let ht = target.homology_basis()?;
    let induced = hs.induced_map(&ht, &alpha, 0).ok_or_else(|| FamilyError::NotChainMap {
        witness: "cycle mapped outside Z + B".into(),
    })?;
    let degrees: Vec<i64> = hs.degrees().chain(ht.degrees()).collect();
    let quasi_isomorphism = degrees.iter().all(|&k| {
        hs.rank(k) == ht.rank(k)
            && induced
                .get(&k)
                .map_or(hs.rank(k) == 0, |b| b.n_rows() == 0 || b.is_invertible())
    });
    Ok(Continuation {
        source,
        target,
        alpha,
        induced,
        quasi_isomorphism,
    })
}

fn sphere_m(fc: &FilteredComplex) -> Result<usize, FamilyError> {
    match fc.base() {
        BaseDescriptor::Sphere { m } => Ok(*m),
        other => Err(FamilyError::WrongBase {
            expected: "sphere".into(),
            found: format!("{other:?}"),
        }),
    }
}

/// Raw `d_m` block `(a, ·) → (b, ·)` of a sphere family.
fn top_block(fc: &FilteredComplex, m: usize) -> Z2Matrix {
    let (ca, cb) = (fc.column("a"), fc.column("b"));
    fc.component(m)
        .map(|d| d.submatrix(&cb, &ca))
        .unwrap_or_else(|| Z2Matrix::zeros(cb.len(), ca.len()))
}

/// Family over `[−1, 1] × S^m` joining `f0` (slices `−1` and `0`) to `f1`
/// (slice `1`). The interval part is `d_1((0,c), x) = ((−1,c), x) + ((1,c), x)`
/// and `d_{m+1}((0,a), x) = ((1,b), h_plus x) + ((−1,b), h_minus x)`, where
/// both maps raise fiber degree by `m`.
pub fn homotopy_family(
    f0: &FilteredComplex,
    f1: &FilteredComplex,
    h_plus: &Z2Matrix,
    h_minus: Option<&Z2Matrix>,
) -> Result<FilteredComplex, FamilyError> {
    let m = sphere_m(f0)?;
    if sphere_m(f1)? != m {
        return Err(FamilyError::Malformed("f0 and f1 live over different spheres".into()));
    }
    let fiber = f0.fiber_complex("a");
    for (fc, p) in [(f0, "b"), (f1, "a"), (f1, "b")] {
        if fc.fiber_complex(p) != fiber {
            return Err(FamilyError::Malformed(format!("fiber over {p} differs")));
        }
    }
    let n = fiber.len();
    let zero = Z2Matrix::zeros(n, n);
    let h_minus = h_minus.unwrap_or(&zero);
    for h in [h_plus, h_minus] {
        if (h.n_rows(), h.n_cols()) != (n, n) {
            return Err(FamilyError::Malformed("homotopy must be square on the fiber".into()));
        }
    }
    let m_i = m as i64;
    // Column order: (n, c) for n in −1, 0, 1 and c in a, b.
    let slot = |s: usize, c: usize| (2 * s + c) * n;
    let mut gens = Vec::with_capacity(6 * n);
    for t in [-1i64, 0, 1] {
        let l = if t == 0 { 1 } else { 0 };
        for (c, name) in ['a', 'b'].into_iter().enumerate() {
            let point = interval_sphere_point(t, name);
            let l = if c == 0 { l + m_i } else { l };
            for g in fiber.generators() {
                gens.push(FilteredGenerator::new(&point, &g.id, l, g.degree));
            }
        }
    }
    let total = 6 * n;
    let mut comps: BTreeMap<usize, Z2Matrix> = BTreeMap::new();
    let mut put = |k: usize, row0: usize, col0: usize, block: &Z2Matrix| {
        let d = comps.entry(k).or_insert_with(|| Z2Matrix::zeros(total, total));
        for (r, c) in block.entries() {
            d.toggle(row0 + r, col0 + c);
        }
    };
    let slices = [f0, f0, f1];
    for (s, fc) in slices.iter().enumerate() {
        let top = top_block(fc, m);
        for c in 0..2 {
            put(0, slot(s, c), slot(s, c), fiber.differential());
        }
        put(m, slot(s, 1), slot(s, 0), &top);
    }
    let id = Z2Matrix::identity(n);
    for c in 0..2 {
        put(1, slot(0, c), slot(1, c), &id);
        put(1, slot(2, c), slot(1, c), &id);
    }
    put(m + 1, slot(2, 1), slot(1, 0), h_plus);
    put(m + 1, slot(0, 1), slot(1, 0), h_minus);
    Ok(FilteredComplex::new(
        BaseDescriptor::IntervalSphere { m },
        gens,
        comps,
    )?)
}

/// Outcome of [`verify_homotopy`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyCheck {
    pub ok: bool,
    pub d_squared: bool,
    /// `ψ_{f0} + ψ_{f1} = d_0H + Hd_0` as matrices.
    pub chain_homotopy: bool,
    pub witness: Option<String>,
}

/// Checks that `htpy`, a family over `[−1, 1] × S^m` restricting to `f0`
/// and `f1`, exhibits `ψ_{f0}` and `ψ_{f1}` as chain homotopic through
/// `H(x) = ⟨d_{m+1}((0,a), x), (1,b)⟩`.
pub fn verify_homotopy(
    f0: &FilteredComplex,
    f1: &FilteredComplex,
    htpy: &FilteredComplex,
) -> Result<HomotopyCheck, FamilyError> {
    let m = sphere_m(f0)?;
    if sphere_m(f1)? != m {
        return Err(FamilyError::Malformed("f0 and f1 live over different spheres".into()));
    }
    if *htpy.base() != (BaseDescriptor::IntervalSphere { m }) {
        return Err(FamilyError::WrongBase {
            expected: format!("interval × S^{m}"),
            found: format!("{:?}", htpy.base()),
        });
    }
    let (fiber, psi0) = psi_chain(f0)?;
    let (fiber1, psi1) = psi_chain(f1)?;
    if fiber1 != fiber {
        return Err(FamilyError::Malformed("f0 and f1 have different fibers".into()));
    }
    let col = |t: i64, c: char| htpy.column(&interval_sphere_point(t, c));
    let cols: Vec<Vec<usize>> = [-1, 0, 1]
        .into_iter()
        .flat_map(|t| [col(t, 'a'), col(t, 'b')])
        .collect();
    if cols.iter().map(Vec::len).sum::<usize>() != htpy.len() {
        return Err(FamilyError::Malformed("generators over unknown base points".into()));
    }
    let block = |k: usize, rows: &[usize], cs: &[usize]| {
        htpy.component(k)
            .map(|d| d.submatrix(rows, cs))
            .unwrap_or_else(|| Z2Matrix::zeros(rows.len(), cs.len()))
    };
    // Slices must be f0, f0, f1.
    for (s, (fc, name)) in [(f0, "f0"), (f0, "f0"), (f1, "f1")].into_iter().enumerate() {
        let (ca, cb) = (&cols[2 * s], &cols[2 * s + 1]);
        for p in ['a', 'b'] {
            if htpy.fiber_complex(&interval_sphere_point(s as i64 - 1, p)) != fiber {
                return Err(FamilyError::Malformed(format!(
                    "fiber over ({},{p}) differs from {name}",
                    s as i64 - 1
                )));
            }
        }
        if block(m, cb, ca) != top_block(fc, m) {
            return Err(FamilyError::Malformed(format!(
                "slice {} does not restrict to {name}",
                s as i64 - 1
            )));
        }
    }
    // Interval differential: (0,c) → (−1,c) + (1,c).
    let id = Z2Matrix::identity(fiber.len());
    for c in 0..2 {
        if block(1, &cols[c], &cols[2 + c]) != id || block(1, &cols[4 + c], &cols[2 + c]) != id {
            return Err(FamilyError::Malformed(
                "interval d_1 is not ((0,c), x) → ((−1,c), x) + ((1,c), x)".into(),
            ));
        }
    }
    let h = block(m + 1, &cols[5], &cols[2]);
    let d_squared = htpy.total().verify_d_squared();
    let d = fiber.differential();
    let lhs = psi0.add(&psi1);
    let rhs = d.mul(&h).add(&h.mul(d));
    let diff = lhs.add(&rhs);
    let bad = (0..fiber.len()).find(|&c| !diff.column(c).is_empty());
    let chain_homotopy = bad.is_none();
    let witness = d_squared
        .witness
        .clone()
        .or_else(|| bad.map(|c| fiber.generators()[c].id.clone()));
    Ok(HomotopyCheck {
        ok: d_squared.ok && chain_homotopy,
        d_squared: d_squared.ok,
        chain_homotopy,
        witness,
    })
}
