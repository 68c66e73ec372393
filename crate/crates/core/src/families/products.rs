use std::collections::BTreeMap;

use super::{BaseDescriptor, FamilyError, PsiMap};
use crate::spectral::{FilteredComplex, FilteredGenerator};
use crate::z2::{GHTable, Generator, GradedComplex, Z2Matrix};

/// `rank_k = Σ_l rank_l(gh) · betti_{k−l}`.
pub fn kunneth(gh: &GHTable, base_betti: &[usize]) -> GHTable {
    let mut out = GHTable::new();
    for (l, r) in gh.iter() {
        for (i, &b) in base_betti.iter().enumerate() {
            out.add(l + i as i64, r * b);
        }
    }
    out
}

/// Table of the `m`-spun Legendrian: `GH_k ⊕ GH_{k−m}`.
pub fn spin_gh(gh: &GHTable, m: usize) -> GHTable {
    gh.direct_sum(&gh.shifted(m as i64))
}

/// Two-column complex `GH ⊕ GH[m]` on the homology bases of `p`:
/// `(b, x)` in degree `k`, `(a, x)` in degree `k + m`, and
/// `d(a, x) = (b, Ψx)` (plus `(b, x)` when `m = 1`).
pub fn twist_spin_complex(p: &PsiMap, m: usize) -> Result<GradedComplex, FamilyError> {
    let expected = m as i64 - 1;
    if p.m != m || p.degree_shift != expected {
        return Err(FamilyError::DegreeShift {
            m,
            expected,
            found: p.degree_shift,
        });
    }
    let mut gens = Vec::new();
    let mut pos: BTreeMap<(char, i64), usize> = BTreeMap::new();
    for (c, lift) in [('b', 0), ('a', m as i64)] {
        for (&k, labels) in &p.basis {
            pos.insert((c, k), gens.len());
            for i in 0..labels.len() {
                gens.push(Generator {
                    id: format!("{c}:{k}:{i}"),
                    degree: k + lift,
                });
            }
        }
    }
    let n = gens.len();
    let mut d = Z2Matrix::zeros(n, n);
    for (&k, labels) in &p.basis {
        let src = pos[&('a', k)];
        let block = p.block(k);
        if let Some(&dst) = pos.get(&('b', k + expected)) {
            for (r, c) in block.entries() {
                d.toggle(dst + r, src + c);
            }
        }
        if m == 1 {
            let dst = pos[&('b', k)];
            for i in 0..labels.len() {
                d.toggle(dst + i, src + i);
            }
        }
    }
    Ok(GradedComplex::from_matrix(gens, d)?)
}

/// GH of the twist-spun Legendrian along the sphere family with monodromy
/// `p`. `fiber` must be the complex `p` was computed on.
pub fn twist_spin(fiber: &GradedComplex, p: &PsiMap, m: usize) -> Result<GHTable, FamilyError> {
    let gh = fiber.homology()?;
    for k in gh.iter().map(|(k, _)| k).chain(p.basis.keys().copied()) {
        if gh.rank(k) != p.rank(k) {
            return Err(FamilyError::BasisMismatch(format!(
                "fiber has rank {} in degree {k}, Ψ basis has {}",
                gh.rank(k),
                p.rank(k)
            )));
        }
    }
    Ok(twist_spin_complex(p, m)?.homology()?)
}

/// Trivial family `B × fiber` over a base with Morse complex `base`:
/// `d_0` is the fiber differential and `d_1` the base differential.
pub fn product_family(
    fiber: &GradedComplex,
    base: &GradedComplex,
) -> Result<FilteredComplex, FamilyError> {
    if let Some(w) = base.verify_d_squared().witness {
        return Err(FamilyError::Malformed(format!("base complex has d∘d ≠ 0 at {w}")));
    }
    let (nb, nf) = (base.len(), fiber.len());
    let pos = |p: usize, x: usize| p * nf + x;
    let mut gens = Vec::with_capacity(nb * nf);
    for p in base.generators() {
        for x in fiber.generators() {
            gens.push(FilteredGenerator::new(&p.id, &x.id, p.degree, x.degree));
        }
    }
    let total = nb * nf;
    let mut d0 = Z2Matrix::zeros(total, total);
    let mut d1 = Z2Matrix::zeros(total, total);
    for p in 0..nb {
        for (r, c) in fiber.differential().entries() {
            d0.toggle(pos(p, r), pos(p, c));
        }
    }
    for (q, p) in base.differential().entries() {
        for x in 0..nf {
            d1.toggle(pos(q, x), pos(p, x));
        }
    }
    let comps = BTreeMap::from([(0, d0), (1, d1)]);
    Ok(FilteredComplex::new(
        BaseDescriptor::Complex {
            complex: base.to_doc(),
        },
        gens,
        comps,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{dumbbell, psi, sphere_family};

    #[test]
    fn kunneth_examples() {
        let t = GHTable::from_pairs([(1, 1)]);
        assert_eq!(kunneth(&t, &[1, 1]), GHTable::from_pairs([(1, 1), (2, 1)]));
        assert_eq!(kunneth(&t, &[1]), t);
        let a = GHTable::from_pairs([(1, 1), (2, 1), (-1, 1), (0, 1)]);
        let b = GHTable::from_pairs([(1, 2), (0, 2)]);
        assert_ne!(kunneth(&a, &[1, 2, 1]), kunneth(&b, &[1, 2, 1]));
    }

    #[test]
    fn spin_examples() {
        let d = GHTable::from_pairs([(2, 1), (4, 2), (-3, 2)]);
        assert_eq!(
            spin_gh(&d, 1),
            GHTable::from_pairs([(-3, 2), (-2, 2), (2, 1), (3, 1), (4, 2), (5, 2)])
        );
        assert_eq!(spin_gh(&GHTable::new(), 3), GHTable::new());
    }

    #[test]
    fn twist_spin_of_swap() {
        let d = dumbbell(2, 4, 2).unwrap();
        let p = psi(&sphere_family(&d.complex, 1, &d.monodromy).unwrap()).unwrap();
        assert_eq!(
            twist_spin(&d.complex, &p, 1).unwrap(),
            GHTable::from_pairs([(-3, 1), (-2, 1), (2, 1), (3, 1), (4, 1), (5, 1)])
        );
        assert!(matches!(
            twist_spin(&d.complex, &p, 2),
            Err(FamilyError::DegreeShift { .. })
        ));
        let id = PsiMap::identity(1, p.basis.clone());
        assert_eq!(twist_spin(&d.complex, &id, 1).unwrap(), spin_gh(&d.gh, 1));
        let zero = PsiMap::identity(2, p.basis.clone());
        assert_eq!(twist_spin(&d.complex, &zero, 2).unwrap(), spin_gh(&d.gh, 2));
    }

    #[test]
    fn product_over_circle() {
        let g = |id: &str, degree| Generator {
            id: id.into(),
            degree,
        };
        let fiber = GradedComplex::free(vec![g("x", 1)]).unwrap();
        let circle = GradedComplex::free(vec![g("p", 0), g("q", 1)]).unwrap();
        let fc = product_family(&fiber, &circle).unwrap();
        assert_eq!(
            crate::spectral::total_homology(&fc).unwrap(),
            GHTable::from_pairs([(1, 1), (2, 1)])
        );
        assert_eq!(fc.find("q", "x"), Some(1));
    }
}
