use serde::{Deserialize, Serialize};

use super::sphere::{induced, psi, psi_chain};
use super::FamilyError;
use crate::spectral::{FilteredComplex, FilteredGenerator};
use crate::z2::Z2Matrix;

const MINUS: &str = "[-]";
const PLUS: &str = "[+]";

/// The 1-spun family: each generator `c` becomes `c[−]` (same fiber degree)
/// and `c[+]` (fiber degree + 1), and every component is copied onto both
/// blocks with nothing between them.
pub fn spin_family(fc: &FilteredComplex) -> Result<FilteredComplex, FamilyError> {
    if fc.base().sphere_dim().is_none() {
        return Err(FamilyError::WrongBase {
            expected: "sphere".into(),
            found: format!("{:?}", fc.base()),
        });
    }
    let n = fc.len();
    let mut gens = Vec::with_capacity(2 * n);
    for (suffix, lift) in [(MINUS, 0), (PLUS, 1)] {
        for g in fc.generators() {
            gens.push(FilteredGenerator::new(
                &g.base_point,
                &format!("{}{suffix}", g.fiber_id()),
                g.base_degree,
                g.fiber_degree + lift,
            ));
        }
    }
    let comps = fc
        .components()
        .iter()
        .map(|(&k, d)| {
            let entries = d.entries().flat_map(|(r, c)| [(r, c), (r + n, c + n)]);
            (k, Z2Matrix::from_entries(2 * n, 2 * n, entries))
        })
        .collect();
    Ok(FilteredComplex::new(fc.base().clone(), gens, comps)?)
}

/// Outcome of [`validate_spin_blocks`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCheck {
    pub ok: bool,
    pub failure: Option<String>,
}

impl BlockCheck {
    fn fail(msg: String) -> Self {
        Self {
            ok: false,
            failure: Some(msg),
        }
    }
}

/// Pairs `(c[−], c[+])` by index, or a description of why they do not pair.
fn pairing(spun: &FilteredComplex) -> Result<Vec<(usize, usize)>, String> {
    let mut minus = Vec::new();
    for (i, g) in spun.generators().iter().enumerate() {
        let f = g.fiber_id();
        if let Some(stem) = f.strip_suffix(MINUS) {
            let j = spun
                .find(&g.base_point, &format!("{stem}{PLUS}"))
                .ok_or_else(|| format!("{} has no [+] partner", g.id))?;
            minus.push((i, j));
        } else if !f.ends_with(PLUS) {
            return Err(format!("{} belongs to neither block", g.id));
        }
    }
    if 2 * minus.len() != spun.len() {
        return Err("unpaired [+] generators".into());
    }
    Ok(minus)
}

/// Block structure of a 1-spun family: no component connects the two
/// blocks, both diagonal blocks agree, and `[+]` sits one fiber degree above
/// `[−]`.
pub fn validate_spin_blocks(spun: &FilteredComplex) -> BlockCheck {
    let pairs = match pairing(spun) {
        Ok(p) => p,
        Err(e) => return BlockCheck::fail(e),
    };
    let gens = spun.generators();
    for &(i, j) in &pairs {
        let (a, b) = (&gens[i], &gens[j]);
        if b.base_degree != a.base_degree || b.fiber_degree != a.fiber_degree + 1 {
            return BlockCheck::fail(format!("{} is not one fiber degree above {}", b.id, a.id));
        }
    }
    let n = spun.len();
    let mut partner = vec![usize::MAX; n];
    let mut is_plus = vec![false; n];
    for &(i, j) in &pairs {
        partner[i] = j;
        is_plus[j] = true;
    }
    for (&k, d) in spun.components() {
        for (r, c) in d.entries() {
            if is_plus[r] != is_plus[c] {
                return BlockCheck::fail(format!(
                    "d_{k} has a cross-block entry {} → {}",
                    gens[c].id, gens[r].id
                ));
            }
            if !is_plus[c] && !d.get(partner[r], partner[c]) {
                return BlockCheck::fail(format!(
                    "d_{k} entry {} → {} has no [+] copy",
                    gens[c].id, gens[r].id
                ));
            }
        }
        let plus = d.entries().filter(|&(_, c)| is_plus[c]).count();
        let minus = d.nnz() - plus;
        if plus != minus {
            return BlockCheck::fail(format!("d_{k} differs between the blocks"));
        }
    }
    BlockCheck {
        ok: true,
        failure: None,
    }
}

/// Outcome of [`factor_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCheck {
    pub ok: bool,
    pub blocks: BlockCheck,
    /// `Pr_± ∘ ψ_spun ∘ incl_± = ψ` and `Pr_∓ ∘ ψ_spun ∘ incl_± = 0`.
    pub chain_level: bool,
    /// The same on homology, against `Ψ` of the unspun family.
    pub homology_level: bool,
}

/// Whether `Ψ` of the spun family projects back to `Ψ` of `fc` on each
/// block.
pub fn factor_check(fc: &FilteredComplex, spun: &FilteredComplex) -> Result<FactorCheck, FamilyError> {
    if spun.len() != 2 * fc.len() || spun.base() != fc.base() {
        return Err(FamilyError::Malformed(
            "spun family does not match the original".into(),
        ));
    }
    let blocks = validate_spin_blocks(spun);
    if !blocks.ok {
        return Ok(FactorCheck {
            ok: false,
            blocks,
            chain_level: false,
            homology_level: false,
        });
    }
    let (fiber, chain) = psi_chain(fc)?;
    let (sfiber, schain) = psi_chain(spun)?;
    let target = psi(fc)?;
    let locate = |suffix: &str| -> Result<Vec<usize>, FamilyError> {
        fiber
            .generators()
            .iter()
            .map(|g| {
                sfiber
                    .index_of(&format!("{}{suffix}", g.id))
                    .ok_or_else(|| FamilyError::Malformed(format!("spun fiber lacks {}{suffix}", g.id)))
            })
            .collect()
    };
    let (im, ip) = (locate(MINUS)?, locate(PLUS)?);
    let mut chain_level = true;
    let mut homology_level = true;
    for (src, other) in [(&im, &ip), (&ip, &im)] {
        let same = schain.submatrix(src, src);
        let cross = schain.submatrix(other, src);
        chain_level &= same == chain && cross.is_zero();
        let (blocks, _) = induced(&fiber, &same, target.degree_shift)?;
        homology_level &= blocks == target.blocks;
    }
    Ok(FactorCheck {
        ok: chain_level && homology_level,
        blocks,
        chain_level,
        homology_level,
    })
}
