use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::FamilyError;
use crate::z2::{GradedComplex, Z2Matrix};

/// Chain-level data of a sphere family, as blocks keyed by source degree.
///
/// For `m = 1` block `k` is the monodromy `μ` on the degree-`k` generators
/// (a missing degree is the identity). For `m ≥ 2` block `k` is the chain map
/// `θ` from degree `k` to degree `k + m − 1` (a missing degree is zero).
/// Rows and columns follow the generator order of the fiber complex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyData {
    #[serde(with = "super::dense_blocks")]
    pub degrees: BTreeMap<i64, Z2Matrix>,
}

impl MonodromyData {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Blocks of a full `n × n` matrix on `fiber` mapping degree `k` to
    /// `k + shift`. Zero blocks are kept only for square shapes.
    pub fn from_matrix(fiber: &GradedComplex, f: &Z2Matrix, shift: i64) -> Self {
        let mut degrees = BTreeMap::new();
        for k in fiber.degrees() {
            let cols = fiber.in_degree(k);
            let rows = fiber.in_degree(k + shift);
            if rows.is_empty() {
                continue;
            }
            degrees.insert(k, f.submatrix(&rows, &cols));
        }
        Self { degrees }
    }

    /// Full matrix on `fiber` with the given degree shift. `missing_identity`
    /// fills absent degrees with the identity (only meaningful for shift 0).
    pub fn to_matrix(
        &self,
        fiber: &GradedComplex,
        shift: i64,
        missing_identity: bool,
    ) -> Result<Z2Matrix, FamilyError> {
        let n = fiber.len();
        let degrees = fiber.degrees();
        for k in self.degrees.keys() {
            if !degrees.contains(k) {
                return Err(FamilyError::Malformed(format!(
                    "monodromy block for degree {k}, where the fiber has no generators"
                )));
            }
        }
        let mut out = Z2Matrix::zeros(n, n);
        for k in degrees {
            let cols = fiber.in_degree(k);
            let rows = fiber.in_degree(k + shift);
            match self.degrees.get(&k) {
                Some(b) => {
                    if (b.n_rows(), b.n_cols()) != (rows.len(), cols.len()) && !(b.n_rows() == 0 && rows.is_empty()) {
                        return Err(FamilyError::Malformed(format!(
                            "degree {k} block is {}x{}, expected {}x{}",
                            b.n_rows(),
                            b.n_cols(),
                            rows.len(),
                            cols.len()
                        )));
                    }
                    for (r, c) in b.entries() {
                        out.set(rows[r], cols[c], true);
                    }
                }
                None if missing_identity && shift == 0 => {
                    for &i in &cols {
                        out.set(i, i, true);
                    }
                }
                None => {}
            }
        }
        Ok(out)
    }
}

/// `d∘f = f∘d`, with the first generator where it fails as witness.
pub(crate) fn check_chain_map(
    source: &GradedComplex,
    target: &GradedComplex,
    f: &Z2Matrix,
) -> Result<(), FamilyError> {
    let lhs = target.differential().mul(f);
    let rhs = f.mul(source.differential());
    let diff = lhs.add(&rhs);
    match (0..source.len()).find(|&c| !diff.column(c).is_empty()) {
        None => Ok(()),
        Some(c) => Err(FamilyError::NotChainMap {
            witness: source.generators()[c].id.clone(),
        }),
    }
}

/// Invertibility of a degree-preserving map, degree by degree.
pub(crate) fn check_invertible(fiber: &GradedComplex, f: &Z2Matrix) -> Result<(), FamilyError> {
    for k in fiber.degrees() {
        let idx = fiber.in_degree(k);
        if !f.submatrix(&idx, &idx).is_invertible() {
            return Err(FamilyError::NotInvertible { degree: k });
        }
    }
    Ok(())
}
