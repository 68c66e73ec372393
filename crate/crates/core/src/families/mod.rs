//! Family complexes over spheres, intervals and products, the monodromy
//! morphism `Ψ`, and the spinning constructions built from it.

mod base;
mod dumbbell;
pub mod fixtures;
mod interval;
mod monodromy;
mod products;
mod sphere;
mod spin;

pub use base::{interval_sphere_point, BaseDescriptor};
pub use dumbbell::{dumbbell, Dumbbell};
pub use interval::{
    continuation, homotopy_family, interval_family, verify_homotopy, Continuation, HomotopyCheck,
};
pub use monodromy::MonodromyData;
pub use products::{kunneth, product_family, spin_gh, twist_spin, twist_spin_complex};
pub use sphere::{
    certificate, compose, cover_pullback, fiber_of, psi, psi_chain, sphere_family, Certificate, PsiMap,
};
pub use spin::{factor_check, spin_family, validate_spin_blocks, BlockCheck, FactorCheck};

use crate::spectral::SpectralError;
use crate::z2::Z2Error;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("not a chain map: d∘f ≠ f∘d at generator {witness:?}")]
    NotChainMap { witness: String },
    #[error("monodromy is not invertible in degree {degree}")]
    NotInvertible { degree: i64 },
    #[error("expected a family over {expected}, got {found}")]
    WrongBase { expected: String, found: String },
    #[error("malformed family: {0}")]
    Malformed(String),
    #[error("Ψ has degree shift {found}, expected {expected} for m = {m}")]
    DegreeShift { m: usize, expected: i64, found: i64 },
    #[error("homology bases differ: {0}")]
    BasisMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Complex(#[from] Z2Error),
}

/// Serde for `BTreeMap<i64, Z2Matrix>` as `{"k": [[0,1],[1,0]]}`, keys in
/// numeric order. Matrices with no rows are written as `[]`.
pub(crate) mod dense_blocks {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::z2::Z2Matrix;

    pub fn serialize<S: Serializer>(m: &BTreeMap<i64, Z2Matrix>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(&k.to_string(), &v.to_dense())?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, Z2Matrix>, D::Error> {
        let raw: BTreeMap<String, Vec<Vec<u8>>> = BTreeMap::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, rows) in raw {
            let key: i64 = k
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("degree key {k:?} is not an integer")))?;
            if rows.iter().any(|r| r.len() != rows[0].len()) {
                return Err(D::Error::custom(format!("ragged matrix in degree {k}")));
            }
            if rows.iter().flatten().any(|&v| v > 1) {
                return Err(D::Error::custom(format!("entries in degree {k} must be 0 or 1")));
            }
            out.insert(key, Z2Matrix::from_dense(&rows));
        }
        Ok(out)
    }
}
