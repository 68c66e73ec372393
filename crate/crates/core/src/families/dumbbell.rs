use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FamilyError, MonodromyData};
use crate::z2::{ComplexDoc, GHTable, Generator, GradedComplex, Z2Matrix};

/// Chain model of the dumbbell Legendrian `Λ^{n,r}` and its rotation loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dumbbell {
    #[serde(with = "complex_doc")]
    pub complex: GradedComplex,
    pub monodromy: MonodromyData,
    pub gh: GHTable,
    /// Choices of the model that the input data does not pin down.
    pub assumptions: Vec<String>,
}

mod complex_doc {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::z2::{ComplexDoc, GradedComplex};

    pub fn serialize<S: Serializer>(c: &GradedComplex, s: S) -> Result<S::Ok, S::Error> {
        c.to_doc().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<GradedComplex, D::Error> {
        let doc = ComplexDoc::deserialize(d)?;
        GradedComplex::from_doc(&doc).map_err(serde::de::Error::custom)
    }
}

fn names(prefix: &str, copies: usize) -> Vec<String> {
    if copies == 2 {
        vec![format!("{prefix}_L"), format!("{prefix}_R")]
    } else {
        (1..=copies).map(|i| format!("{prefix}_{i}")).collect()
    }
}

/// `β_i ↦ β_{i+1}` (indices mod `copies`).
fn cyclic_shift(copies: usize) -> Z2Matrix {
    Z2Matrix::from_entries(copies, copies, (0..copies).map(|i| ((i + 1) % copies, i)))
}

/// Zero-differential complex with `sigma` in degree `n`, `copies` chains
/// `beta_*` in degree `r` and `copies` chains `betabar_*` in degree `1 − r`.
/// The monodromy rotates the copies cyclically and fixes `sigma`.
pub fn dumbbell(n: usize, r: usize, copies: usize) -> Result<Dumbbell, FamilyError> {
    if r < n + 2 {
        return Err(FamilyError::Precondition(format!(
            "r >= n+2 required (n = {n}, r = {r})"
        )));
    }
    if copies < 2 {
        return Err(FamilyError::Precondition(format!(
            "copies >= 2 required (got {copies})"
        )));
    }
    let (n, r) = (n as i64, r as i64);
    let mut generators = vec![Generator {
        id: "sigma".into(),
        degree: n,
    }];
    for (prefix, degree) in [("beta", r), ("betabar", 1 - r)] {
        generators.extend(names(prefix, copies).into_iter().map(|id| Generator { id, degree }));
    }
    let complex = GradedComplex::from_doc(&ComplexDoc {
        generators,
        differential: BTreeMap::new(),
    })?;
    let shift = cyclic_shift(copies);
    let monodromy = MonodromyData {
        degrees: BTreeMap::from([
            (n, Z2Matrix::identity(1)),
            (r, shift.clone()),
            (1 - r, shift),
        ]),
    };
    let gh = complex.homology()?;
    Ok(Dumbbell {
        complex,
        monodromy,
        gh,
        assumptions: vec![format!(
            "monodromy acts as the identity on the degree-{n} class sigma"
        )],
    })
}
