//! Linear algebra over ℤ/2 and finite graded chain complexes.

mod complex;
mod matrix;
mod subspace;
mod table;
mod vector;

pub use complex::{
    ComplexDoc, DSquaredCheck, DegreeHomology, Generator, GradedComplex, HomologyBasis,
};
pub use matrix::{Reduction, Z2Matrix};
pub use subspace::{span_dim, QuotientBasis};
pub use table::GHTable;
pub use vector::Z2Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Z2Error {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("duplicate generator id {0:?}")]
    DuplicateGenerator(String),
    #[error(
        "differential {from:?} -> {to:?} must lower degree by one \
         (got {from_degree} -> {to_degree})"
    )]
    DegreeMismatch {
        from: String,
        to: String,
        from_degree: i64,
        to_degree: i64,
    },
    #[error("d∘d ≠ 0; first violating generator {0:?}")]
    DSquaredNonZero(String),
}
