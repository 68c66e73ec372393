//! Generating family homology for Legendrian submanifolds of 1-jet spaces,
//! and the families machinery built on top of it: filtered complexes and
//! their spectral sequences, monodromy morphisms on homology, and the
//! product, spinning and twist-spinning constructions.
//!
//! The numeric side ([`expr`], [`cubical`], [`genfam`]) is generic over the
//! scalar type through [`Scalar`]; the aliases at the bottom of this file fix
//! it to `f64` or `f32`. The algebraic side ([`z2`], [`spectral`],
//! [`families`]) always works over ℤ/2.

pub mod cubical;
pub mod expr;
pub mod families;
pub mod genfam;
pub mod scalar;
pub mod spectral;
pub mod z2;

pub use scalar::Scalar;
pub use z2::{GHTable, GradedComplex, Z2Matrix, Z2Vec};

pub type ScalarField64 = cubical::ScalarField<f64>;
pub type ScalarField32 = cubical::ScalarField<f32>;
pub type CriticalPointReport64 = cubical::CriticalPointReport<f64>;
pub type CriticalPointReport32 = cubical::CriticalPointReport<f32>;
pub type GHResult64 = genfam::GHResult<f64>;
pub type GHResult32 = genfam::GHResult<f32>;
