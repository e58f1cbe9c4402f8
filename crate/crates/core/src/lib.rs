//! Exact audits of finitely generated matrix groups.
//!
//! The crate works over four exact field families (see [`fields`]). Linear
//! algebra and group enumeration are generic over the [`Field`] trait; the
//! certificate, centralizer and gallery layers use the runtime-tagged
//! [`FieldElement`].

pub mod arith;
pub mod certify;
pub mod error;
pub mod fields;
pub mod gallery;
pub mod groups;
pub mod matrices;
pub mod poly;
pub mod scalar;
pub mod theta;

pub use error::{Error, Result};
pub use fields::{FieldDescriptor, FieldElement};
pub use groups::{CayleyBall, Group, MatrixGroup, Word};
pub use matrices::SquareMatrix;
pub use poly::Poly;
pub use scalar::{Field, Rational, RootOfUnityTest};

/// Matrices over any supported field.
pub type Matrix = SquareMatrix<FieldElement>;
/// Matrices over `Q` without the runtime field tag.
pub type RationalMatrix = SquareMatrix<Rational>;
/// A Cayley ball over any supported field.
pub type Ball = CayleyBall<FieldElement>;
