//! Exact integer linear algebra: matrices over `Z`, Smith normal form, and
//! finitely generated abelian groups with homomorphisms between them.

mod group;
mod matrix;
mod snf;

pub use group::{
    group_from_presentation, induced_hom, is_isomorphism, verify_certificate, Element, FgAbelianGroup, GroupHom,
};
pub use matrix::{format_vector, parse_vector, vec_from_i64, IntMatrix};
pub use snf::{kernel_basis, snf, solve, unimodular_inverse, SmithDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZlinError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("invalid invariant factors: {0}")]
    BadInvariantFactors(String),
    #[error("system has no integer solution: {0}")]
    Unsolvable(String),
}
