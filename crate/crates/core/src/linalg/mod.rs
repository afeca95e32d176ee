//! Exact integer linear algebra: sparse matrices, Smith normal form, lattices
//! and homology of finite chain complexes.

pub mod echelon;
pub mod field;
pub mod homology;
pub mod int;
pub mod modular;
pub mod snf;
pub mod sparse;

pub use echelon::{integer_kernel, relative_kernel, Lattice};
pub use homology::{AbelianGroup, ChainComplex, CoefficientRing, HomologyBasis};
pub use int::Int;
pub use modular::ModularComplex;
pub use snf::{elementary_divisors, smith_normal_form, SnfResult};
pub use sparse::{SparseIntMatrix, SparseVec};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("{context}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch { context: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("differentials compose to a nonzero map in degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("vector is not in the lattice")]
    NotInLattice,
    #[error("invalid coefficient ring `{0}`")]
    InvalidRing(String),
}
