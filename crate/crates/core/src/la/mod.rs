//! Dense linear algebra over `F_p`: matrices, permutations, triangular
//! solves and the two PLUQ eliminations the certificates are built on.

mod io;
mod matrix;
mod perm;
mod pluq;

use thiserror::Error;

use crate::ff::FieldError;

pub use io::{parse_matrix, read_matrix, write_matrix};
pub use matrix::{
    echelon_pivots, is_lower_triangular, is_row_echelon, is_unit_lower_triangular,
    is_unit_upper_triangular, is_upper_triangular, trsv_lower, trsv_upper, DenseMatrix, Padding,
};
pub use perm::{conjugate_by_permutations, Diagonal, Permutation, RankProfile, RankProfileMatrix};
pub use pluq::{
    ldup, ldup_with, lu_generic, pluq_crp, pluq_crp_with, pluq_rpm, pluq_rpm_with,
    LdupFactorization, PluqFactorization,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("entry {0} is not a canonical residue mod {1}")]
    NonCanonical(u64, u64),
    #[error("images do not form a permutation")]
    NotAPermutation,
    #[error("not a valid rank profile")]
    NotAProfile,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix has no generic rank profile")]
    NoGenericRankProfile,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl LaError {
    pub(crate) fn dims(what: &'static str, expected: usize, got: usize) -> Self {
        LaError::Dimension {
            what,
            expected,
            got,
        }
    }
}
