//! Exact integer linear algebra for K-theory of two-strata extensions.

mod group;
mod matrix;
mod pinch;
mod sequence;
mod snf;
mod stratified;

use thiserror::Error;

pub use group::{cokernel, kernel, matrix_rank, FgAbGroup};
pub use matrix::IntMatrix;
pub use pinch::{circle_k_theory, finite_set_k_theory, pinch_k_theory, pinch_strata_oracle, KPair};
pub use sequence::{duality_check, k_homology, solve_six_term, DualityCheck, TwoStrataSes};
pub use snf::{smith_normal_form, SnfResult};
pub use stratified::{
    vertex_class_boundary, EdgeEnd, EndIncidence, OneDStratified, StratifiedEdge,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KTheoryError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("invalid stratification: {0}")]
    Validation(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}
