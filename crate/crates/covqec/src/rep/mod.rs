//! SU(d) representation theory: Young diagrams, Weyl dimensions, characters,
//! Littlewood-Richardson coefficients and the Schur-Weyl outcome measure.

mod character;
mod lr;
mod schur_weyl;
mod young;

use thiserror::Error;

pub use character::{alternant_ratio, character, character_at, jacobi_trudi, su2_character};
pub use lr::{correlation_count, lr_coefficient, tensor_decompose};
pub use schur_weyl::{schur_weyl_distribution, schur_weyl_probability, to_f64};
pub use young::{
    dimension_f64, dimension_u64, dualize, enumerate_diagrams, weyl_dimension, young_distance, YoungDiagram,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("rows {0:?} are not a partition")]
    InvalidDiagram(Vec<u32>),
    #[error("diagram has {rows} rows but d = {d}")]
    TooManyRows { rows: usize, d: usize },
    #[error("local dimension must be positive, got {0}")]
    InvalidDimension(usize),
    #[error("expected {expected} boxes, got {got}")]
    BoxMismatch { expected: u32, got: u32 },
}
