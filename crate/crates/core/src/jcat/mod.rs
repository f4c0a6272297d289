//! The indexing category J, based chain complexes and their filtered realizations.

mod complex;
mod point;
mod realization;

pub use complex::ChainComplexData;
pub use point::{compose, in_face_image, JPayload, JPoint};
pub use realization::{check_realization, parse_components, realize, Components, FilteredRealization, Level};

use thiserror::Error;

use crate::coeff::CoeffError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JError {
    #[error("cannot compose: target {outer_target} does not match source {inner_source}")]
    SourceTargetMismatch { outer_target: i64, inner_source: i64 },
    #[error("index {index} outside the open interval ({low}, {high})")]
    IndexOutOfRange { index: i64, low: i64, high: i64 },
    #[error("negative coordinate {0}")]
    NegativeCoordinate(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("boundary composite d_{} d_{degree} is nonzero", degree - 1)]
    BoundaryCompositeNonzero { degree: usize },
    #[error("total differential squares to a nonzero map from level {p} to level {r}")]
    TotalDifferentialSquareNonzero { p: usize, r: usize },
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}
