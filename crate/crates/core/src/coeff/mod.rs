//! Coefficient rings and exact homology of integer chain complexes.

mod homology;
mod matrix;
mod ring;
mod smith;

use thiserror::Error;

pub use homology::{complex_homology, euler_characteristic, graded_homology, homology, HomologyGroup};
pub use matrix::{bigint_json, IntegerMatrix};
pub use ring::{CoefficientRing, LaurentElement};
pub use smith::{invariant_factors, smith_normal_form, SmithForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composite of consecutive boundaries is nonzero")]
    CompositeNonzero,
    #[error("invalid coefficient ring: {0}")]
    InvalidRing(String),
    #[error("power {power} leaves the Laurent window of half-width {truncation}")]
    WindowOverflow { power: i64, truncation: u32 },
}
