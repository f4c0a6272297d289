//! Manifold-with-corners combinatorics: the cube poset, face structures,
//! chain strata of compactified moduli spaces and sign diagrams.

mod cube;
mod sign;
mod strata;

pub use cube::{corner_code, validate_k_structure, CubeObject, FaceSample, FaceStructure};
pub use sign::{validate_sign_diagram, SignDiagram};
pub use strata::{face_decomposition, strata, strata_report, StrataReport, StratumChain};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CornerError {
    #[error("negative coordinate {0}")]
    NegativeCoordinate(String),
    #[error("{a} > {b} does not hold")]
    NotComparable { a: String, b: String },
    #[error("index {index} outside {low}..={high}")]
    IndexOutOfRange { index: i64, low: i64, high: i64 },
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("invalid sign diagram: {0}")]
    InvalidSignDiagram(String),
}
