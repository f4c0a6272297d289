//! Flow categories, their axioms, coherent orientations and Floer complexes.

mod category;
mod complex;
mod io;
mod validate;

pub use category::{BrokenFlow, FlowCategory, ModuliComponent, Object, OneDimModuli, OrientationData, RigidFlow};
pub use complex::{floer_complex, FloerComplexExtract, FloerOptions};
pub use io::{category_from_json, category_from_str, category_to_json};
pub use validate::{check_orientation_coherence, validate_morse_smale};

use thiserror::Error;

use crate::coeff::CoeffError;
use crate::jcat::JError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("unknown flow {0}")]
    UnknownFlow(String),
    #[error("flow {flow} has sign {sign}, expected 1 or -1")]
    InvalidSign { flow: String, sign: i64 },
    #[error("incoherent orientation: {0}")]
    IncoherentOrientation(String),
    #[error("object {object} has negative relative grading {grading}")]
    NegativeRelativeIndex { object: String, grading: i64 },
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Complex(#[from] JError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}
