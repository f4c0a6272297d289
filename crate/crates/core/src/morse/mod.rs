//! Flow categories of exact trigonometric Morse functions on `Tⁿ`, `n ≤ 3`.
//!
//! Flows follow `dγ/dt = -∇f` in unwrapped coordinates; lifts record which
//! integer translate of the target a trajectory reaches.

mod build;
mod config;
mod critical;
mod integrate;
mod orbits;
mod plot;
mod trig;

use thiserror::Error;

use crate::flowcat::FlowError;

pub use build::{build_flow_category, build_from_critical, BuildOutput};
pub use config::{Convention, NumericalConfig};
pub use critical::{find_critical_points, min_separation, torus_diff, torus_distance, CriticalPoint};
pub use integrate::{Direction, Integrator, Landing, Trajectory};
pub use orbits::{connecting_orbits, Boundary, BoundarySide, FlowLine, MorseSolver, SampleLabel, Scan};
pub use plot::{trajectories_csv, trajectories_svg};
pub use trig::{Jet, Term, TrigPolynomial};

#[derive(Debug, Error)]
pub enum MorseError {
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate critical point at {position:?} (|eigenvalue| = {eigenvalue:e})")]
    NotMorse { position: Vec<f64>, eigenvalue: f64 },
    #[error("Euler characteristic {sum} != 0 (counts by index {counts:?}); raise gridResolution")]
    EulerMismatch { sum: i64, counts: Vec<usize> },
    #[error("Morse-Smale violation: {0}")]
    MorseSmaleViolation(String),
    #[error("integration failure: {0}")]
    IntegrationFailure(String),
    #[error("unmatched endpoint: {0}")]
    UnmatchedEndpoint(String),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}
