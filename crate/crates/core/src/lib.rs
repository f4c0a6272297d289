//! Flow categories of Morse functions on flat tori, the combinatorics of their
//! corner strata, coherent orientations, and filtered realizations of the
//! resulting Floer complexes over coefficient rings.

pub mod bank;
pub mod coeff;
pub mod corners;
pub mod flowcat;
pub mod jcat;
pub mod morse;
pub mod report;
pub mod synth;
