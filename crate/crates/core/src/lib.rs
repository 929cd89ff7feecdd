//! Optimal-transport repair of conditional-independence violations in
//! discrete tables, plus fairness metrics and barycenter calibration for
//! matcher score files.

pub mod calibrate;
pub mod dist;
pub mod error;
pub mod eval;
pub mod fairness;
pub mod ot;
pub mod repair;

pub use error::{Error, Result};
