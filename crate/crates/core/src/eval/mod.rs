//! Statistical distortion of repairs and synthetic corruption for
//! desk-scale experiments.

mod corruption;
mod distortion;
mod experiment;

pub use corruption::{inject_corruption, multiplier, CorruptionKind, CorruptionSpec, MISSING};
pub use distortion::{statistical_distortion, DistortionReport};
pub use experiment::{run_experiment, ExperimentReport};
