//! Experiment harness around the lfx codec: synthetic content in three
//! motion classes, the fixed-k lambda sweep, the three-parameter power
//! fit, and the adaptive-vs-anchor Bjontegaard comparison.

pub mod config;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod synth;

pub use error::{LabError, Result};
