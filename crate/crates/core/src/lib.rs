//! Synthetic gas-sensor benchmark for binary safety classification.
//!
//! The crate generates labeled sensor-array data for sewer atmospheres, trains
//! a roster of classical and ensemble classifiers under repeated stratified
//! cross-validation, and reports accuracy tables together with pairwise
//! Kolmogorov–Smirnov comparisons.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifiers;
pub mod dataset;
pub mod ensembles;
pub mod error;
pub mod gasdata;
pub mod harness;
pub mod learner;
pub mod numerics;
pub mod stats;

pub use error::{Error, Result};
