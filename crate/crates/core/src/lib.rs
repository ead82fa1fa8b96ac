//! Benchmark harness for unsupervised, continual, pose-based video anomaly
//! detection.
//!
//! The crate loads per-camera pose annotations, turns them into
//! fixed-length pose windows, rearranges standard train/test splits into
//! continual streams, drives pluggable scorers through the standard and
//! continual protocols and reports frame-level AUC-ROC, AUC-PR, EER and 10ER.

pub mod annotations;
pub mod error;
pub mod metrics;
pub mod model;
pub mod preprocess;
pub mod rearrange;
pub mod runner;
pub mod scorer;
pub mod seed;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
