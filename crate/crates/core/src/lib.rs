//! Random walk-steered majority undersampling for binary imbalanced data.
//!
//! The pipeline is: build a kNN transition graph over all rows, start short
//! random walks from every minority point, score majority points by how often
//! and how early they are reached, then drop the highest-scoring ones. Three
//! baseline undersamplers, three classifiers and rank statistics round out a
//! benchmark harness.
//!
//! ```
//! use ndarray::array;
//! use rwmau::data::Dataset;
//! use rwmau::resample::{resample, ResampleConfig};
//!
//! let x = array![[0.0], [0.1], [0.2], [0.3], [5.0], [5.1], [5.2], [9.0]];
//! let y: Vec<String> = ["p", "n", "n", "n", "n", "n", "p", "n"].iter().map(|s| s.to_string()).collect();
//! let ds = Dataset::from_raw_labels(x, &y, None).unwrap();
//! let cfg = ResampleConfig { k: 2, gamma: 4, alpha: 1.0, ..Default::default() };
//! let out = resample(&ds, &cfg).unwrap();
//! assert_eq!(out.removed.len(), 4);
//! ```

pub mod bench;
pub mod classify;
pub mod cli;
pub mod data;
pub mod error;
pub mod fmt;
pub mod graph;
pub mod manifest;
pub mod metrics;
pub mod report;
pub mod resample;
pub mod rng;
pub mod tuning;
pub mod walk;

pub use error::{Error, Result};
