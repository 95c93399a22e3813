//! Majority undersamplers: the random-walk scheme and three baselines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::walk::ScoreVector;

mod cluster;
mod ncr;
mod rus;
mod rwmau;

pub use cluster::{cluster_centroid_undersample, kmeans, KMeansParams};
pub use ncr::{ncr_clean, NCR_NEIGHBORS};
pub use rus::random_undersample;
pub use rwmau::{rwmau_undersample, rwmau_with_neighbors, select_removals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rwmau,
    Rus,
    Cc,
    Ncr,
    /// No resampling; reported as `original`.
    None,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Rwmau, Method::None, Method::Rus, Method::Cc, Method::Ncr];

    /// Column label used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::Rwmau => "rwmau",
            Method::Rus => "rus",
            Method::Cc => "cc",
            Method::Ncr => "ncr",
            Method::None => "original",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rwmau" => Ok(Method::Rwmau),
            "rus" => Ok(Method::Rus),
            "cc" => Ok(Method::Cc),
            "ncr" => Ok(Method::Ncr),
            "none" | "original" => Ok(Method::None),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected rwmau, rus, cc, ncr or none)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleConfig {
    pub alpha: f64,
    pub k: usize,
    pub gamma: usize,
    pub walks_per_start: usize,
    pub seed: u64,
    pub method: Method,
}

impl Default for ResampleConfig {
    fn default() -> Self {
        ResampleConfig {
            alpha: 0.5,
            k: 5,
            gamma: 10,
            walks_per_start: 1,
            seed: 0,
            method: Method::Rwmau,
        }
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "alpha must lie in the range (0,1], got {alpha}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResampleResult {
    pub augmented: Dataset,
    /// Indices into the input dataset, ascending. For cluster centroids this
    /// is every majority row, since all of them are replaced.
    pub removed: Vec<usize>,
    pub scores: Option<ScoreVector>,
}

impl ResampleResult {
    fn identity(ds: &Dataset) -> Self {
        ResampleResult {
            augmented: ds.clone(),
            removed: Vec::new(),
            scores: None,
        }
    }

    /// Drops `removed` (ascending) from `ds`, keeping the remaining rows in order.
    fn dropping(ds: &Dataset, removed: Vec<usize>, scores: Option<ScoreVector>) -> Self {
        let mut drop = vec![false; ds.n_rows()];
        for &i in &removed {
            drop[i] = true;
        }
        let kept: Vec<usize> = (0..ds.n_rows()).filter(|&i| !drop[i]).collect();
        ResampleResult {
            augmented: ds.select(&kept),
            removed,
            scores,
        }
    }
}

/// Number of majority points to remove: `floor((n_maj - n_min) * alpha)`.
pub fn undersample_count(n_maj: usize, n_min: usize, alpha: f64) -> Result<usize> {
    check_alpha(alpha)?;
    if n_maj < n_min {
        return Err(Error::Config(format!(
            "majority count {n_maj} is below minority count {n_min}"
        )));
    }
    Ok((((n_maj - n_min) as f64) * alpha).floor() as usize)
}

pub fn resample(ds: &Dataset, cfg: &ResampleConfig) -> Result<ResampleResult> {
    match cfg.method {
        Method::Rwmau => rwmau_undersample(ds, cfg),
        Method::Rus => random_undersample(ds, cfg.alpha, cfg.seed),
        Method::Cc => cluster_centroid_undersample(ds, cfg.alpha, cfg.seed),
        Method::Ncr => ncr_clean(ds, NCR_NEIGHBORS),
        Method::None => Ok(ResampleResult::identity(ds)),
    }
}

/// Removed indices, one per line.
pub fn removed_to_string(removed: &[usize]) -> String {
    removed.iter().map(|i| format!("{i}\n")).collect()
}
