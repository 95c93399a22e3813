//! Selection of the neighbourhood size `k` and walk length `gamma` by inner
//! cross-validation of the decision tree on RWMaU-resampled folds.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{DecisionTree, TreeParams};
use crate::data::{Dataset, MINORITY};
use crate::error::{Error, Result};
use crate::graph::knn_from_features;
use crate::metrics::auc;
use crate::resample::{rwmau_with_neighbors, Method, ResampleConfig};
use crate::rng;

const FOLD_STREAM: u64 = 0x666f_6c64; // "fold"

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneGrid {
    pub k_values: Vec<usize>,
    /// `gamma = 2k + offset`; candidates with `gamma < 1` are dropped.
    pub gamma_offsets: Vec<i64>,
    pub folds: usize,
    pub seed: u64,
}

impl Default for TuneGrid {
    fn default() -> Self {
        TuneGrid {
            k_values: (2..=10).collect(),
            gamma_offsets: (-3..=3).collect(),
            folds: 5,
            seed: 0,
        }
    }
}

impl TuneGrid {
    pub fn single(k: usize, gamma: usize) -> Self {
        TuneGrid {
            k_values: vec![k],
            gamma_offsets: vec![gamma as i64 - 2 * k as i64],
            ..Default::default()
        }
    }

    /// Distinct `(k, gamma)` pairs ordered by `k`, then `gamma`.
    pub fn candidates(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .k_values
            .iter()
            .filter(|&&k| k >= 1)
            .flat_map(|&k| {
                self.gamma_offsets.iter().filter_map(move |&o| {
                    let g = 2 * k as i64 + o;
                    (g >= 1).then_some((k, g as usize))
                })
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub gamma: usize,
    pub fold: usize,
    pub auc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub k: usize,
    pub gamma: usize,
    pub mean_auc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub k: usize,
    pub gamma: usize,
    pub mean_auc: f64,
    /// Feasible candidates in grid order.
    pub scores: Vec<CandidateScore>,
    pub trace: Vec<TraceRow>,
    /// Validation rows of each fold, as indices into the tuning set.
    pub folds: Vec<Vec<usize>>,
}

/// Splits row indices into `folds` groups with the class ratio preserved as
/// far as counts allow. Each group is sorted ascending.
pub fn stratified_folds(labels: &[u8], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut stream = rng::stream(seed, &[FOLD_STREAM]);
    let mut minority: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == MINORITY).collect();
    let mut majority: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != MINORITY).collect();
    minority.shuffle(&mut stream);
    majority.shuffle(&mut stream);
    let mut out = vec![Vec::new(); folds];
    for (pos, &i) in minority.iter().chain(&majority).enumerate() {
        out[pos % folds].push(i);
    }
    for f in &mut out {
        f.sort_unstable();
    }
    out
}

/// Picks the candidate with the highest mean validation AUC; ties go to the
/// smaller `k`, then the smaller `gamma`.
pub fn tune(train: &Dataset, grid: &TuneGrid, alpha: f64, walks_per_start: usize) -> Result<TuneOutcome> {
    let candidates = grid.candidates();
    if candidates.is_empty() {
        return Err(Error::Config("tuning grid has no candidate with gamma >= 1".into()));
    }
    if grid.folds < 2 || grid.folds > train.n_rows() {
        return Err(Error::Config(format!(
            "{} folds cannot be drawn from {} rows",
            grid.folds,
            train.n_rows()
        )));
    }
    let folds = stratified_folds(train.labels(), grid.folds, grid.seed);

    let per_fold: Vec<Option<Vec<Option<f64>>>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, val_rows)| evaluate_fold(train, val_rows, f, &candidates, grid.seed, alpha, walks_per_start))
        .collect::<Result<_>>()?;

    let usable: Vec<(usize, &Vec<Option<f64>>)> = per_fold
        .iter()
        .enumerate()
        .filter_map(|(f, r)| r.as_ref().map(|r| (f, r)))
        .collect();
    if usable.is_empty() {
        return Err(Error::Config(
            "no inner fold has both classes in its validation part".into(),
        ));
    }

    let mut trace = Vec::new();
    let mut scores = Vec::new();
    for (c, &(k, gamma)) in candidates.iter().enumerate() {
        let aucs: Option<Vec<f64>> = usable.iter().map(|(_, r)| r[c]).collect();
        let Some(aucs) = aucs else { continue };
        for (&(fold, _), &auc) in usable.iter().zip(&aucs) {
            trace.push(TraceRow { k, gamma, fold, auc });
        }
        scores.push(CandidateScore {
            k,
            gamma,
            mean_auc: aucs.iter().sum::<f64>() / aucs.len() as f64,
        });
    }
    let best = scores
        .iter()
        .fold(None::<&CandidateScore>, |best, s| match best {
            Some(b) if b.mean_auc >= s.mean_auc => Some(b),
            _ => Some(s),
        })
        .copied()
        .ok_or_else(|| Error::Config("every (k, gamma) candidate is infeasible for this training set".into()))?;
    Ok(TuneOutcome {
        k: best.k,
        gamma: best.gamma,
        mean_auc: best.mean_auc,
        scores,
        trace,
        folds,
    })
}

/// AUC of every candidate on one fold, `None` per infeasible candidate, or
/// `None` overall when the validation rows miss a class.
fn evaluate_fold(
    train: &Dataset,
    val_rows: &[usize],
    fold: usize,
    candidates: &[(usize, usize)],
    seed: u64,
    alpha: f64,
    walks_per_start: usize,
) -> Result<Option<Vec<Option<f64>>>> {
    let mut in_val = vec![false; train.n_rows()];
    for &i in val_rows {
        in_val[i] = true;
    }
    let fit_rows: Vec<usize> = (0..train.n_rows()).filter(|&i| !in_val[i]).collect();
    let val = train.select(val_rows);
    let inner = train.select(&fit_rows);
    if !val.has_both_classes() || !inner.has_both_classes() {
        return Ok(None);
    }
    let k_max = candidates.iter().map(|c| c.0).max().unwrap_or(1).min(inner.n_rows() - 1);
    let nb = knn_from_features(inner.features(), k_max)?;
    let aucs = candidates
        .iter()
        .map(|&(k, gamma)| {
            if k > k_max {
                return None;
            }
            let cfg = ResampleConfig {
                alpha,
                k,
                gamma,
                walks_per_start,
                seed: rng::derive_seed(seed, &[fold as u64, k as u64, gamma as u64]),
                method: Method::Rwmau,
            };
            let resampled = rwmau_with_neighbors(&inner, &cfg, &nb).ok()?;
            let tree = DecisionTree::fit(&resampled.augmented, TreeParams::default());
            auc(&tree.predict_proba(val.features()), val.labels()).ok()
        })
        .collect();
    Ok(Some(aucs))
}
