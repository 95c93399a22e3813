use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use crate::data::Dataset;
use crate::rng;

const BAG_STREAM: u64 = 0x0062_6167; // "bag"

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaggingParams {
    pub n_estimators: usize,
    /// When false every member sees the full training set.
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for BaggingParams {
    fn default() -> Self {
        BaggingParams {
            n_estimators: 10,
            bootstrap: true,
            tree: TreeParams::default(),
        }
    }
}

/// Trees fit on bootstrap resamples; the score is the mean member probability.
#[derive(Debug, Clone, PartialEq)]
pub struct BaggedTrees {
    pub members: Vec<DecisionTree>,
    pub member_seeds: Vec<u64>,
}

impl BaggedTrees {
    pub fn fit(train: &Dataset, params: BaggingParams, seed: u64) -> BaggedTrees {
        let n = train.n_rows();
        let member_seeds: Vec<u64> = (0..params.n_estimators as u64)
            .map(|m| rng::derive_seed(seed, &[BAG_STREAM, m]))
            .collect();
        let members = member_seeds
            .par_iter()
            .map(|&s| {
                let rows: Vec<usize> = if params.bootstrap {
                    let mut stream = rng::stream(s, &[]);
                    (0..n).map(|_| stream.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_rows(train, &rows, params.tree)
            })
            .collect();
        BaggedTrees {
            members,
            member_seeds,
        }
    }

    pub fn predict_proba(&self, features: &Array2<f64>) -> Vec<f64> {
        let m = self.members.len() as f64;
        features
            .outer_iter()
            .map(|row| self.members.iter().map(|t| t.predict_row(row)).sum::<f64>() / m)
            .collect()
    }
}

pub fn bagging_fit_predict(train: &Dataset, test: &Array2<f64>, params: BaggingParams, seed: u64) -> Vec<f64> {
    BaggedTrees::fit(train, params, seed).predict_proba(test)
}
