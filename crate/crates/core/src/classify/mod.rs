//! Evaluation classifiers: k-nearest neighbours, an entropy decision tree,
//! and bagged trees. All emit minority-class probabilities.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

mod bagging;
mod knn;
mod tree;

pub use bagging::{bagging_fit_predict, BaggedTrees, BaggingParams};
pub use knn::{knn_fit_predict, KnnModel, KnnParams, DEFAULT_K};
pub use tree::{entropy, information_gain, DecisionTree, Node, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Knn,
    Tree,
    Bagging,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Knn, ClassifierKind::Tree, ClassifierKind::Bagging];

    pub fn label(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::Tree => "tree",
            ClassifierKind::Bagging => "bagging",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "knn" => Ok(ClassifierKind::Knn),
            "tree" | "c45" | "c4.5" => Ok(ClassifierKind::Tree),
            "bagging" => Ok(ClassifierKind::Bagging),
            other => Err(Error::Config(format!(
                "unknown classifier {other:?} (expected knn, tree or bagging)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Knn(KnnModel),
    Tree(DecisionTree),
    Bagging(BaggedTrees),
}

impl TrainedModel {
    /// Fits `kind` with its default settings; `seed` only affects bagging.
    pub fn fit(kind: ClassifierKind, train: &Dataset, seed: u64) -> Result<TrainedModel> {
        Ok(match kind {
            ClassifierKind::Knn => TrainedModel::Knn(KnnModel::fit(train, KnnParams::default())?),
            ClassifierKind::Tree => TrainedModel::Tree(DecisionTree::fit(train, TreeParams::default())),
            ClassifierKind::Bagging => {
                TrainedModel::Bagging(BaggedTrees::fit(train, BaggingParams::default(), seed))
            }
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedModel::Knn(_) => ClassifierKind::Knn,
            TrainedModel::Tree(_) => ClassifierKind::Tree,
            TrainedModel::Bagging(_) => ClassifierKind::Bagging,
        }
    }

    pub fn predict_proba(&self, features: &Array2<f64>) -> Vec<f64> {
        match self {
            TrainedModel::Knn(m) => m.predict_proba(features),
            TrainedModel::Tree(m) => m.predict_proba(features),
            TrainedModel::Bagging(m) => m.predict_proba(features),
        }
    }
}
