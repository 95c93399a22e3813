use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MINORITY};
use crate::error::{Error, Result};
use crate::graph::euclidean;

pub const DEFAULT_K: usize = 5;

/// Stores the training set; scores are minority fractions among the `k`
/// nearest training rows (distance ties go to the lower training index).
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    train: Dataset,
    k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: DEFAULT_K }
    }
}

impl KnnModel {
    pub fn fit(train: &Dataset, params: KnnParams) -> Result<KnnModel> {
        if params.k == 0 || train.n_rows() < params.k {
            return Err(Error::Config(format!(
                "kNN with k={} needs at least k training rows, got {}",
                params.k,
                train.n_rows()
            )));
        }
        Ok(KnnModel {
            train: train.clone(),
            k: params.k,
        })
    }

    pub fn predict_proba(&self, features: &Array2<f64>) -> Vec<f64> {
        let x = self.train.features();
        let y = self.train.labels();
        let k = self.k;
        (0..features.nrows())
            .into_par_iter()
            .map(|i| {
                let row = features.row(i);
                let mut d: Vec<(f64, usize)> = x
                    .outer_iter()
                    .enumerate()
                    .map(|(j, t)| (euclidean(row, t), j))
                    .collect();
                let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < d.len() {
                    d.select_nth_unstable_by(k - 1, order);
                }
                let hits = d[..k].iter().filter(|&&(_, j)| y[j] == MINORITY).count();
                hits as f64 / k as f64
            })
            .collect()
    }
}

pub fn knn_fit_predict(train: &Dataset, test: &Array2<f64>, k: usize) -> Result<Vec<f64>> {
    Ok(KnnModel::fit(train, KnnParams { k })?.predict_proba(test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn dataset(features: Array2<f64>, labels: &[&str]) -> Dataset {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        Dataset::from_raw_labels(features, &labels, None).unwrap()
    }

    #[test]
    fn all_minority_neighbourhood() {
        let ds = dataset(
            array![[0.0], [0.1], [0.2], [0.3], [0.4], [9.0], [9.1], [9.2], [9.3], [9.4], [9.5], [9.6]],
            &["p", "p", "p", "p", "p", "n", "n", "n", "n", "n", "n", "n"],
        );
        assert_eq!(knn_fit_predict(&ds, &array![[0.0]], 5).unwrap(), vec![1.0]);
    }

    #[test]
    fn three_of_five() {
        let ds = dataset(
            array![[0.0], [1.0], [2.0], [3.0], [4.0], [50.0], [51.0], [52.0], [53.0]],
            &["p", "n", "p", "n", "p", "n", "n", "n", "n"],
        );
        assert!((knn_fit_predict(&ds, &array![[2.0]], 5).unwrap()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn tie_goes_to_lower_index() {
        // four equidistant training points, k=1
        let ds = dataset(array![[1.0], [-1.0], [1.0], [-1.0], [100.0]], &["n", "p", "n", "p", "n"]);
        assert_eq!(knn_fit_predict(&ds, &array![[0.0]], 1).unwrap(), vec![0.0]);
        let ds = dataset(array![[1.0], [-1.0], [1.0], [-1.0], [100.0]], &["p", "n", "n", "p", "n"]);
        assert_eq!(knn_fit_predict(&ds, &array![[0.0]], 1).unwrap(), vec![1.0]);
    }

    #[test]
    fn too_few_rows() {
        let ds = dataset(array![[0.0], [1.0], [2.0]], &["p", "n", "n"]);
        assert!(matches!(knn_fit_predict(&ds, &array![[0.0]], 5), Err(Error::Config(_))));
    }
}
