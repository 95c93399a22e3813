use rand::seq::index;

use super::{check_alpha, undersample_count, ResampleConfig, ResampleResult};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{knn_from_features, transition_probabilities, Neighborhoods};
use crate::rng;
use crate::walk::{proximity_scores, ScoreVector, WalkConfig};

const ZERO_FILL_STREAM: u64 = 0x7a65_726f; // "zero"

/// Random-walk undersampling over the whole dataset: kNN graph, walks from
/// every minority point, then removal of the `u` majority points with the
/// highest proximity scores.
pub fn rwmau_undersample(ds: &Dataset, cfg: &ResampleConfig) -> Result<ResampleResult> {
    validate(ds, cfg)?;
    let nb = knn_from_features(ds.features(), cfg.k)?;
    rwmau_with_neighbors(ds, cfg, &nb)
}

fn validate(ds: &Dataset, cfg: &ResampleConfig) -> Result<()> {
    check_alpha(cfg.alpha)?;
    if ds.n_minority() == 0 {
        return Err(Error::Config("dataset has no minority points".into()));
    }
    if cfg.k == 0 || cfg.k >= ds.n_rows() {
        return Err(Error::Config(format!(
            "k={} must satisfy 1 <= k <= n-1 = {}",
            cfg.k,
            ds.n_rows() - 1
        )));
    }
    WalkConfig {
        gamma: cfg.gamma,
        walks_per_start: cfg.walks_per_start,
        seed: cfg.seed,
    }
    .validate()
}

/// As [`rwmau_undersample`] with precomputed neighbour lists for `ds`, which
/// may be wider than `cfg.k`.
pub fn rwmau_with_neighbors(ds: &Dataset, cfg: &ResampleConfig, nb: &Neighborhoods) -> Result<ResampleResult> {
    validate(ds, cfg)?;
    if nb.len() != ds.n_rows() {
        return Err(Error::Config("neighbour lists do not match dataset".into()));
    }
    let u = undersample_count(ds.n_majority(), ds.n_minority(), cfg.alpha)?;
    if u == 0 {
        return Ok(ResampleResult::identity(ds));
    }
    let graph = if nb.k() == cfg.k {
        transition_probabilities(nb)
    } else {
        transition_probabilities(&nb.truncate(cfg.k)?)
    };
    let walk = WalkConfig {
        gamma: cfg.gamma,
        walks_per_start: cfg.walks_per_start,
        seed: cfg.seed,
    };
    let scores = proximity_scores(&graph, &ds.minority_indices(), &ds.majority_indices(), &walk)?;
    let removed = select_removals(&scores, u, cfg.seed);
    Ok(ResampleResult::dropping(ds, removed, Some(scores)))
}

/// The `u` highest-scoring nodes, ties broken by ascending index. If fewer
/// than `u` nodes have a positive score, the remainder is drawn uniformly
/// from the zero-score nodes. Returned ascending.
pub fn select_removals(scores: &ScoreVector, u: usize, seed: u64) -> Vec<usize> {
    let ranked = scores.ranked();
    let u = u.min(ranked.len());
    let positive = ranked.iter().take_while(|(_, nu)| *nu > 0.0).count();
    let mut removed: Vec<usize> = if positive >= u {
        ranked[..u].iter().map(|&(i, _)| i).collect()
    } else {
        let zeros: Vec<usize> = ranked[positive..].iter().map(|&(i, _)| i).collect();
        let mut stream = rng::stream(seed, &[ZERO_FILL_STREAM]);
        let fill = index::sample(&mut stream, zeros.len(), u - positive);
        ranked[..positive]
            .iter()
            .map(|&(i, _)| i)
            .chain(fill.into_iter().map(|j| zeros[j]))
            .collect()
    };
    removed.sort_unstable();
    removed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resample::Method;
    use ndarray::array;

    fn chain() -> Dataset {
        // with k=1 every edge has probability 1: 0<->1, 2<->3, 4<->5
        let features = array![[0.0], [0.4], [10.0], [10.4], [100.0], [101.0]];
        let labels = ["p", "n", "p", "n", "n", "n"].map(String::from);
        Dataset::from_raw_labels(features, &labels, None).unwrap()
    }

    #[test]
    fn zero_budget_is_identity() {
        let ds = chain();
        let cfg = ResampleConfig {
            alpha: 0.1,
            k: 1,
            gamma: 3,
            ..Default::default()
        };
        let out = rwmau_undersample(&ds, &cfg).unwrap();
        assert_eq!(out.augmented, ds);
        assert!(out.removed.is_empty());
    }

    #[test]
    fn removes_the_reachable_majority() {
        let ds = chain();
        let cfg = ResampleConfig {
            alpha: 1.0,
            k: 1,
            gamma: 3,
            seed: 9,
            method: Method::Rwmau,
            ..Default::default()
        };
        let out = rwmau_undersample(&ds, &cfg).unwrap();
        assert_eq!(out.removed, vec![1, 3]);
        assert_eq!(out.augmented.labels(), &[1, 1, 0, 0]);
        let scores = out.scores.unwrap();
        // visited at steps 1 and 3
        assert!((scores.get(1).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(scores.get(4), Some(0.0));
        assert_eq!(scores.get(5), Some(0.0));
    }

    #[test]
    fn k_must_fit() {
        let cfg = ResampleConfig {
            k: 6,
            ..Default::default()
        };
        assert!(matches!(rwmau_undersample(&chain(), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn zero_plateau_is_filled_randomly() {
        let ds = chain();
        let graph = transition_probabilities(&knn_from_features(ds.features(), 1).unwrap());
        let scores = proximity_scores(&graph, &[0, 2], &[1, 3, 4, 5], &WalkConfig::new(3, 1)).unwrap();
        let removed = select_removals(&scores, 3, 4);
        assert_eq!(removed.len(), 3);
        assert!(removed.contains(&1) && removed.contains(&3));
        assert!(removed.contains(&4) ^ removed.contains(&5));
    }
}
