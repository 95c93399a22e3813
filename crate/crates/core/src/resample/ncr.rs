use super::ResampleResult;
use crate::data::{Dataset, MAJORITY, MINORITY};
use crate::error::{Error, Result};
use crate::graph::knn_from_features;

pub const NCR_NEIGHBORS: usize = 3;

/// Neighbourhood cleaning rule. A majority point is removed when the
/// majority vote of its `k` nearest neighbours is minority; for every
/// minority point outvoted by its neighbours, the majority points among
/// those neighbours are removed as well. Minority points are never removed.
pub fn ncr_clean(ds: &Dataset, k: usize) -> Result<ResampleResult> {
    if ds.n_rows() <= k {
        return Err(Error::Config(format!(
            "cleaning rule needs more than {k} rows, got {}",
            ds.n_rows()
        )));
    }
    let nb = knn_from_features(ds.features(), k)?;
    let labels = ds.labels();
    let mut drop = vec![false; ds.n_rows()];
    for (i, &y) in labels.iter().enumerate() {
        let neighbors = nb.neighbors(i);
        let minority_votes = neighbors.iter().filter(|&&j| labels[j] == MINORITY).count();
        let predicted = if 2 * minority_votes > k { MINORITY } else { MAJORITY };
        if predicted == y {
            continue;
        }
        if y == MAJORITY {
            drop[i] = true;
        } else {
            for &j in neighbors {
                if labels[j] == MAJORITY {
                    drop[j] = true;
                }
            }
        }
    }
    let removed = (0..ds.n_rows()).filter(|&i| drop[i]).collect();
    Ok(ResampleResult::dropping(ds, removed, None))
}
