use rand::seq::index;

use super::{undersample_count, ResampleResult};
use crate::data::Dataset;
use crate::error::Result;
use crate::rng;

const RUS_STREAM: u64 = 0x0072_7573; // "rus"

/// Removes `u` majority points chosen uniformly without replacement.
pub fn random_undersample(ds: &Dataset, alpha: f64, seed: u64) -> Result<ResampleResult> {
    let majority = ds.majority_indices();
    let u = undersample_count(majority.len(), ds.n_minority(), alpha)?;
    if u == 0 {
        return Ok(ResampleResult::identity(ds));
    }
    let mut stream = rng::stream(seed, &[RUS_STREAM]);
    let mut removed: Vec<usize> = index::sample(&mut stream, majority.len(), u)
        .into_iter()
        .map(|j| majority[j])
        .collect();
    removed.sort_unstable();
    Ok(ResampleResult::dropping(ds, removed, None))
}
