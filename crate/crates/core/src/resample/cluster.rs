use ndarray::{concatenate, Array2, Axis};
use rand::seq::index;
use rayon::prelude::*;

use super::{undersample_count, ResampleResult};
use crate::data::{Dataset, MAJORITY};
use crate::error::{Error, Result};
use crate::rng;

const KMEANS_STREAM: u64 = 0x6b6d_6561_6e73; // "kmeans"

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub max_iter: usize,
    /// Stop once no centre moves farther than this.
    pub tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's k-means with `m` centres initialised at distinct random points.
/// An empty cluster is re-seeded at the point farthest from its centre.
pub fn kmeans(points: &Array2<f64>, m: usize, seed: u64, params: KMeansParams) -> Result<Array2<f64>> {
    let (n, d) = points.dim();
    if m == 0 || m > n {
        return Err(Error::Config(format!("cannot fit {m} centres to {n} points")));
    }
    let points = points.as_standard_layout();
    let data = points.as_slice().expect("standard layout");
    let row = |i: usize| &data[i * d..(i + 1) * d];

    let mut stream = rng::stream(seed, &[KMEANS_STREAM]);
    let mut centers: Vec<f64> = index::sample(&mut stream, n, m)
        .into_iter()
        .flat_map(|i| row(i).to_vec())
        .collect();

    for _ in 0..params.max_iter {
        let assignment: Vec<(usize, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let p = row(i);
                let mut best = (0, f64::INFINITY);
                for c in 0..m {
                    let dist = sq_dist(p, &centers[c * d..(c + 1) * d]);
                    if dist < best.1 {
                        best = (c, dist);
                    }
                }
                best
            })
            .collect();

        let mut sums = vec![0.0; m * d];
        let mut counts = vec![0usize; m];
        for (i, &(c, _)) in assignment.iter().enumerate() {
            counts[c] += 1;
            for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(row(i)) {
                *s += v;
            }
        }

        let mut reseed_order: Vec<usize> = (0..n).collect();
        reseed_order.sort_by(|&a, &b| assignment[b].1.total_cmp(&assignment[a].1).then(a.cmp(&b)));
        let mut reseed = reseed_order.into_iter();

        let mut shift: f64 = 0.0;
        let mut next = vec![0.0; m * d];
        for c in 0..m {
            let target = &mut next[c * d..(c + 1) * d];
            if counts[c] > 0 {
                for (t, s) in target.iter_mut().zip(&sums[c * d..(c + 1) * d]) {
                    *t = s / counts[c] as f64;
                }
            } else {
                let far = reseed.next().expect("more points than centres");
                target.copy_from_slice(row(far));
            }
            shift = shift.max(sq_dist(target, &centers[c * d..(c + 1) * d]).sqrt());
        }
        centers = next;
        if shift <= params.tol {
            break;
        }
    }
    Ok(Array2::from_shape_vec((m, d), centers).expect("m*d centre values"))
}

/// Replaces the majority class by `n_maj - u` k-means centroids. Minority
/// rows come first, unchanged, followed by the synthetic majority rows.
pub fn cluster_centroid_undersample(ds: &Dataset, alpha: f64, seed: u64) -> Result<ResampleResult> {
    let majority = ds.majority_indices();
    let u = undersample_count(majority.len(), ds.n_minority(), alpha)?;
    if u == 0 {
        return Ok(ResampleResult::identity(ds));
    }
    let target = majority.len() - u;
    let maj_points = ds.features().select(Axis(0), &majority);
    let centroids = kmeans(&maj_points, target, seed, KMeansParams::default())?;
    let minority = ds.minority_indices();
    let min_points = ds.features().select(Axis(0), &minority);
    let features = concatenate(Axis(0), &[min_points.view(), centroids.view()])
        .map_err(|e| Error::Format(e.to_string()))?;
    let mut labels: Vec<u8> = minority.iter().map(|&i| ds.labels()[i]).collect();
    labels.extend(std::iter::repeat_n(MAJORITY, target));
    Ok(ResampleResult {
        augmented: ds.with_rows(features, labels)?,
        removed: majority,
        scores: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;

    #[test]
    fn as_many_centres_as_points_reproduces_points() {
        let points = array![[0.0, 1.0], [2.0, 3.0], [4.0, -1.0], [7.5, 0.25]];
        let centers = kmeans(&points, 4, 3, KMeansParams::default()).unwrap();
        let mut got: Vec<Vec<f64>> = centers.outer_iter().map(|r| r.to_vec()).collect();
        got.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let want: Vec<Vec<f64>> = points.outer_iter().map(|r| r.to_vec()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn separated_blobs_recover_means() {
        let mut stream = rng::stream(42, &[]);
        let mut rows = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (100.0, 100.0)] {
            for _ in 0..25 {
                rows.push([cx + stream.gen_range(-1.0..1.0), cy + stream.gen_range(-1.0..1.0)]);
            }
        }
        let points = Array2::from_shape_fn((50, 2), |(i, j)| rows[i][j]);
        let mean = |lo: usize| -> [f64; 2] {
            let mut m = [0.0; 2];
            for r in &rows[lo..lo + 25] {
                m[0] += r[0] / 25.0;
                m[1] += r[1] / 25.0;
            }
            m
        };
        for seed in 0..5 {
            let centers = kmeans(&points, 2, seed, KMeansParams::default()).unwrap();
            let mut got: Vec<Vec<f64>> = centers.outer_iter().map(|r| r.to_vec()).collect();
            got.sort_by(|a, b| a[0].total_cmp(&b[0]));
            for (g, want) in got.iter().zip([mean(0), mean(25)]) {
                assert!((g[0] - want[0]).abs() < 1e-6 && (g[1] - want[1]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn output_majority_count_is_target() {
        let features = Array2::from_shape_fn((30, 2), |(i, j)| ((i * 7 + j * 3) % 11) as f64);
        let labels: Vec<String> = (0..30).map(|i| if i % 5 == 0 { "p" } else { "n" }.to_string()).collect();
        let ds = Dataset::from_raw_labels(features, &labels, None).unwrap();
        let out = cluster_centroid_undersample(&ds, 0.5, 1).unwrap();
        // n_maj = 24, n_min = 6, u = 9
        assert_eq!(out.augmented.n_majority(), 15);
        assert_eq!(out.augmented.n_minority(), 6);
        let min_rows = ds.features().select(Axis(0), &ds.minority_indices());
        assert_eq!(out.augmented.features().slice(ndarray::s![..6, ..]), min_rows);
    }

    #[test]
    fn too_many_centres() {
        assert!(kmeans(&array![[0.0], [1.0]], 3, 0, KMeansParams::default()).is_err());
    }
}
