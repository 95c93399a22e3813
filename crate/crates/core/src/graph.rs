//! Directed kNN graph with exponential-decay transition probabilities.
//!
//! Every point links to its `k` nearest neighbours. The weight of the edge
//! `i -> j` is `exp(-d_ij / d_ik)` normalised over the neighbourhood, where
//! `d_ik` is the distance to the k-th neighbour. Dividing by `d_ik` makes
//! the probabilities invariant to a global rescaling of the coordinates.

use std::cmp::Ordering;
use std::io::{self, Write};

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fmt::significant;

/// Euclidean distance, accumulated left to right so that `d(a,b)` and
/// `d(b,a)` are bit-identical.
pub fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Dense symmetric matrix of pairwise Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn pairwise_distances(features: &Array2<f64>) -> Result<DistanceMatrix> {
    let n = features.nrows();
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 points, got {n}")));
    }
    let data: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = features.row(i);
            (0..n).map(move |j| if i == j { 0.0 } else { euclidean(a, features.row(j)) })
        })
        .collect();
    Ok(DistanceMatrix { n, data })
}

/// Neighbour lists of equal length `k`, sorted by ascending distance with
/// ties broken by ascending node index. Distances travel with the indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhoods {
    k: usize,
    index: Vec<usize>,
    distance: Vec<f64>,
}

impl Neighborhoods {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.index.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.index[i * self.k..(i + 1) * self.k]
    }

    pub fn distances(&self, i: usize) -> &[f64] {
        &self.distance[i * self.k..(i + 1) * self.k]
    }

    /// The `k`-NN lists are prefixes of the lists for any larger `k` under
    /// the (distance, index) order, so a wide neighbourhood can be computed
    /// once and narrowed per candidate.
    pub fn truncate(&self, k: usize) -> Result<Neighborhoods> {
        if k == 0 || k > self.k {
            return Err(Error::Config(format!(
                "cannot narrow {}-NN lists to k={k}",
                self.k
            )));
        }
        let n = self.len();
        let mut index = Vec::with_capacity(n * k);
        let mut distance = Vec::with_capacity(n * k);
        for i in 0..n {
            index.extend_from_slice(&self.neighbors(i)[..k]);
            distance.extend_from_slice(&self.distances(i)[..k]);
        }
        Ok(Neighborhoods { k, index, distance })
    }
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

fn nearest_from_row(i: usize, dist_to: impl Iterator<Item = (f64, usize)>, k: usize) -> Vec<(f64, usize)> {
    let mut cand: Vec<(f64, usize)> = dist_to.filter(|&(_, j)| j != i).collect();
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, by_distance_then_index);
        cand.truncate(k);
    }
    cand.sort_unstable_by(by_distance_then_index);
    cand
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::Config(format!(
            "neighbourhood size k={k} must satisfy 1 <= k <= n-1 = {}",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

fn collect(k: usize, rows: Vec<Vec<(f64, usize)>>) -> Neighborhoods {
    let mut index = Vec::with_capacity(rows.len() * k);
    let mut distance = Vec::with_capacity(rows.len() * k);
    for row in rows {
        for (d, j) in row {
            index.push(j);
            distance.push(d);
        }
    }
    Neighborhoods { k, index, distance }
}

pub fn knn_neighbors(dm: &DistanceMatrix, k: usize) -> Result<Neighborhoods> {
    check_k(dm.len(), k)?;
    let rows = (0..dm.len())
        .into_par_iter()
        .map(|i| nearest_from_row(i, dm.row(i).iter().copied().zip(0..), k))
        .collect();
    Ok(collect(k, rows))
}

/// Same lists as `knn_neighbors(&pairwise_distances(features)?, k)` without
/// materialising the n×n matrix.
pub fn knn_from_features(features: &Array2<f64>, k: usize) -> Result<Neighborhoods> {
    check_k(features.nrows(), k)?;
    let rows = (0..features.nrows())
        .into_par_iter()
        .map(|i| {
            let a = features.row(i);
            let dists = features
                .rows()
                .into_iter()
                .enumerate()
                .map(move |(j, b)| (if i == j { 0.0 } else { euclidean(a, b) }, j));
            nearest_from_row(i, dists, k)
        })
        .collect();
    Ok(collect(k, rows))
}

/// Row-stochastic sparse transition matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

const STOCHASTIC_TOL: f64 = 1e-9;

impl TransitionGraph {
    /// Builds a graph from explicit out-edge lists. Each row must be
    /// non-empty, free of self-loops and duplicate targets, have positive
    /// probabilities, and sum to 1 within 1e-9.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<TransitionGraph> {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        offsets.push(0);
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::Config(format!("node {i} has no out-edges")));
            }
            let mut seen = Vec::with_capacity(row.len());
            for &(j, p) in row {
                if j >= n || j == i || seen.contains(&j) {
                    return Err(Error::Config(format!("invalid edge {i} -> {j}")));
                }
                if !(p > 0.0 && p.is_finite()) {
                    return Err(Error::Config(format!("edge {i} -> {j} has probability {p}")));
                }
                seen.push(j);
                targets.push(j);
                probs.push(p);
            }
            let total: f64 = row.iter().map(|e| e.1).sum();
            if (total - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::Config(format!("row {i} sums to {total}")));
            }
            offsets.push(targets.len());
        }
        Ok(Self::with_cumulative(offsets, targets, probs))
    }

    fn with_cumulative(offsets: Vec<usize>, targets: Vec<usize>, probs: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(probs.len());
        for w in offsets.windows(2) {
            let mut acc = 0.0;
            for &p in &probs[w[0]..w[1]] {
                acc += p;
                cumulative.push(acc);
            }
        }
        TransitionGraph {
            offsets,
            targets,
            probs,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn probabilities(&self, i: usize) -> &[f64] {
        &self.probs[self.offsets[i]..self.offsets[i + 1]]
    }

    /// `p_ij`, zero when `j` is not an out-neighbour of `i`.
    pub fn probability(&self, i: usize, j: usize) -> f64 {
        self.neighbors(i)
            .iter()
            .position(|&t| t == j)
            .map_or(0.0, |p| self.probabilities(i)[p])
    }

    /// Maps a uniform draw in `[0,1)` to the next node. Rounding slack in the
    /// cumulative sums falls to the last neighbour.
    pub fn step(&self, i: usize, u: f64) -> usize {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        let cum = &self.cumulative[lo..hi];
        let pos = cum.partition_point(|&c| c <= u).min(hi - lo - 1);
        self.targets[lo + pos]
    }

    /// Writes `src dst prob` per edge, probabilities to 12 significant digits.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for i in 0..self.len() {
            for (&j, &p) in self.neighbors(i).iter().zip(self.probabilities(i)) {
                writeln!(out, "{i} {j} {}", significant(p, 12))?;
            }
        }
        Ok(())
    }
}

/// Exponential-decay weights over each neighbourhood. When the k-th
/// neighbour coincides with the node itself every weight is equal, so the
/// row falls back to uniform `1/k`.
pub fn transition_probabilities(nb: &Neighborhoods) -> TransitionGraph {
    let k = nb.k();
    let n = nb.len();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::with_capacity(n * k);
    let mut probs = Vec::with_capacity(n * k);
    offsets.push(0);
    for i in 0..n {
        let dist = nb.distances(i);
        let scale = dist[k - 1];
        targets.extend_from_slice(nb.neighbors(i));
        if scale > 0.0 {
            let weights: Vec<f64> = dist.iter().map(|d| (-d / scale).exp()).collect();
            let total: f64 = weights.iter().sum();
            probs.extend(weights.iter().map(|w| w / total));
        } else {
            probs.extend(std::iter::repeat_n(1.0 / k as f64, k));
        }
        offsets.push(targets.len());
    }
    TransitionGraph::with_cumulative(offsets, targets, probs)
}

/// kNN graph over all rows of `features`.
pub fn build_graph(features: &Array2<f64>, k: usize) -> Result<TransitionGraph> {
    Ok(transition_probabilities(&knn_from_features(features, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn three_four_five() {
        let dm = pairwise_distances(&array![[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(dm.get(0, 1), 5.0);
        assert_eq!(dm.get(1, 0), 5.0);
        assert_eq!(dm.get(0, 0), 0.0);
    }

    #[test]
    fn duplicates_have_zero_distance() {
        let dm = pairwise_distances(&array![[1.5, -2.0], [1.5, -2.0], [0.0, 0.0]]).unwrap();
        assert_eq!(dm.get(0, 1), 0.0);
    }

    #[test]
    fn single_point_is_rejected() {
        assert!(pairwise_distances(&array![[1.0]]).is_err());
    }

    #[test]
    fn collinear_neighbors() {
        let dm = pairwise_distances(&array![[0.0], [1.0], [2.0], [4.0]]).unwrap();
        let nb = knn_neighbors(&dm, 2).unwrap();
        assert_eq!(nb.neighbors(0), &[1, 2]);
        assert_eq!(nb.neighbors(3), &[2, 1]);
        // node 1: distances 1 (to 0), 1 (to 2) -> index tie-break
        assert_eq!(nb.neighbors(1), &[0, 2]);
    }

    #[test]
    fn identical_points_tie_by_index() {
        let features = Array2::zeros((4, 3));
        let nb = knn_neighbors(&pairwise_distances(&features).unwrap(), 2).unwrap();
        assert_eq!(nb.neighbors(0), &[1, 2]);
        assert_eq!(nb.neighbors(2), &[0, 1]);
        let g = transition_probabilities(&nb);
        assert_eq!(g.probabilities(0), &[0.5, 0.5]);
    }

    #[test]
    fn k_bounds() {
        let dm = pairwise_distances(&array![[0.0], [1.0], [2.0]]).unwrap();
        assert!(matches!(knn_neighbors(&dm, 3), Err(Error::Config(_))));
        assert!(matches!(knn_neighbors(&dm, 0), Err(Error::Config(_))));
        let nb = knn_neighbors(&dm, 2).unwrap();
        for i in 0..3 {
            let mut all = nb.neighbors(i).to_vec();
            all.sort_unstable();
            let expected: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            assert_eq!(all, expected);
        }
    }

    #[test]
    fn two_neighbor_probabilities() {
        // node 0 at origin, neighbours at distance 1 and 2
        let features = array![[0.0], [1.0], [-2.0]];
        let g = build_graph(&features, 2).unwrap();
        let p = g.probabilities(0);
        let (a, b) = ((-0.5f64).exp(), (-1.0f64).exp());
        assert!((p[0] - a / (a + b)).abs() < 1e-15);
        assert!((p[1] - b / (a + b)).abs() < 1e-15);
        assert!((p[0] - 0.6225).abs() < 1e-4);
        assert!((p[1] - 0.3775).abs() < 1e-4);
    }

    #[test]
    fn equal_distances_are_uniform_and_non_neighbors_zero() {
        let features = array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [5.0, 5.0]];
        let g = build_graph(&features, 3).unwrap();
        for &p in g.probabilities(0) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(g.probability(0, 4), 0.0);
        assert_eq!(g.probability(0, 0), 0.0);
    }

    #[test]
    fn from_rows_validation() {
        assert!(TransitionGraph::from_rows(vec![vec![(1, 1.0)], vec![(0, 1.0)]]).is_ok());
        assert!(TransitionGraph::from_rows(vec![vec![(0, 1.0)], vec![(0, 1.0)]]).is_err());
        assert!(TransitionGraph::from_rows(vec![vec![(1, 0.5)], vec![(0, 1.0)]]).is_err());
        assert!(TransitionGraph::from_rows(vec![vec![], vec![(0, 1.0)]]).is_err());
    }

    #[test]
    fn step_inverts_cumulative() {
        let g = TransitionGraph::from_rows(vec![
            vec![(1, 0.25), (2, 0.75)],
            vec![(0, 1.0)],
            vec![(0, 1.0)],
        ])
        .unwrap();
        assert_eq!(g.step(0, 0.0), 1);
        assert_eq!(g.step(0, 0.2499), 1);
        assert_eq!(g.step(0, 0.25), 2);
        assert_eq!(g.step(0, 0.999_999), 2);
    }

    #[test]
    fn edge_list_format() {
        let g = TransitionGraph::from_rows(vec![
            vec![(1, 1.0 / 3.0), (2, 2.0 / 3.0)],
            vec![(0, 1.0)],
            vec![(0, 1.0)],
        ])
        .unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "0 1 0.333333333333\n0 2 0.666666666667\n1 0 1\n2 0 1\n"
        );
    }
}
