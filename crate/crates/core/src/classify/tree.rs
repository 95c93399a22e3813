//! Binary decision tree grown by information gain (entropy criterion).
//!
//! Split candidates are midpoints between consecutive distinct values of a
//! feature. Features are presorted once; each split partitions the sorted
//! index lists stably so no node re-sorts.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MINORITY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: Some(25),
            min_leaf: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// `[P(majority), P(minority)]` from the training frequencies.
        proba: [f64; 2],
        samples: usize,
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

/// Shannon entropy in bits of a two-class node.
pub fn entropy(n_minority: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    [n_minority, n - n_minority]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

/// Entropy reduction from splitting a node into `(left_minority, left_n)`
/// and the complement.
pub fn information_gain(n_minority: usize, n: usize, left_minority: usize, left_n: usize) -> f64 {
    let right_n = n - left_n;
    let right_minority = n_minority - left_minority;
    entropy(n_minority, n)
        - (left_n as f64 / n as f64) * entropy(left_minority, left_n)
        - (right_n as f64 / n as f64) * entropy(right_minority, right_n)
}

const GAIN_EPS: f64 = 1e-12;

struct Grower<'a> {
    x: &'a Array2<f64>,
    y: &'a [u8],
    params: TreeParams,
    nodes: Vec<Node>,
    go_left: Vec<bool>,
}

struct Best {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Grower<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let minority = rows.iter().filter(|&&i| self.y[i] == MINORITY).count();
        let n = rows.len() as f64;
        let p1 = minority as f64 / n;
        self.nodes.push(Node::Leaf {
            proba: [(rows.len() - minority) as f64 / n, p1],
            samples: rows.len(),
        });
        self.nodes.len() - 1
    }

    fn best_split(&self, sorted: &[Vec<usize>], n_minority: usize) -> Option<Best> {
        let n = sorted[0].len();
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<Best> = None;
        for (feature, order) in sorted.iter().enumerate() {
            let col = self.x.column(feature);
            let mut left_minority = 0;
            for pos in 1..n {
                if self.y[order[pos - 1]] == MINORITY {
                    left_minority += 1;
                }
                if pos < min_leaf || n - pos < min_leaf {
                    continue;
                }
                let (lo, hi) = (col[order[pos - 1]], col[order[pos]]);
                if lo >= hi {
                    continue;
                }
                let gain = information_gain(n_minority, n, left_minority, pos);
                if best.as_ref().is_none_or(|b| gain > b.gain + GAIN_EPS) {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(Best {
                        feature,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, sorted: Vec<Vec<usize>>, depth: usize) -> usize {
        let rows = &sorted[0];
        let n = rows.len();
        let n_minority = rows.iter().filter(|&&i| self.y[i] == MINORITY).count();
        let depth_capped = self.params.max_depth.is_some_and(|m| depth >= m);
        if n_minority == 0 || n_minority == n || depth_capped || n < 2 * self.params.min_leaf.max(1) {
            return self.leaf(rows);
        }
        let Some(best) = self.best_split(&sorted, n_minority) else {
            return self.leaf(rows);
        };

        let col = self.x.column(best.feature);
        for &i in rows {
            self.go_left[i] = col[i] <= best.threshold;
        }
        let mut left_lists = Vec::with_capacity(sorted.len());
        let mut right_lists = Vec::with_capacity(sorted.len());
        for list in sorted {
            let (l, r): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&i| self.go_left[i]);
            left_lists.push(l);
            right_lists.push(r);
        }

        let id = self.nodes.len();
        self.nodes.push(Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(left_lists, depth + 1);
        let right = self.grow(right_lists, depth + 1);
        if let Node::Split { left: l, right: r, .. } = &mut self.nodes[id] {
            *l = left;
            *r = right;
        }
        id
    }
}

impl DecisionTree {
    /// Fits on the rows of `ds` listed in `rows` (duplicates allowed, as in
    /// a bootstrap sample).
    pub fn fit_rows(ds: &Dataset, rows: &[usize], params: TreeParams) -> DecisionTree {
        let x = ds.features();
        let sorted: Vec<Vec<usize>> = (0..x.ncols())
            .map(|f| {
                let col = x.column(f);
                let mut order = rows.to_vec();
                order.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
                order
            })
            .collect();
        let mut grower = Grower {
            x,
            y: ds.labels(),
            params,
            nodes: Vec::new(),
            go_left: vec![false; x.nrows()],
        };
        if rows.is_empty() {
            grower.nodes.push(Node::Leaf {
                proba: [1.0, 0.0],
                samples: 0,
            });
        } else {
            grower.grow(sorted, 0);
        }
        DecisionTree { nodes: grower.nodes }
    }

    pub fn fit(ds: &Dataset, params: TreeParams) -> DecisionTree {
        let rows: Vec<usize> = (0..ds.n_rows()).collect();
        Self::fit_rows(ds, &rows, params)
    }

    pub fn from_nodes(nodes: Vec<Node>) -> DecisionTree {
        DecisionTree { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Number of split levels; a single leaf has depth 0.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    fn leaf_of(&self, row: ArrayView1<f64>) -> &Node {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
                leaf => return leaf,
            }
        }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        match self.leaf_of(row) {
            Node::Leaf { proba, .. } => proba[1],
            Node::Split { .. } => unreachable!("routing ends at a leaf"),
        }
    }

    /// Minority-class probability per row.
    pub fn predict_proba(&self, features: &Array2<f64>) -> Vec<f64> {
        features.outer_iter().map(|r| self.predict_row(r)).collect()
    }
}
