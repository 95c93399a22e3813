//! Random walks from minority nodes and the harmonic-weighted visit scores
//! they induce on majority nodes.
//!
//! A walk of length `gamma` records the `gamma` nodes reached by successive
//! transitions; the start node is step 0 and is not recorded. Each time a
//! majority node `l` is reached at step `b` (1-based) its score grows by
//! `1/b`, so early and frequent visits weigh most.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::significant;
use crate::graph::TransitionGraph;
use crate::rng;

const WALK_STREAM: u64 = 0x7761_6c6b; // "walk"

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub gamma: usize,
    pub walks_per_start: usize,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(gamma: usize, seed: u64) -> Self {
        WalkConfig {
            gamma,
            walks_per_start: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma == 0 {
            return Err(Error::Config("walk length gamma must be >= 1".into()));
        }
        if self.walks_per_start == 0 {
            return Err(Error::Config("walks per start must be >= 1".into()));
        }
        Ok(())
    }
}

/// Independent stream for walk `replicate` from node `start`.
pub fn walk_rng(seed: u64, start: usize, replicate: usize) -> ChaCha8Rng {
    rng::stream(seed, &[WALK_STREAM, start as u64, replicate as u64])
}

/// The `gamma` nodes visited after leaving `start`.
pub fn random_walk<R: Rng + ?Sized>(
    g: &TransitionGraph,
    start: usize,
    gamma: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut path = Vec::with_capacity(gamma);
    let mut at = start;
    for _ in 0..gamma {
        at = g.step(at, rng.gen::<f64>());
        path.push(at);
    }
    path
}

/// Proximity score per majority node. Every majority index is present,
/// unvisited nodes with score 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreVector {
    scores: BTreeMap<usize, f64>,
}

impl ScoreVector {
    pub fn get(&self, node: usize) -> Option<f64> {
        self.scores.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `(node, score)` in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.scores.iter().map(|(&k, &v)| (k, v))
    }

    /// Descending score, ascending node index on ties.
    pub fn ranked(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self.iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// `node_index nu` per line in ranked order, 12 significant digits.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (node, nu) in self.ranked() {
            writeln!(out, "{node} {}", significant(nu, 12))?;
        }
        Ok(())
    }
}

/// Largest score any node can reach: each walk adds at most
/// `1 + 1/2 + ... + 1/gamma`.
pub fn score_upper_bound(n_minority: usize, cfg: &WalkConfig) -> f64 {
    let harmonic: f64 = (1..=cfg.gamma).map(|b| 1.0 / b as f64).sum();
    (cfg.walks_per_start * n_minority) as f64 * harmonic
}

pub fn proximity_scores(
    g: &TransitionGraph,
    minority: &[usize],
    majority: &[usize],
    cfg: &WalkConfig,
) -> Result<ScoreVector> {
    cfg.validate()?;
    let n = g.len();
    let mut is_majority = vec![false; n];
    for &l in majority {
        if l >= n {
            return Err(Error::Config(format!("majority index {l} outside graph of {n} nodes")));
        }
        is_majority[l] = true;
    }
    for &s in minority {
        if s >= n || is_majority[s] {
            return Err(Error::Config(format!(
                "minority index {s} is out of range or also majority"
            )));
        }
    }

    // Visits are gathered per start in parallel, then folded in start order
    // so the floating-point sums do not depend on scheduling.
    let visits: Vec<Vec<(usize, f64)>> = minority
        .par_iter()
        .map(|&start| {
            let mut hits = Vec::new();
            for rep in 0..cfg.walks_per_start {
                let mut stream = walk_rng(cfg.seed, start, rep);
                for (step, node) in random_walk(g, start, cfg.gamma, &mut stream).into_iter().enumerate() {
                    if is_majority[node] {
                        hits.push((node, 1.0 / (step + 1) as f64));
                    }
                }
            }
            hits
        })
        .collect();

    let mut scores: BTreeMap<usize, f64> = majority.iter().map(|&l| (l, 0.0)).collect();
    for (node, w) in visits.into_iter().flatten() {
        *scores.get_mut(&node).expect("majority node") += w;
    }
    Ok(ScoreVector { scores })
}
