//! Evaluation metrics and rank-based comparison of methods across datasets.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::MINORITY;
use crate::error::{Error, Result};

pub mod special;

use special::{chi2_sf, two_sided_normal_p};

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (minority, majority) pairs in which the minority row scores higher, ties
/// counting one half. Pair counts are kept in integers.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Metric(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&y| y == MINORITY).count() as u128;
    let n_neg = labels.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric("AUC needs both classes in the labels".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the Mann-Whitney U of the minority class
    let mut doubled_u: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let pos = order[start..end].iter().filter(|&&i| labels[i] == MINORITY).count() as u128;
        let neg = (end - start) as u128 - pos;
        doubled_u += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        start = end;
    }
    Ok(doubled_u as f64 / (2 * n_pos * n_neg) as f64)
}

pub const F1_THRESHOLD: f64 = 0.5;

/// F1 of the minority class, predicting minority when `score >= threshold`.
/// Zero when precision and recall are both zero.
pub fn f1_minority(scores: &[f64], labels: &[u8], threshold: f64) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&s, &y) in scores.iter().zip(labels) {
        match (s >= threshold, y == MINORITY) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Datasets × methods grid of mean metric values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
    /// `values[dataset][method]`
    pub values: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(datasets: Vec<String>, methods: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != datasets.len() {
            return Err(Error::Metric(format!(
                "{} rows for {} datasets",
                values.len(),
                datasets.len()
            )));
        }
        for (name, row) in datasets.iter().zip(&values) {
            if row.len() != methods.len() {
                return Err(Error::Metric(format!(
                    "row {name:?} has {} cells for {} methods",
                    row.len(),
                    methods.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Metric(format!("row {name:?} has a missing or non-finite cell")));
            }
        }
        Ok(ResultTable {
            datasets,
            methods,
            values,
        })
    }

    /// Header `dataset,<methods...>`, one row per dataset. Cells that fail to
    /// parse, including `NA`, are rejected.
    pub fn from_csv(text: &str) -> Result<Self> {
        let (table, dropped) = Self::from_csv_skipping_missing(text)?;
        match dropped.first() {
            None => Ok(table),
            Some(name) => Err(Error::Metric(format!("row {name:?} has a missing cell"))),
        }
    }

    /// As [`ResultTable::from_csv`], but rows holding an `NA` cell are left
    /// out and their dataset names returned alongside the table.
    pub fn from_csv_skipping_missing(text: &str) -> Result<(Self, Vec<String>)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Metric("empty result table".into()))?;
        let methods: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
        let mut datasets = Vec::new();
        let mut values = Vec::new();
        let mut dropped = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut cells = line.split(',').map(str::trim);
            let name = cells.next().unwrap_or_default().to_string();
            let row = cells
                .enumerate()
                .map(|(j, c)| match c {
                    "NA" => Ok(None),
                    _ => c.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                        row: i + 2,
                        column: j + 2,
                        message: format!("cannot parse {c:?}"),
                    }),
                })
                .collect::<Result<Vec<Option<f64>>>>()?;
            match row.into_iter().collect::<Option<Vec<f64>>>() {
                Some(row) => {
                    datasets.push(name);
                    values.push(row);
                }
                None => dropped.push(name),
            }
        }
        if datasets.is_empty() {
            return Err(Error::Metric("result table has no complete dataset rows".into()));
        }
        Ok((ResultTable::new(datasets, methods, values)?, dropped))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("dataset,{}\n", self.methods.join(","));
        for (name, row) in self.datasets.iter().zip(&self.values) {
            out.push_str(name);
            for v in row {
                let _ = write!(out, ",{v:.4}");
            }
            out.push('\n');
        }
        out
    }
}

/// Ranks `1..=m` within one row (1 = best); tied values share the mean of
/// the ranks they span.
pub fn rank_row(values: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let c = values[a].total_cmp(&values[b]);
        if higher_is_better {
            c.reverse()
        } else {
            c
        }
    });
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

pub fn average_ranks(table: &ResultTable, higher_is_better: bool) -> Result<Vec<f64>> {
    let m = table.methods.len();
    if m < 2 || table.datasets.is_empty() {
        return Err(Error::Metric(format!(
            "average ranks need >= 2 methods and >= 1 dataset, got {m} and {}",
            table.datasets.len()
        )));
    }
    let mut sums = vec![0.0; m];
    for row in &table.values {
        for (s, r) in sums.iter_mut().zip(rank_row(row, higher_is_better)) {
            *s += r;
        }
    }
    let n = table.datasets.len() as f64;
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// Finner step-down adjustment. Output is aligned with the input order.
pub fn finner_adjust(raw: &[f64]) -> Vec<f64> {
    let k = raw.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let mut adjusted = vec![0.0; k];
    let mut running: f64 = 0.0;
    for (step, &i) in order.iter().enumerate() {
        let exponent = k as f64 / (step + 1) as f64;
        let p = 1.0 - (1.0 - raw[i]).powf(exponent);
        running = running.max(p).max(raw[i]).min(1.0);
        adjusted[i] = running;
    }
    adjusted
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub method: usize,
    pub z: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub avg_ranks: Vec<f64>,
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
    /// Method with the best (lowest) average rank.
    pub control: usize,
    /// One entry per non-control method, in column order.
    pub comparisons: Vec<Comparison>,
}

/// Friedman test on average ranks, then z-tests of every method against the
/// best-ranked one with Finner-adjusted p-values. Higher values are better.
pub fn friedman_finner(table: &ResultTable) -> Result<FriedmanResult> {
    let m = table.methods.len();
    let n = table.datasets.len();
    if m < 3 {
        return Err(Error::Metric(format!("Friedman test needs >= 3 methods, got {m}")));
    }
    if n < 2 {
        return Err(Error::Metric(format!("Friedman test needs >= 2 datasets, got {n}")));
    }
    let avg_ranks = average_ranks(table, true)?;
    let (mf, nf) = (m as f64, n as f64);
    let sum_sq: f64 = avg_ranks.iter().map(|r| r * r).sum();
    let chi2 = (12.0 * nf / (mf * (mf + 1.0)) * (sum_sq - mf * (mf + 1.0).powi(2) / 4.0)).max(0.0);
    let df = m - 1;
    let p_value = chi2_sf(chi2, df as f64);

    let control = (0..m)
        .min_by(|&a, &b| avg_ranks[a].total_cmp(&avg_ranks[b]).then(a.cmp(&b)))
        .expect("m >= 3");
    let se = (mf * (mf + 1.0) / (6.0 * nf)).sqrt();
    let mut comparisons: Vec<Comparison> = (0..m)
        .filter(|&j| j != control)
        .map(|j| {
            let z = (avg_ranks[j] - avg_ranks[control]) / se;
            Comparison {
                method: j,
                z,
                p_raw: two_sided_normal_p(z),
                p_adjusted: 0.0,
            }
        })
        .collect();
    let raw: Vec<f64> = comparisons.iter().map(|c| c.p_raw).collect();
    for (c, p) in comparisons.iter_mut().zip(finner_adjust(&raw)) {
        c.p_adjusted = p;
    }
    Ok(FriedmanResult {
        avg_ranks,
        chi2,
        df,
        p_value,
        control,
        comparisons,
    })
}
