//! Benchmark harness: repeated train/test splits shared by every method and
//! classifier, per-split tuning of `(k, gamma)`, and Table-shaped outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierKind, TrainedModel};
use crate::data::{split_indices, Dataset, Scaler, SplitSpec};
use crate::error::{Error, Result};
use crate::metrics::{auc, f1_minority, ResultTable, F1_THRESHOLD};
use crate::report::{self, Section};
use crate::resample::{resample, Method, ResampleConfig};
use crate::rng::{derive_seed, tag};
use crate::tuning::{tune, TraceRow, TuneGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Auc,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Auc, Metric::F1];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Auc => "auc",
            Metric::F1 => "f1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub classifiers: Vec<ClassifierKind>,
    pub reps: usize,
    pub seed: u64,
    pub alpha: f64,
    pub train_fraction: f64,
    pub standardize: bool,
    pub walks_per_start: usize,
    /// Skip tuning and use this `(k, gamma)` everywhere.
    pub fixed: Option<(usize, usize)>,
    /// Grid searched when `fixed` is unset; its seed is replaced per split.
    pub grid: TuneGrid,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            methods: Method::ALL.to_vec(),
            classifiers: ClassifierKind::ALL.to_vec(),
            reps: 10,
            seed: 0,
            alpha: 0.5,
            train_fraction: 0.8,
            standardize: false,
            walks_per_start: 1,
            fixed: None,
            grid: TuneGrid::default(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        crate::resample::check_alpha(self.alpha)?;
        if self.methods.is_empty() || self.classifiers.is_empty() {
            return Err(Error::Config("at least one method and one classifier are required".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be positive".into()));
        }
        if self.walks_per_start == 0 {
            return Err(Error::Config("walks per start must be positive".into()));
        }
        if let Some((k, gamma)) = self.fixed {
            if k == 0 || gamma == 0 {
                return Err(Error::Config(format!("fixed k={k}, gamma={gamma} must both be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedDataset {
    pub name: String,
    pub data: Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub auc: f64,
    pub f1: f64,
}

impl Scores {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Auc => self.auc,
            Metric::F1 => self.f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub dataset: usize,
    pub rep: usize,
    /// `(k, gamma, inner mean AUC)`; the inner AUC is NaN for fixed values.
    pub tuned: Option<(usize, usize, f64)>,
    pub trace: Vec<TraceRow>,
    /// `results[method][classifier]`, `None` where that run failed.
    pub results: Vec<Vec<Option<Scores>>>,
    pub failures: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub config: BenchConfig,
    pub datasets: Vec<String>,
    /// Dataset-major, then repetition.
    pub cells: Vec<Cell>,
}

/// Rows = datasets, columns = methods; `None` when any repetition failed.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanTable {
    pub classifier: ClassifierKind,
    pub metric: Metric,
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl MeanTable {
    pub fn file_name(&self) -> String {
        format!("{}_{}.csv", self.classifier.label(), self.metric.label())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("dataset,{}\n", self.methods.join(","));
        for (name, row) in self.datasets.iter().zip(&self.values) {
            out.push_str(name);
            for v in row {
                match v {
                    Some(v) => {
                        let _ = write!(out, ",{v:.4}");
                    }
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Complete rows only, plus the names of the rows left out.
    pub fn complete(&self) -> Result<(ResultTable, Vec<String>)> {
        let mut datasets = Vec::new();
        let mut values = Vec::new();
        let mut dropped = Vec::new();
        for (name, row) in self.datasets.iter().zip(&self.values) {
            match row.iter().copied().collect::<Option<Vec<f64>>>() {
                Some(r) => {
                    datasets.push(name.clone());
                    values.push(r);
                }
                None => dropped.push(name.clone()),
            }
        }
        Ok((ResultTable::new(datasets, self.methods.clone(), values)?, dropped))
    }
}

impl BenchOutcome {
    pub fn failures(&self) -> Vec<String> {
        self.cells.iter().flat_map(|c| c.failures.iter().cloned()).collect()
    }

    pub fn table(&self, classifier: ClassifierKind, metric: Metric) -> MeanTable {
        let ci = self
            .config
            .classifiers
            .iter()
            .position(|&c| c == classifier)
            .expect("classifier was benchmarked");
        let reps = self.config.reps;
        let values = (0..self.datasets.len())
            .map(|d| {
                let cells = &self.cells[d * reps..(d + 1) * reps];
                (0..self.config.methods.len())
                    .map(|m| {
                        let vals: Option<Vec<f64>> =
                            cells.iter().map(|c| c.results[m][ci].map(|s| s.get(metric))).collect();
                        vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
                    })
                    .collect()
            })
            .collect();
        MeanTable {
            classifier,
            metric,
            datasets: self.datasets.clone(),
            methods: self.config.methods.iter().map(|m| m.label().to_string()).collect(),
            values,
        }
    }

    pub fn tables(&self) -> Vec<MeanTable> {
        self.config
            .classifiers
            .iter()
            .flat_map(|&c| Metric::ALL.map(|m| self.table(c, m)))
            .collect()
    }

    /// Rank sections for every table that has at least one complete row.
    pub fn sections(&self) -> Vec<Section> {
        self.tables()
            .iter()
            .filter_map(|t| {
                let (table, dropped) = t.complete().ok()?;
                let title = format!("{} / {}", t.classifier.label(), t.metric.label());
                report::analyse(title, table, dropped).ok()
            })
            .collect()
    }

    pub fn tuned_csv(&self) -> String {
        let mut out = String::from("dataset,rep,k,gamma,inner_auc\n");
        for c in &self.cells {
            if let Some((k, g, a)) = c.tuned {
                let inner = if a.is_nan() { "NA".to_string() } else { format!("{a:.4}") };
                let _ = writeln!(out, "{},{},{k},{g},{inner}", self.datasets[c.dataset], c.rep);
            }
        }
        out
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("dataset,rep,k,gamma,fold,auc\n");
        for c in &self.cells {
            for t in &c.trace {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{:.6}",
                    self.datasets[c.dataset], c.rep, t.k, t.gamma, t.fold, t.auc
                );
            }
        }
        out
    }

    pub fn report_text(&self) -> String {
        let mut out = String::from(
            "Classifier settings: knn k=5; tree = binary entropy splits, no pruning, max_depth 25, min_leaf 2; \
             bagging = 10 bootstrap trees. F1 threshold 0.5.\n\n",
        );
        out.push_str(&report::render_text(&self.sections()));
        out
    }

    /// Writes result tables, tuned parameters, the rank report and
    /// optionally the tuning trace. Returns the file names written.
    pub fn write_outputs(&self, dir: &Path, with_trace: bool) -> Result<Vec<String>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files: Vec<(String, String)> = self.tables().iter().map(|t| (t.file_name(), t.to_csv())).collect();
        files.push(("tuned.csv".into(), self.tuned_csv()));
        files.push(("report.txt".into(), self.report_text()));
        files.push(("report.csv".into(), report::render_csv(&self.sections())));
        if with_trace {
            files.push(("tuning_trace.csv".into(), self.trace_csv()));
        }
        for (name, text) in &files {
            let path: PathBuf = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(files.into_iter().map(|(n, _)| n).collect())
    }
}

pub fn run_benchmark(datasets: &[NamedDataset], cfg: &BenchConfig) -> Result<BenchOutcome> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..cfg.reps).map(move |r| (d, r)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(d, rep)| {
            let started = Instant::now();
            let mut cell = run_cell(&datasets[d], d, rep, cfg);
            cell.seconds = started.elapsed().as_secs_f64();
            log::info!("{} rep {} done in {:.1}s", datasets[d].name, rep, cell.seconds);
            cell
        })
        .collect();
    Ok(BenchOutcome {
        config: cfg.clone(),
        datasets: datasets.iter().map(|d| d.name.clone()).collect(),
        cells,
    })
}

fn run_cell(named: &NamedDataset, d: usize, rep: usize, cfg: &BenchConfig) -> Cell {
    let n_methods = cfg.methods.len();
    let n_clf = cfg.classifiers.len();
    let mut cell = Cell {
        dataset: d,
        rep,
        tuned: None,
        trace: Vec::new(),
        results: vec![vec![None; n_clf]; n_methods],
        failures: Vec::new(),
        seconds: 0.0,
    };
    let name_tag = tag(&named.name);
    let spec = SplitSpec {
        train_fraction: cfg.train_fraction,
        repetitions: cfg.reps,
        seed: derive_seed(cfg.seed, &[name_tag]),
    };
    let split = match split_indices(&named.data, &spec, rep) {
        Ok(s) => s,
        Err(e) => {
            cell.failures.push(format!("{} rep {rep}: {e}", named.name));
            return cell;
        }
    };
    let mut train = named.data.select(&split.train);
    let mut test = named.data.select(&split.test);
    if cfg.standardize {
        let scaler = Scaler::fit(train.features());
        train = scaler.apply(&train);
        test = scaler.apply(&test);
    }

    let params = if !cfg.methods.contains(&Method::Rwmau) {
        None
    } else if let Some((k, gamma)) = cfg.fixed {
        Some((k, gamma, f64::NAN))
    } else {
        let grid = TuneGrid {
            seed: derive_seed(cfg.seed, &[name_tag, rep as u64, tag("tune")]),
            ..cfg.grid.clone()
        };
        match tune(&train, &grid, cfg.alpha, cfg.walks_per_start) {
            Ok(t) => {
                debug_assert!(t.folds.iter().flatten().all(|&i| split.test.binary_search(&split.train[i]).is_err()));
                cell.trace = t.trace;
                Some((t.k, t.gamma, t.mean_auc))
            }
            Err(e) => {
                cell.failures.push(format!("{} rep {rep} tuning: {e}", named.name));
                None
            }
        }
    };
    cell.tuned = params;

    for (mi, &method) in cfg.methods.iter().enumerate() {
        let method_seed = derive_seed(cfg.seed, &[name_tag, rep as u64, tag(method.label())]);
        let (k, gamma) = match (method, params) {
            (Method::Rwmau, None) => continue,
            (_, Some((k, g, _))) => (k, g),
            _ => (ResampleConfig::default().k, ResampleConfig::default().gamma),
        };
        let rcfg = ResampleConfig {
            alpha: cfg.alpha,
            k,
            gamma,
            walks_per_start: cfg.walks_per_start,
            seed: method_seed,
            method,
        };
        let resampled = match resample(&train, &rcfg) {
            Ok(r) => r.augmented,
            Err(e) => {
                cell.failures.push(format!("{} rep {rep} {method}: {e}", named.name));
                continue;
            }
        };
        for (ci, &kind) in cfg.classifiers.iter().enumerate() {
            let clf_seed = derive_seed(method_seed, &[tag(kind.label())]);
            let scored = TrainedModel::fit(kind, &resampled, clf_seed).and_then(|model| {
                let proba = model.predict_proba(test.features());
                Ok(Scores {
                    auc: auc(&proba, test.labels())?,
                    f1: f1_minority(&proba, test.labels(), F1_THRESHOLD),
                })
            });
            match scored {
                Ok(s) => cell.results[mi][ci] = Some(s),
                Err(e) => cell
                    .failures
                    .push(format!("{} rep {rep} {method}/{kind}: {e}", named.name)),
            }
        }
    }
    cell
}
