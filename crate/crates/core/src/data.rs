//! Binary-classification datasets: loading, validation, splitting, scaling.
//!
//! Labels are stored as `u8` with `1` marking the minority class. The
//! original label strings are kept in a [`LabelMap`] so resampled data can be
//! written back in the same vocabulary it was read with.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const MINORITY: u8 = 1;
pub const MAJORITY: u8 = 0;

/// Original label string for each encoded class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub minority: String,
    pub majority: String,
}

impl LabelMap {
    pub fn name(&self, label: u8) -> &str {
        if label == MINORITY {
            &self.minority
        } else {
            &self.majority
        }
    }

    pub fn encode(&self, raw: &str) -> Option<u8> {
        if raw == self.minority {
            Some(MINORITY)
        } else if raw == self.majority {
            Some(MAJORITY)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    names: Option<Vec<String>>,
    label_map: LabelMap,
}

impl Dataset {
    /// Builds a dataset from already-encoded labels. Checks shapes, label
    /// values and finiteness; it does not require both classes to be
    /// present, since held-out partitions may legitimately lack one.
    pub fn new(
        features: Array2<f64>,
        labels: Vec<u8>,
        names: Option<Vec<String>>,
        label_map: LabelMap,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if labels.len() != n {
            return Err(Error::Format(format!(
                "{} feature rows but {} labels",
                n,
                labels.len()
            )));
        }
        if d == 0 {
            return Err(Error::Format("dataset has no feature columns".into()));
        }
        if let Some(names) = &names {
            if names.len() != d {
                return Err(Error::Format(format!(
                    "{} feature names for {} columns",
                    names.len(),
                    d
                )));
            }
        }
        if let Some(bad) = labels.iter().find(|&&y| y > 1) {
            return Err(Error::Format(format!("label {bad} is not 0 or 1")));
        }
        if let Some(((row, column), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Parse {
                row: row + 1,
                column: column + 1,
                message: "non-finite value".into(),
            });
        }
        Ok(Dataset {
            features,
            labels,
            names,
            label_map,
        })
    }

    /// Builds a dataset from raw label strings, assigning `1` to the rarer
    /// label. On equal counts the lexicographically smaller label becomes
    /// the minority.
    pub fn from_raw_labels(
        features: Array2<f64>,
        raw_labels: &[String],
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let mut distinct: Vec<(&str, usize)> = Vec::new();
        for label in raw_labels {
            match distinct.iter_mut().find(|(l, _)| *l == label.as_str()) {
                Some((_, count)) => *count += 1,
                None => distinct.push((label.as_str(), 1)),
            }
        }
        if distinct.len() != 2 {
            return Err(Error::Format(format!(
                "expected exactly 2 distinct class labels, found {}",
                distinct.len()
            )));
        }
        distinct.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        let label_map = LabelMap {
            minority: distinct[0].0.to_string(),
            majority: distinct[1].0.to_string(),
        };
        let labels = raw_labels
            .iter()
            .map(|l| label_map.encode(l).expect("label seen during counting"))
            .collect();
        let ds = Dataset::new(features, labels, names, label_map)?;
        if ds.n_rows() < 2 {
            return Err(Error::Format("dataset needs at least 2 rows".into()));
        }
        Ok(ds)
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn label_map(&self) -> &LabelMap {
        &self.label_map
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn minority_indices(&self) -> Vec<usize> {
        self.indices_of(MINORITY)
    }

    pub fn majority_indices(&self) -> Vec<usize> {
        self.indices_of(MAJORITY)
    }

    fn indices_of(&self, class: u8) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &y)| (y == class).then_some(i))
            .collect()
    }

    pub fn n_minority(&self) -> usize {
        self.labels.iter().filter(|&&y| y == MINORITY).count()
    }

    pub fn n_majority(&self) -> usize {
        self.n_rows() - self.n_minority()
    }

    pub fn has_both_classes(&self) -> bool {
        let m = self.n_minority();
        m > 0 && m < self.n_rows()
    }

    pub fn imbalance_ratio(&self) -> f64 {
        self.n_majority() as f64 / self.n_minority() as f64
    }

    /// Rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            names: self.names.clone(),
            label_map: self.label_map.clone(),
        }
    }

    /// Same schema with different rows; used by resamplers that synthesise
    /// points.
    pub fn with_rows(&self, features: Array2<f64>, labels: Vec<u8>) -> Result<Dataset> {
        Dataset::new(features, labels, self.names.clone(), self.label_map.clone())
    }

    /// Renders the dataset as csv with a header row and the original label
    /// strings in the last column. Values use the shortest representation
    /// that parses back to the identical `f64`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = match &self.names {
            Some(names) => names.clone(),
            None => (0..self.n_features()).map(|j| format!("x{j}")).collect(),
        };
        out.push_str(&header.join(","));
        out.push_str(",class\n");
        for (row, &y) in self.features.outer_iter().zip(&self.labels) {
            for v in row.iter() {
                let _ = write!(out, "{v},");
            }
            out.push_str(self.label_map.name(y));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Keel,
}

impl DataFormat {
    /// `.dat` files are KEEL, everything else csv.
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("dat") => DataFormat::Keel,
            _ => DataFormat::Csv,
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        DataFormat::Csv => parse_csv(&text),
        DataFormat::Keel => parse_keel(&text),
    }
}

fn split_cells(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_cell(cell: &str, row: usize, column: usize) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            row,
            column,
            message: format!("cannot parse {cell:?} as a real number"),
        }),
    }
}

/// Accumulates raw rows; `row` numbers in errors are 1-based file lines.
struct RowSink {
    width: Option<usize>,
    /// Source column of each feature.
    columns: Vec<usize>,
    cells: Vec<String>,
    lines: Vec<usize>,
    labels: Vec<String>,
}

impl RowSink {
    fn new() -> Self {
        RowSink {
            width: None,
            columns: Vec::new(),
            cells: Vec::new(),
            lines: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn push(&mut self, line_no: usize, cells: &[&str], feature_cols: &[usize], class_col: usize) -> Result<()> {
        if self.lines.is_empty() {
            self.columns = feature_cols.to_vec();
        }
        for &c in feature_cols {
            let cell = cells.get(c).ok_or_else(|| Error::Parse {
                row: line_no,
                column: c + 1,
                message: "missing cell".into(),
            })?;
            self.cells.push(cell.to_string());
        }
        let label = cells.get(class_col).ok_or_else(|| Error::Parse {
            row: line_no,
            column: class_col + 1,
            message: "missing class label".into(),
        })?;
        self.labels.push(label.to_string());
        self.lines.push(line_no);
        Ok(())
    }

    fn check_width(&mut self, line_no: usize, width: usize) -> Result<()> {
        match self.width {
            None => {
                self.width = Some(width);
                Ok(())
            }
            Some(w) if w == width => Ok(()),
            Some(w) => Err(Error::Format(format!(
                "line {line_no} has {width} cells, expected {w}"
            ))),
        }
    }

    /// A feature column is nominal when declared so or when none of its
    /// cells is a number; its categories are coded 0, 1, ... in sorted order.
    fn finish(self, names: Option<Vec<String>>, declared_nominal: &[bool]) -> Result<Dataset> {
        if self.labels.is_empty() {
            return Err(Error::Format("no data rows".into()));
        }
        let n = self.labels.len();
        let d = self.columns.len();
        let mut values = vec![0.0; n * d];
        for j in 0..d {
            let column = |r: usize| self.cells[r * d + j].as_str();
            let nominal = declared_nominal.get(j).copied().unwrap_or(false)
                || (0..n).all(|r| column(r).parse::<f64>().is_err());
            if nominal {
                let categories: BTreeSet<&str> = (0..n).map(column).collect();
                for r in 0..n {
                    let cell = column(r);
                    if cell == "?" || cell.is_empty() {
                        return Err(Error::Parse {
                            row: self.lines[r],
                            column: self.columns[j] + 1,
                            message: format!("missing value {cell:?}"),
                        });
                    }
                    values[r * d + j] = categories.iter().position(|&c| c == cell).expect("collected") as f64;
                }
            } else {
                for r in 0..n {
                    values[r * d + j] = parse_cell(column(r), self.lines[r], self.columns[j] + 1)?;
                }
            }
        }
        let features = Array2::from_shape_vec((n, d), values).map_err(|e| Error::Format(e.to_string()))?;
        Dataset::from_raw_labels(features, &self.labels, names)
    }
}

/// Comma-separated rows with the class label last. The first line is taken
/// as a header when none of its feature cells parse as numbers.
pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut sink = RowSink::new();
    let mut names = None;
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells = split_cells(line);
        if cells.len() < 2 {
            return Err(Error::Format(format!(
                "line {line_no} needs at least one feature and a class label"
            )));
        }
        let d = cells.len() - 1;
        if first {
            first = false;
            if cells[..d].iter().all(|c| c.parse::<f64>().is_err()) {
                names = Some(cells[..d].iter().map(|s| s.to_string()).collect());
                sink.check_width(line_no, cells.len())?;
                continue;
            }
        }
        sink.check_width(line_no, cells.len())?;
        let cols: Vec<usize> = (0..d).collect();
        sink.push(line_no, &cells, &cols, d)?;
    }
    sink.finish(names, &[])
}

/// KEEL `.dat` content. `@`-prefixed lines are header; `@inputs` and
/// `@outputs` select columns by attribute name when present, otherwise the
/// last column is the class.
pub fn parse_keel(text: &str) -> Result<Dataset> {
    let mut attributes: Vec<String> = Vec::new();
    let mut nominal: Vec<bool> = Vec::new();
    let mut inputs: Option<Vec<String>> = None;
    let mut output: Option<String> = None;
    let mut sink = RowSink::new();
    let mut layout: Option<(Vec<usize>, usize)> = None;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('@') {
            let (keyword, rest) = header
                .split_once(char::is_whitespace)
                .unwrap_or((header, ""));
            match keyword.to_ascii_lowercase().as_str() {
                "attribute" => {
                    let name = attribute_name(rest.trim());
                    attributes.push(name);
                    nominal.push(rest.contains('{'));
                }
                "inputs" => {
                    inputs = Some(split_cells(rest).into_iter().map(String::from).collect())
                }
                "outputs" | "output" => output = Some(rest.trim().to_string()),
                _ => {}
            }
            continue;
        }
        let cells = split_cells(trimmed);
        if layout.is_none() {
            layout = Some(keel_layout(&attributes, inputs.as_deref(), output.as_deref(), cells.len())?);
        }
        let (cols, class_col) = layout.as_ref().expect("layout set above");
        sink.check_width(line_no, cells.len())?;
        sink.push(line_no, &cells, cols, *class_col)?;
    }
    let (cols, class_col) = layout.ok_or_else(|| Error::Format("no data rows".into()))?;
    let names = if attributes.len() > class_col.max(*cols.iter().max().unwrap_or(&0)) {
        Some(cols.iter().map(|&c| attributes[c].clone()).collect())
    } else {
        None
    };
    let declared: Vec<bool> = cols.iter().map(|&c| nominal.get(c).copied().unwrap_or(false)).collect();
    sink.finish(names, &declared)
}

fn attribute_name(spec: &str) -> String {
    if let Some(rest) = spec.strip_prefix('\'') {
        if let Some(end) = rest.find('\'') {
            return rest[..end].to_string();
        }
    }
    spec.split(|c: char| c.is_whitespace() || c == '{' || c == '[')
        .next()
        .unwrap_or("")
        .to_string()
}

fn keel_layout(
    attributes: &[String],
    inputs: Option<&[String]>,
    output: Option<&str>,
    width: usize,
) -> Result<(Vec<usize>, usize)> {
    if width < 2 {
        return Err(Error::Format("data rows need a feature and a class".into()));
    }
    let position = |name: &str| -> Result<usize> {
        attributes
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::Format(format!("@inputs/@outputs names unknown attribute {name:?}")))
    };
    let class_col = match output {
        Some(name) if !attributes.is_empty() => position(name)?,
        _ => width - 1,
    };
    let cols = match inputs {
        Some(names) if !attributes.is_empty() => names
            .iter()
            .map(|n| position(n))
            .collect::<Result<Vec<_>>>()?,
        _ => (0..width).filter(|&c| c != class_col).collect(),
    };
    if cols.is_empty() || cols.iter().chain([&class_col]).any(|&c| c >= width) {
        return Err(Error::Format("header does not match data width".into()));
    }
    Ok((cols, class_col))
}

/// Random train/test partitioning repeated `repetitions` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            repetitions: 10,
            seed: 0,
        }
    }
}

const MAX_SPLIT_RETRIES: u64 = 100;

/// Row indices of one train/test partition, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn split_indices(ds: &Dataset, spec: &SplitSpec, repetition: usize) -> Result<Split> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0,1), got {}",
            spec.train_fraction
        )));
    }
    if repetition >= spec.repetitions {
        return Err(Error::Config(format!(
            "repetition {repetition} out of range for {} repetitions",
            spec.repetitions
        )));
    }
    let n = ds.n_rows();
    let n_train = (spec.train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::Split(format!(
            "train fraction {} leaves an empty partition on {n} rows",
            spec.train_fraction
        )));
    }
    let labels = ds.labels();
    for attempt in 0..=MAX_SPLIT_RETRIES {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::stream(spec.seed, &[repetition as u64, attempt]));
        let mut train = order[..n_train].to_vec();
        let minority_in_train = train.iter().filter(|&&i| labels[i] == MINORITY).count();
        if minority_in_train == 0 || minority_in_train == n_train {
            continue;
        }
        let mut test = order[n_train..].to_vec();
        train.sort_unstable();
        test.sort_unstable();
        return Ok(Split { train, test });
    }
    Err(Error::Split(format!(
        "no split with both classes in training after {MAX_SPLIT_RETRIES} retries"
    )))
}

pub fn random_split(ds: &Dataset, spec: &SplitSpec, repetition: usize) -> Result<(Dataset, Dataset)> {
    let split = split_indices(ds, spec, repetition)?;
    Ok((ds.select(&split.train), ds.select(&split.test)))
}

/// Per-feature mean and population standard deviation from a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    pub fn fit(features: &Array2<f64>) -> Scaler {
        let n = features.nrows() as f64;
        let mean: Array1<f64> = features.sum_axis(Axis(0)) / n;
        let std = features
            .axis_iter(Axis(1))
            .zip(mean.iter())
            .map(|(col, &m)| (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt())
            .collect();
        Scaler {
            mean: mean.to_vec(),
            std,
        }
    }

    /// Zero-variance columns map to 0.
    pub fn transform(&self, features: &Array2<f64>) -> Array2<f64> {
        let mut out = features.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.mean[j], self.std[j]);
            col.mapv_inplace(|v| if s > 0.0 { (v - m) / s } else { 0.0 });
        }
        out
    }

    /// Maps standardized values back to the original scale.
    pub fn inverse_transform(&self, features: &Array2<f64>) -> Array2<f64> {
        let mut out = features.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.mean[j], self.std[j]);
            col.mapv_inplace(|v| v * s + m);
        }
        out
    }

    pub fn apply(&self, ds: &Dataset) -> Dataset {
        Dataset {
            features: self.transform(&ds.features),
            ..ds.clone()
        }
    }
}

pub fn standardize(train: &Dataset) -> (Dataset, Scaler) {
    let scaler = Scaler::fit(train.features());
    (scaler.apply(train), scaler)
}
