//! Command-line front end: `resample`, `benchmark` and `report`.
//!
//! Exit codes: 0 success, 1 benchmark finished with failed cells, 2 usage or
//! configuration error, 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ndarray::Axis;

use crate::bench::{run_benchmark, BenchConfig, Metric, NamedDataset};
use crate::classify::ClassifierKind;
use crate::data::{load_dataset, DataFormat, Scaler};
use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::manifest::{sha256_file, InputRecord, RunManifest};
use crate::report::{analyse_strict, render_csv, render_text};
use crate::resample::{removed_to_string, resample, Method, ResampleConfig};
use crate::metrics::ResultTable;
use crate::tuning::TuneGrid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CELLS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Overrides the worker thread count.
pub const THREADS_ENV: &str = "RWMAU_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rwmau", version, about = "Random walk-steered majority undersampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Undersample one dataset and write the result.
    Resample(ResampleArgs),
    /// Run every method/classifier pair over a directory of datasets.
    Benchmark(BenchmarkArgs),
    /// Average ranks and Friedman/Finner tests for result tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "rwmau")]
    pub method: Method,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub gamma: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub walks_per_start: usize,
    /// Z-score features before resampling; rows are written on the input scale.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the transition graph as `src dst prob` lines.
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,
    /// Write RWMaU proximity scores as `node nu` lines.
    #[arg(long)]
    pub dump_scores: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Directory of `.dat` (KEEL) or `.csv` files; the file stem names the dataset.
    #[arg(long)]
    pub data_dir: PathBuf,
    /// Only these dataset names, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub datasets: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "rwmau,none,rus,cc,ncr")]
    pub methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "knn,tree,bagging")]
    pub classifiers: Vec<ClassifierKind>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, default_value_t = 1)]
    pub walks_per_start: usize,
    /// Fixed neighbourhood size; skips tuning (requires --gamma).
    #[arg(long, requires = "gamma")]
    pub k: Option<usize>,
    /// Fixed walk length; skips tuning (requires --k).
    #[arg(long, requires = "k")]
    pub gamma: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Also write the per-fold tuning trace.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A result csv, or a benchmark output directory.
    #[arg(long)]
    pub input: PathBuf,
    /// Also write the statistics as csv.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    let result = match cli.command {
        Command::Resample(a) => cmd_resample(&a).map(|()| EXIT_OK),
        Command::Benchmark(a) => cmd_benchmark(&a),
        Command::Report(a) => cmd_report(&a).map(|()| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_IO
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_ENV}={value:?} is not a thread count")))?;
    // a pool that already exists (repeated in-process runs) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn cmd_resample(a: &ResampleArgs) -> Result<()> {
    let started = Instant::now();
    let cfg = ResampleConfig {
        alpha: a.alpha,
        k: a.k,
        gamma: a.gamma,
        walks_per_start: a.walks_per_start,
        seed: a.seed,
        method: a.method,
    };
    crate::resample::check_alpha(cfg.alpha)?;
    if a.dump_scores.is_some() && a.method != Method::Rwmau {
        return Err(Error::Config("--dump-scores needs --method rwmau".into()));
    }
    let ds = load_dataset(&a.input, DataFormat::from_path(&a.input))?;
    let checksum = sha256_file(&a.input)?;
    let load_s = started.elapsed().as_secs_f64();

    let scaler = a.standardize.then(|| Scaler::fit(ds.features()));
    let work = match &scaler {
        Some(s) => s.apply(&ds),
        None => ds.clone(),
    };
    let t = Instant::now();
    let result = resample(&work, &cfg)?;
    let resample_s = t.elapsed().as_secs_f64();

    // written on the input scale: kept rows verbatim, centroids mapped back
    let augmented = match (&scaler, a.method) {
        (Some(s), Method::Cc) => {
            let features = s.inverse_transform(result.augmented.features());
            let n_min = ds.n_minority();
            let mut features = features;
            let originals = ds.features().select(Axis(0), &ds.minority_indices());
            features.slice_mut(ndarray::s![..n_min, ..]).assign(&originals);
            ds.with_rows(features, result.augmented.labels().to_vec())?
        }
        (Some(_), _) => {
            let mut drop = vec![false; ds.n_rows()];
            for &i in &result.removed {
                drop[i] = true;
            }
            let kept: Vec<usize> = (0..ds.n_rows()).filter(|&i| !drop[i]).collect();
            ds.select(&kept)
        }
        (None, _) => result.augmented.clone(),
    };

    create_dir(&a.out)?;
    let mut manifest = RunManifest::new(
        "resample",
        a.seed,
        &serde_json::json!({
            "input": a.input.display().to_string(),
            "method": a.method,
            "alpha": a.alpha,
            "k": a.k,
            "gamma": a.gamma,
            "walks_per_start": a.walks_per_start,
            "seed": a.seed,
            "standardize": a.standardize,
        }),
    );
    let name = a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    manifest.inputs.push(InputRecord::new(&name, &a.input, checksum, &ds));

    write_file(&a.out.join("augmented.csv"), &augmented.to_csv_string())?;
    write_file(&a.out.join("removed.txt"), &removed_to_string(&result.removed))?;
    manifest.outputs = vec!["augmented.csv".into(), "removed.txt".into()];
    if let Some(path) = &a.dump_graph {
        let graph = build_graph(work.features(), a.k)?;
        let mut buf = Vec::new();
        graph.write_edge_list(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))?;
    }
    if let (Some(path), Some(scores)) = (&a.dump_scores, &result.scores) {
        let mut buf = Vec::new();
        scores.write_dump(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))?;
    }
    manifest.timings.insert("load".into(), load_s);
    manifest.timings.insert("resample".into(), resample_s);
    manifest.timings.insert("total".into(), started.elapsed().as_secs_f64());
    manifest.write(a.out.join("manifest.json"))
}

/// Dataset files in `dir` (`.dat` or `.csv`), sorted by name.
pub fn find_datasets(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("dat" | "csv")) && path.is_file() {
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            found.push((name, path));
        }
    }
    found.sort();
    Ok(found)
}

pub fn cmd_benchmark(a: &BenchmarkArgs) -> Result<i32> {
    let started = Instant::now();
    let cfg = BenchConfig {
        methods: a.methods.clone(),
        classifiers: a.classifiers.clone(),
        reps: a.reps,
        seed: a.seed,
        alpha: a.alpha,
        train_fraction: a.train_fraction,
        standardize: a.standardize,
        walks_per_start: a.walks_per_start,
        fixed: a.k.zip(a.gamma),
        grid: TuneGrid {
            folds: a.folds,
            ..TuneGrid::default()
        },
    };
    cfg.validate()?;

    let mut files = find_datasets(&a.data_dir)?;
    if !a.datasets.is_empty() {
        for want in &a.datasets {
            if !files.iter().any(|(n, _)| n == want) {
                return Err(Error::Config(format!(
                    "dataset {want:?} not found in {}",
                    a.data_dir.display()
                )));
            }
        }
        files.retain(|(n, _)| a.datasets.contains(n));
    }
    if files.is_empty() {
        return Err(Error::Config(format!("no .dat or .csv datasets in {}", a.data_dir.display())));
    }

    let mut manifest = RunManifest::new("benchmark", a.seed, &cfg);
    let mut datasets = Vec::new();
    for (name, path) in &files {
        let data = load_dataset(path, DataFormat::from_path(path))?;
        manifest.inputs.push(InputRecord::new(name, path, sha256_file(path)?, &data));
        datasets.push(NamedDataset { name: name.clone(), data });
    }
    manifest.timings.insert("load".into(), started.elapsed().as_secs_f64());

    let t = Instant::now();
    let outcome = run_benchmark(&datasets, &cfg)?;
    manifest.timings.insert("run".into(), t.elapsed().as_secs_f64());
    for (d, name) in outcome.datasets.iter().enumerate() {
        let secs: f64 = outcome.cells.iter().filter(|c| c.dataset == d).map(|c| c.seconds).sum();
        manifest.timings.insert(format!("dataset:{name}"), secs);
    }

    manifest.outputs = outcome.write_outputs(&a.out, a.trace)?;
    manifest.failures = outcome.failures();
    for f in &manifest.failures {
        log::error!("{f}");
    }
    manifest.timings.insert("total".into(), started.elapsed().as_secs_f64());
    manifest.write(a.out.join("manifest.json"))?;
    print!("{}", outcome.report_text());
    if manifest.failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("{} run(s) failed; affected cells are NA", manifest.failures.len());
        Ok(EXIT_FAILED_CELLS)
    }
}

/// Result tables named `<classifier>_<metric>.csv` in a benchmark directory.
fn result_tables_in(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for kind in ClassifierKind::ALL {
        for metric in Metric::ALL {
            let path = dir.join(format!("{}_{}.csv", kind.label(), metric.label()));
            if path.is_file() {
                out.push((format!("{} / {}", kind.label(), metric.label()), path));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("no result tables in {}", dir.display())));
    }
    Ok(out)
}

pub fn cmd_report(a: &ReportArgs) -> Result<()> {
    let inputs = if a.input.is_dir() {
        result_tables_in(&a.input)?
    } else {
        let title = a.input.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        vec![(title, a.input.clone())]
    };
    let mut sections = Vec::new();
    for (title, path) in inputs {
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let (table, dropped) = ResultTable::from_csv_skipping_missing(&text)?;
        sections.push(analyse_strict(title, table, dropped)?);
    }
    print!("{}", render_text(&sections));
    if let Some(path) = &a.csv {
        write_file(path, &render_csv(&sections))?;
    }
    Ok(())
}
