// Choose (k, gamma) for one training split by inner cross-validation of the
// decision tree on RWMaU-resampled folds.

use rwmau::data::{load_dataset, random_split, DataFormat, SplitSpec};
use rwmau::tuning::{tune, TuneGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/keel/new-thyroid1.dat");
    let ds = load_dataset(path, DataFormat::Keel)?;
    let (train, _test) = random_split(&ds, &SplitSpec::default(), 0)?;

    let grid = TuneGrid { k_values: vec![2, 3, 4, 5], seed: 1, ..Default::default() };
    let out = tune(&train, &grid, 0.5, 1)?;
    for s in &out.scores {
        println!("k {:2}  gamma {:2}  mean AUC {:.4}", s.k, s.gamma, s.mean_auc);
    }
    println!("selected k = {}, gamma = {} (mean AUC {:.4})", out.k, out.gamma, out.mean_auc);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
