// Train the three evaluation classifiers on RWMaU-resampled data and score
// them on a held-out split.

use rwmau::classify::{ClassifierKind, TrainedModel};
use rwmau::data::{load_dataset, random_split, DataFormat, SplitSpec};
use rwmau::metrics::{auc, f1_minority, F1_THRESHOLD};
use rwmau::resample::{resample, ResampleConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/keel/ecoli4.dat");
    let ds = load_dataset(path, DataFormat::Keel)?;
    let (train, test) = random_split(&ds, &SplitSpec { seed: 3, ..Default::default() }, 0)?;
    let balanced = resample(&train, &ResampleConfig { k: 4, gamma: 8, seed: 3, ..Default::default() })?.augmented;

    for kind in ClassifierKind::ALL {
        for (name, data) in [("original", &train), ("rwmau", &balanced)] {
            let model = TrainedModel::fit(kind, data, 11)?;
            let proba = model.predict_proba(test.features());
            println!(
                "{:>7} on {name:>8}: AUC {:.4}  F1 {:.4}",
                kind.label(),
                auc(&proba, test.labels())?,
                f1_minority(&proba, test.labels(), F1_THRESHOLD)
            );
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
