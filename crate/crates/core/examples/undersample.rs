// Apply every undersampler to yeast5 at alpha = 0.5 and compare what is
// left of the majority class.

use rwmau::data::{load_dataset, DataFormat};
use rwmau::resample::{resample, undersample_count, Method, ResampleConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/keel/yeast5.dat");
    let ds = load_dataset(path, DataFormat::Keel)?;
    let u = undersample_count(ds.n_majority(), ds.n_minority(), 0.5)?;
    println!("yeast5: {} majority, {} minority, budget u = {u}", ds.n_majority(), ds.n_minority());

    for method in Method::ALL {
        let cfg = ResampleConfig { method, alpha: 0.5, k: 5, gamma: 10, seed: 1, ..Default::default() };
        let out = resample(&ds, &cfg)?;
        println!(
            "{:>9}: {} rows kept ({} majority, {} minority), {} original rows dropped",
            method.label(),
            out.augmented.n_rows(),
            out.augmented.n_majority(),
            out.augmented.n_minority(),
            out.removed.len()
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
