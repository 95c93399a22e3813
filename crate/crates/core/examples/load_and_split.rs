// Load a KEEL dataset, inspect its class balance, and draw the repeated
// 80/20 splits used by the benchmark.
//
// ```bash
// cargo run --example load_and_split
// ```

use rwmau::data::{load_dataset, split_indices, standardize, DataFormat, SplitSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/keel/ecoli4.dat");
    let ds = load_dataset(path, DataFormat::Keel)?;
    println!(
        "ecoli4: {} rows, {} features, minority {:?} x{}, majority {:?} x{}, IR {:.2}",
        ds.n_rows(),
        ds.n_features(),
        ds.label_map().minority,
        ds.n_minority(),
        ds.label_map().majority,
        ds.n_majority(),
        ds.imbalance_ratio()
    );

    let spec = SplitSpec { seed: 7, ..Default::default() };
    for rep in 0..3 {
        let split = split_indices(&ds, &spec, rep)?;
        let train = ds.select(&split.train);
        println!(
            "rep {rep}: train {} ({} minority), test {}",
            split.train.len(),
            train.n_minority(),
            split.test.len()
        );
    }

    let (train, scaler) = standardize(&ds.select(&split_indices(&ds, &spec, 0)?.train));
    println!("scaler means {:?}", &scaler.mean[..3]);
    println!("first standardized row {:?}", train.features().row(0).to_vec());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
