// A reduced benchmark: two datasets, two repetitions, every method and
// classifier, with a fixed (k, gamma) instead of tuning.

use rwmau::bench::{run_benchmark, BenchConfig, NamedDataset};
use rwmau::data::{load_dataset, DataFormat};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/keel");
    let mut datasets = Vec::new();
    for name in ["ecoli4", "new-thyroid1", "glass1"] {
        let data = load_dataset(format!("{dir}/{name}.dat"), DataFormat::Keel)?;
        datasets.push(NamedDataset { name: name.to_string(), data });
    }
    let cfg = BenchConfig { reps: 2, seed: 5, fixed: Some((5, 10)), ..Default::default() };
    let outcome = run_benchmark(&datasets, &cfg)?;

    for table in outcome.tables().iter().take(2) {
        println!("{}", table.file_name());
        print!("{}", table.to_csv());
    }
    print!("{}", outcome.report_text());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
