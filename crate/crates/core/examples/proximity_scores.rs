// Score the majority points of yeast5 by random walks started from the
// minority points and list the ones closest to the minority class.

use rwmau::data::{load_dataset, DataFormat};
use rwmau::graph::build_graph;
use rwmau::walk::{proximity_scores, score_upper_bound, WalkConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/keel/yeast5.dat");
    let ds = load_dataset(path, DataFormat::Keel)?;
    let graph = build_graph(ds.features(), 5)?;
    let cfg = WalkConfig::new(10, 42);
    let scores = proximity_scores(&graph, &ds.minority_indices(), &ds.majority_indices(), &cfg)?;

    let ranked = scores.ranked();
    let reached = ranked.iter().filter(|(_, nu)| *nu > 0.0).count();
    println!(
        "{} of {} majority points reached; bound on any score {:.3}",
        reached,
        scores.len(),
        score_upper_bound(ds.n_minority(), &cfg)
    );
    for (node, nu) in ranked.iter().take(8) {
        println!("  node {node:4}  nu {nu:.4}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
