// Build the kNN transition graph of a tiny dataset and print its edges.
// Each row of probabilities sums to one and is unchanged when all
// coordinates are rescaled.

use ndarray::array;
use rwmau::graph::{build_graph, knn_from_features};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let x = array![[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0], [4.0, 3.5]];
    let nb = knn_from_features(&x, 2)?;
    for i in 0..nb.len() {
        println!("node {i}: neighbours {:?} at {:?}", nb.neighbors(i), nb.distances(i));
    }

    let g = build_graph(&x, 2)?;
    g.write_edge_list(std::io::stdout().lock())?;

    let scaled = build_graph(&(&x * 10.0), 2)?;
    for i in 0..g.len() {
        let row_sum: f64 = g.probabilities(i).iter().sum();
        let max_diff = g
            .probabilities(i)
            .iter()
            .zip(scaled.probabilities(i))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("node {i}: sum {row_sum:.12}, change under x10 scaling {max_diff:.1e}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
