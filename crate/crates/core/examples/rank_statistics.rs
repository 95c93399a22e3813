// Average ranks and the Friedman test with Finner-adjusted pairwise
// p-values for a small results table.

use rwmau::metrics::{auc, ResultTable};
use rwmau::report::{analyse, render_text};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("AUC of the four-point example: {}", auc(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1])?);

    let table = ResultTable::new(
        vec!["yeast5", "ecoli4", "yeast4", "glass0", "pima"].into_iter().map(String::from).collect(),
        vec!["rwmau", "original", "rus", "cc"].into_iter().map(String::from).collect(),
        vec![
            vec![0.9871, 0.9830, 0.9735, 0.9868],
            vec![0.9963, 0.9846, 0.9899, 0.9962],
            vec![0.8481, 0.7755, 0.8906, 0.9094],
            vec![0.8682, 0.8491, 0.8539, 0.8463],
            vec![0.7632, 0.7288, 0.7604, 0.7451],
        ],
    )?;
    let section = analyse("knn / auc", table, Vec::new())?;
    print!("{}", render_text(&[section]));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
