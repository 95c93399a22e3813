#[allow(dead_code)]
mod load_and_split {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/load_and_split.rs"));
}

#[allow(dead_code)]
mod transition_graph {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/transition_graph.rs"));
}

#[allow(dead_code)]
mod proximity_scores {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/proximity_scores.rs"));
}

#[allow(dead_code)]
mod undersample {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/undersample.rs"));
}

#[allow(dead_code)]
mod classifiers {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/classifiers.rs"));
}

#[allow(dead_code)]
mod rank_statistics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rank_statistics.rs"));
}

#[allow(dead_code)]
mod tune_grid {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/tune_grid.rs"));
}

#[allow(dead_code)]
mod mini_benchmark {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mini_benchmark.rs"));
}

#[test]
fn load_and_split_runs() {
    load_and_split::run_example().expect("load_and_split example should run");
}

#[test]
fn transition_graph_runs() {
    transition_graph::run_example().expect("transition_graph example should run");
}

#[test]
fn proximity_scores_runs() {
    proximity_scores::run_example().expect("proximity_scores example should run");
}

#[test]
fn undersample_runs() {
    undersample::run_example().expect("undersample example should run");
}

#[test]
fn classifiers_runs() {
    classifiers::run_example().expect("classifiers example should run");
}

#[test]
fn rank_statistics_runs() {
    rank_statistics::run_example().expect("rank_statistics example should run");
}

#[test]
fn tune_grid_runs() {
    tune_grid::run_example().expect("tune_grid example should run");
}

#[test]
fn mini_benchmark_runs() {
    mini_benchmark::run_example().expect("mini_benchmark example should run");
}
