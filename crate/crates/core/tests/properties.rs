use ndarray::Array2;
use proptest::prelude::*;
use rand::Rng;

use rwmau::classify::{
    knn_fit_predict, BaggedTrees, BaggingParams, ClassifierKind, DecisionTree, TrainedModel, TreeParams,
};
use rwmau::data::{split_indices, standardize, Dataset, SplitSpec, MINORITY};
use rwmau::graph::{build_graph, euclidean, knn_from_features, knn_neighbors, pairwise_distances};
use rwmau::metrics::{auc, average_ranks, finner_adjust, rank_row, ResultTable};
use rwmau::resample::{
    cluster_centroid_undersample, ncr_clean, random_undersample, resample, undersample_count, Method,
    ResampleConfig,
};
use rwmau::rng;
use rwmau::tuning::{tune, TuneGrid};
use rwmau::walk::{proximity_scores, random_walk, score_upper_bound, walk_rng, WalkConfig};

fn random_dataset(n: usize, d: usize, n_min: usize, seed: u64) -> Dataset {
    let mut s = rng::stream(seed, &[]);
    let labels: Vec<String> = (0..n).map(|i| if i < n_min { "min" } else { "maj" }.to_string()).collect();
    let features = Array2::from_shape_fn((n, d), |(i, j)| {
        let shift = if i < n_min && j == 0 { 0.8 } else { 0.0 };
        shift + s.gen_range(-1.0..1.0)
    });
    let ds = Dataset::from_raw_labels(features, &labels, None).unwrap();
    assert_eq!(ds.n_minority(), n_min);
    ds
}

fn rows_of(ds: &Dataset, idx: &[usize]) -> Vec<Vec<u64>> {
    idx.iter().map(|&i| ds.features().row(i).iter().map(|v| v.to_bits()).collect()).collect()
}

fn dataset_params() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (20usize..90, 2usize..6, any::<u64>()).prop_flat_map(|(n, d, seed)| (Just(n), Just(d), 2..n / 2, Just(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn graph_is_row_stochastic_and_scale_free((n, d, _m, seed) in dataset_params(), k in 2usize..10, c in 0.05f64..20.0) {
        let ds = random_dataset(n, d, 2, seed);
        let g = build_graph(ds.features(), k).unwrap();
        let scaled = build_graph(&(ds.features() * c), k).unwrap();
        for i in 0..n {
            prop_assert_eq!(g.neighbors(i).len(), k);
            prop_assert!((g.probabilities(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(!g.neighbors(i).contains(&i));
            prop_assert_eq!(g.neighbors(i), scaled.neighbors(i));
            for (p, q) in g.probabilities(i).iter().zip(scaled.probabilities(i)) {
                prop_assert!((p - q).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn neighbour_lists_match_distance_matrix((n, d, _m, seed) in dataset_params(), k in 1usize..8) {
        let ds = random_dataset(n, d, 2, seed);
        let direct = knn_from_features(ds.features(), k).unwrap();
        let via_matrix = knn_neighbors(&pairwise_distances(ds.features()).unwrap(), k).unwrap();
        prop_assert_eq!(&direct, &via_matrix);
        // every non-neighbour is at least as far as the k-th neighbour
        for i in 0..n {
            let kth = direct.distances(i)[k - 1];
            for j in (0..n).filter(|&j| j != i && !direct.neighbors(i).contains(&j)) {
                prop_assert!(euclidean(ds.features().row(i), ds.features().row(j)) >= kth);
            }
        }
    }

    #[test]
    fn rwmau_contract((n, d, n_min, seed) in dataset_params(), k in 2usize..8, gamma in 1usize..16, alpha in 0.05f64..=1.0) {
        let ds = random_dataset(n, d, n_min, seed);
        let cfg = ResampleConfig { alpha, k, gamma, seed, ..Default::default() };
        let out = resample(&ds, &cfg).unwrap();
        let u = undersample_count(ds.n_majority(), n_min, alpha).unwrap();
        prop_assert_eq!(out.removed.len(), u);
        prop_assert!(out.removed.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(out.removed.iter().all(|&i| ds.labels()[i] != MINORITY));
        prop_assert_eq!(out.augmented.n_rows(), n - u);
        prop_assert_eq!(rows_of(&out.augmented, &out.augmented.minority_indices()), rows_of(&ds, &ds.minority_indices()));
        if u > 0 {
            let scores = out.scores.as_ref().unwrap();
            let removed_min = out.removed.iter().map(|&i| scores.get(i).unwrap()).fold(f64::INFINITY, f64::min);
            for l in ds.majority_indices() {
                if out.removed.binary_search(&l).is_ok() {
                    continue;
                }
                let nu = scores.get(l).unwrap();
                prop_assert!(nu <= removed_min);
                // among positive scores, ties at the cut go to the smaller index
                if nu > 0.0 && nu == removed_min {
                    let tied_removed = out.removed.iter().filter(|&&i| scores.get(i).unwrap() == nu);
                    for &a in tied_removed {
                        prop_assert!(a < l);
                    }
                }
            }
            let bound = score_upper_bound(n_min, &WalkConfig::new(gamma, seed));
            prop_assert!(scores.iter().all(|(_, nu)| nu <= bound));
        }
        prop_assert_eq!(resample(&ds, &cfg).unwrap(), out);
    }

    #[test]
    fn baseline_contracts((n, d, n_min, seed) in dataset_params(), alpha in 0.05f64..=1.0) {
        let ds = random_dataset(n, d, n_min, seed);
        let u = undersample_count(ds.n_majority(), n_min, alpha).unwrap();
        let minority_rows = rows_of(&ds, &ds.minority_indices());

        let rus = random_undersample(&ds, alpha, seed).unwrap();
        prop_assert_eq!(rus.removed.len(), u);
        prop_assert!(rus.removed.iter().all(|&i| ds.labels()[i] != MINORITY));
        prop_assert_eq!(rows_of(&rus.augmented, &rus.augmented.minority_indices()), minority_rows.clone());

        let cc = cluster_centroid_undersample(&ds, alpha, seed).unwrap();
        prop_assert_eq!(cc.augmented.n_majority(), ds.n_majority() - u);
        prop_assert_eq!(rows_of(&cc.augmented, &cc.augmented.minority_indices()), minority_rows.clone());

        let ncr = ncr_clean(&ds, 3).unwrap();
        prop_assert!(ncr.removed.iter().all(|&i| ds.labels()[i] != MINORITY));
        prop_assert_eq!(ncr.augmented.n_minority(), n_min);
        prop_assert_eq!(rows_of(&ncr.augmented, &ncr.augmented.minority_indices()), minority_rows);
    }

    #[test]
    fn auc_invariances(seed in any::<u64>(), n in 2usize..60) {
        let mut s = rng::stream(seed, &[]);
        let mut labels: Vec<u8> = (0..n).map(|_| s.gen_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let scores: Vec<f64> = (0..n).map(|_| (s.gen_range(0..20) as f64) / 10.0).collect();
        let a = auc(&scores, &labels).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        let flipped: Vec<u8> = labels.iter().map(|&y| 1 - y).collect();
        prop_assert_eq!(a + auc(&scores, &flipped).unwrap(), 1.0);
        let warped: Vec<f64> = scores.iter().map(|x| x.powi(3) + (x * 0.5).exp()).collect();
        prop_assert_eq!(auc(&warped, &labels).unwrap(), a);
    }

    #[test]
    fn rank_sums(rows in prop::collection::vec(prop::collection::vec(0u8..5, 4), 1..12)) {
        let values: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64 / 4.0).collect()).collect();
        for r in &values {
            prop_assert_eq!(rank_row(r, true).iter().sum::<f64>(), 10.0);
        }
        let names = (0..values.len()).map(|i| format!("d{i}")).collect();
        let methods = (0..4).map(|j| format!("m{j}")).collect();
        let t = ResultTable::new(names, methods, values).unwrap();
        let sum: f64 = average_ranks(&t, true).unwrap().iter().sum();
        prop_assert!((sum - 10.0).abs() < 1e-12);
    }

    #[test]
    fn finner_is_monotone_and_conservative(raw in prop::collection::vec(0.0f64..=1.0, 1..10)) {
        let adj = finner_adjust(&raw);
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
        for w in order.windows(2) {
            prop_assert!(adj[w[0]] <= adj[w[1]]);
        }
        for (a, r) in adj.iter().zip(&raw) {
            prop_assert!(a >= r && *a <= 1.0);
        }
    }

    #[test]
    fn splits_partition_and_keep_both_classes((n, d, n_min, seed) in dataset_params(), rep in 0usize..10) {
        let ds = random_dataset(n, d, n_min, seed);
        let split = split_indices(&ds, &SplitSpec { seed, ..Default::default() }, rep).unwrap();
        let mut all = [split.train.clone(), split.test.clone()].concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(split.train.len(), (0.8 * n as f64).round() as usize);
        prop_assert!(ds.select(&split.train).has_both_classes());
    }

    #[test]
    fn probabilities_are_in_unit_interval((n, d, n_min, seed) in dataset_params()) {
        let ds = random_dataset(n, d, n_min, seed);
        for kind in ClassifierKind::ALL {
            let model = TrainedModel::fit(kind, &ds, seed).unwrap();
            prop_assert!(model.predict_proba(ds.features()).iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}

#[test]
fn standardize_gives_zero_mean_unit_std() {
    let ds = random_dataset(50, 4, 10, 1);
    let (z, _) = standardize(&ds);
    for col in z.features().columns() {
        let mean = col.sum() / 50.0;
        let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 50.0).sqrt();
        assert!(mean.abs() < 1e-9 && (std - 1.0).abs() < 1e-9);
    }
    let (again, _) = standardize(&z);
    for (a, b) in again.features().iter().zip(z.features().iter()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn knn_matches_brute_force() {
    let ds = random_dataset(30, 3, 9, 2);
    let test = random_dataset(12, 3, 3, 3);
    let got = knn_fit_predict(&ds, test.features(), 5).unwrap();
    for (q, &score) in test.features().rows().into_iter().zip(&got) {
        let mut all: Vec<(f64, usize)> =
            (0..30).map(|j| (euclidean(q, ds.features().row(j)), j)).collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let hits = all[..5].iter().filter(|(_, j)| ds.labels()[*j] == MINORITY).count();
        assert_eq!(score, hits as f64 / 5.0);
    }
}

#[test]
fn bagging_is_mean_of_members() {
    let ds = random_dataset(20, 2, 6, 4);
    let bag = BaggedTrees::fit(&ds, BaggingParams::default(), 9);
    assert_eq!(bag.members.len(), 10);
    let got = bag.predict_proba(ds.features());
    for (i, &p) in got.iter().enumerate() {
        let mean: f64 = bag.members.iter().map(|t| t.predict_proba(ds.features())[i]).sum::<f64>() / 10.0;
        assert!((p - mean).abs() < 1e-15);
    }

    let single = BaggingParams { n_estimators: 1, bootstrap: false, ..Default::default() };
    let tree = DecisionTree::fit(&ds, TreeParams::default());
    assert_eq!(BaggedTrees::fit(&ds, single, 1).predict_proba(ds.features()), tree.predict_proba(ds.features()));
    assert_eq!(BaggedTrees::fit(&ds, BaggingParams::default(), 9), bag);
}

#[test]
fn unbounded_tree_fits_distinct_rows_exactly() {
    for seed in 0..5 {
        let ds = random_dataset(60, 3, 20, seed);
        let tree = DecisionTree::fit(&ds, TreeParams { max_depth: None, min_leaf: 1 });
        let pred = tree.predict_proba(ds.features());
        for (p, &y) in pred.iter().zip(ds.labels()) {
            assert_eq!(*p, if y == MINORITY { 1.0 } else { 0.0 });
        }
        let capped = DecisionTree::fit(&ds, TreeParams { max_depth: Some(3), min_leaf: 2 });
        assert!(capped.depth() <= 3);
    }
}

#[test]
fn walk_scores_do_not_depend_on_thread_count() {
    let ds = random_dataset(200, 3, 30, 5);
    let g = build_graph(ds.features(), 6).unwrap();
    let cfg = WalkConfig { gamma: 12, walks_per_start: 3, seed: 17 };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| proximity_scores(&g, &ds.minority_indices(), &ds.majority_indices(), &cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn single_steps_follow_transition_row() {
    let ds = random_dataset(40, 2, 5, 6);
    let g = build_graph(ds.features(), 4).unwrap();
    let start = 7;
    let mut counts = vec![0usize; 40];
    let walks = 100_000;
    for rep in 0..walks {
        counts[random_walk(&g, start, 1, &mut walk_rng(1, start, rep))[0]] += 1;
    }
    for (j, &count) in counts.iter().enumerate() {
        let freq = count as f64 / walks as f64;
        assert!((freq - g.probability(start, j)).abs() < 0.01, "node {j}: {freq}");
    }
}

#[test]
fn doubling_walks_doubles_scores() {
    let ds = random_dataset(30, 2, 3, 8);
    let g = build_graph(ds.features(), 3).unwrap();
    let (min, maj) = (ds.minority_indices(), ds.majority_indices());
    let a = proximity_scores(&g, &min, &maj, &WalkConfig { gamma: 6, walks_per_start: 50_000, seed: 1 }).unwrap();
    let b = proximity_scores(&g, &min, &maj, &WalkConfig { gamma: 6, walks_per_start: 100_000, seed: 2 }).unwrap();
    let mut checked = 0;
    for (l, nu) in a.iter() {
        if nu / 50_000.0 > 0.05 {
            let ratio = b.get(l).unwrap() / nu;
            assert!((ratio - 2.0).abs() < 0.1, "node {l}: ratio {ratio}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn tuning_folds_stay_inside_training_split() {
    let ds = random_dataset(80, 3, 16, 9);
    let split = split_indices(&ds, &SplitSpec::default(), 0).unwrap();
    let train = ds.select(&split.train);
    let grid = TuneGrid { k_values: vec![2, 3], gamma_offsets: vec![0], ..Default::default() };
    let out = tune(&train, &grid, 0.5, 1).unwrap();
    for fold in &out.folds {
        for &i in fold {
            assert!(split.test.binary_search(&split.train[i]).is_err());
        }
    }
    assert!(grid.candidates().contains(&(out.k, out.gamma)));
}

#[test]
fn rus_seeds_give_different_removals() {
    let ds = random_dataset(102, 2, 2, 10);
    for s in 0..10u64 {
        // floor(98 * 0.5103) = 50
        let a = random_undersample(&ds, 0.5103, 2 * s).unwrap();
        let b = random_undersample(&ds, 0.5103, 2 * s + 1).unwrap();
        assert_eq!(a.removed.len(), 50);
        assert_ne!(a.removed, b.removed);
    }
}

#[test]
fn method_none_is_identity() {
    let ds = random_dataset(30, 2, 5, 11);
    let out = resample(&ds, &ResampleConfig { method: Method::None, ..Default::default() }).unwrap();
    assert_eq!(out.augmented, ds);
    assert!(out.removed.is_empty());
}
