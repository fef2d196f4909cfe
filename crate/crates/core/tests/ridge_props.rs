mod common;

use common::*;
use proptest::prelude::*;
use rdst::ridge::{fit, gradient_norm, standardize, AlphaGrid};
use rdst::FeatureMatrix;

fn random_problem(rng: &mut XorShift, n: usize, p: usize, c: usize) -> (Vec<Vec<f64>>, Vec<i64>) {
    let labels: Vec<i64> = (0..n).map(|i| (i % c) as i64 * 10 - 5).collect();
    let x = (0..n)
        .map(|i| {
            (0..p)
                .map(|j| rng.gauss() * (1.0 + j as f64) + if j % c == i % c { 1.5 } else { 0.0 })
                .collect()
        })
        .collect();
    (x, labels)
}

fn matrix(rows: &[Vec<f64>]) -> FeatureMatrix {
    FeatureMatrix::from_row_major(rows.len(), rows[0].len(), rows.concat()).unwrap()
}

#[test]
fn matches_normal_equation_oracle() {
    let mut rng = XorShift(41);
    for case in 0..50 {
        let n = 10 + rng.below(50);
        let p = 2 + rng.below(90);
        let c = 2 + rng.below(3);
        let (x, labels) = random_problem(&mut rng, n, p, c);
        let fitted = fit(&matrix(&x), &labels, &AlphaGrid::default()).unwrap();
        let model = &fitted.model;
        let z = naive_standardize(&x);
        let encoded: Vec<usize> = labels.iter().map(|l| model.class_index(*l).unwrap()).collect();
        for class in 0..c {
            let w = naive_ridge(&z, &centered_targets(&encoded, class), model.alpha);
            for (a, b) in model.weights[class].iter().zip(&w) {
                assert!((a - b).abs() < 1e-6, "case {case} (n={n}, p={p}): {a} vs {b}");
            }
        }
        assert!(fitted.report.gradient_norm < 1e-6, "case {case}: {}", fitted.report.gradient_norm);
        assert_eq!(fitted.report.dual, p > n);
    }
}

#[test]
fn gradient_vanishes_at_solution() {
    let mut rng = XorShift(42);
    let (x, labels) = random_problem(&mut rng, 40, 120, 3);
    let fm = matrix(&x);
    let fitted = fit(&fm, &labels, &AlphaGrid::default()).unwrap();
    let std = standardize(&fm);
    let model = &fitted.model;
    let w = nalgebra::DMatrix::from_fn(120, 3, |j, c| model.weights[c][j]);
    let y = nalgebra::DMatrix::from_fn(40, 3, |i, c| {
        let t = if model.class_index(labels[i]) == Some(c) { 1.0 } else { -1.0 };
        t - model.intercepts[c]
    });
    assert!(gradient_norm(&std.z, &y, &w, model.alpha) < 1e-6);
}

#[test]
fn duplicated_columns_keep_predictions() {
    // Well separated classes: the halved effective regularization of the
    // duplicated design must not change any label.
    let mut rng = XorShift(43);
    let labels: Vec<i64> = (0..60).map(|i| (i % 3) as i64).collect();
    let x: Vec<Vec<f64>> = labels
        .iter()
        .map(|l| (0..8).map(|j| rng.gauss() * 0.3 + if j as i64 % 3 == *l { 4.0 } else { 0.0 }).collect())
        .collect();
    let doubled: Vec<Vec<f64>> = x.iter().map(|r| [r.clone(), r.clone()].concat()).collect();
    let a = fit(&matrix(&x), &labels, &AlphaGrid::default()).unwrap().model;
    let b = fit(&matrix(&doubled), &labels, &AlphaGrid::default()).unwrap().model;
    assert_eq!(a.predict(&matrix(&x)).unwrap(), b.predict(&matrix(&doubled)).unwrap());
}

#[test]
fn duplicated_columns_split_weight_evenly() {
    // [X X] at 2*alpha is X at alpha with each weight halved across the copies.
    let mut rng = XorShift(47);
    let (x, labels) = random_problem(&mut rng, 60, 8, 2);
    let doubled: Vec<Vec<f64>> = x.iter().map(|r| [r.clone(), r.clone()].concat()).collect();
    let a = fit(&matrix(&x), &labels, &AlphaGrid::new(vec![0.7]).unwrap()).unwrap().model;
    let b = fit(&matrix(&doubled), &labels, &AlphaGrid::new(vec![1.4]).unwrap()).unwrap().model;
    for c in 0..2 {
        for j in 0..8 {
            assert!((b.weights[c][j] - a.weights[c][j] / 2.0).abs() < 1e-10);
            assert!((b.weights[c][j + 8] - a.weights[c][j] / 2.0).abs() < 1e-10);
        }
    }
    assert_eq!(a.predict(&matrix(&x)).unwrap(), b.predict(&matrix(&doubled)).unwrap());
}

#[test]
fn random_labels_give_chance_accuracy() {
    let mut rng = XorShift(44);
    for c in [2usize, 4] {
        let x: Vec<Vec<f64>> = (0..1000).map(|_| (0..10).map(|_| rng.gauss()).collect()).collect();
        let labels: Vec<i64> = (0..1000).map(|_| rng.below(c) as i64).collect();
        let fitted = fit(&matrix(&x), &labels, &AlphaGrid::default()).unwrap();
        let chance = 1.0 / c as f64;
        assert!(
            (fitted.report.loo_accuracy - chance).abs() < 0.1,
            "C={c}: {}",
            fitted.report.loo_accuracy
        );
    }
}

#[test]
fn standardization_is_idempotent() {
    let mut rng = XorShift(45);
    let (x, _) = random_problem(&mut rng, 50, 20, 2);
    let once = standardize(&matrix(&x));
    let rows: Vec<Vec<f64>> = (0..50).map(|i| (0..20).map(|j| once.z[(i, j)]).collect()).collect();
    let twice = standardize(&matrix(&rows));
    assert!((&once.z - &twice.z).amax() < 1e-12);
}

#[test]
fn fitting_is_deterministic() {
    let mut rng = XorShift(46);
    let (x, labels) = random_problem(&mut rng, 30, 50, 3);
    let a = fit(&matrix(&x), &labels, &AlphaGrid::default()).unwrap().model;
    let b = fit(&matrix(&x), &labels, &AlphaGrid::default()).unwrap().model;
    assert_eq!(a, b);
}

#[test]
fn training_row_of_separable_problem_gets_its_label() {
    let x = vec![vec![0.0, 0.1], vec![0.2, 0.0], vec![5.0, 5.1], vec![5.2, 4.9]];
    let labels = vec![1, 1, 2, 2];
    let model = fit(&matrix(&x), &labels, &AlphaGrid::default()).unwrap().model;
    assert_eq!(model.predict(&matrix(&[x[2].clone()])).unwrap(), vec![2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn positive_column_rescaling_keeps_predictions(seed in 1u64..1000, col in 0usize..6, scale in prop::sample::select(vec![1e-3, 0.5, 7.0, 1000.0])) {
        let mut rng = XorShift(seed);
        let (x, labels) = random_problem(&mut rng, 40, 6, 3);
        let scaled: Vec<Vec<f64>> = x.iter().map(|r| {
            let mut r = r.clone();
            r[col] *= scale;
            r
        }).collect();
        let grid = AlphaGrid::default();
        let a = fit(&matrix(&x), &labels, &grid).unwrap().model;
        let b = fit(&matrix(&scaled), &labels, &grid).unwrap().model;
        prop_assert_eq!(a.predict(&matrix(&x)).unwrap(), b.predict(&matrix(&scaled)).unwrap());
    }
}
