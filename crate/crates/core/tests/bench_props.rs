use std::collections::BTreeMap;

use rdst::bench::{one_parameter_grid, rank_summary, scalability, sweep, ScaleAxis, SweepOptions, SweepRecord};
use rdst::dataset_io::{make_synthetic, SyntheticSpec};
use rdst::{GenerationConfig, LabeledDataset};

fn small(seed: u64, noise: f64) -> LabeledDataset {
    make_synthetic(&SyntheticSpec {
        n_per_class: 10,
        length: 48,
        pattern_length: 7,
        pattern_dilation: 2,
        noise_std: noise,
        seed,
    })
    .unwrap()
}

#[test]
fn sweep_covers_every_cell_once() {
    let configs = one_parameter_grid("n_shapelets", &["10", "30", "60"]).unwrap();
    let datasets = vec![("a".to_string(), small(1, 0.3)), ("b".to_string(), small(2, 1.5))];
    let results = sweep(&configs, &datasets, 2, 7, &SweepOptions::default()).unwrap();
    assert_eq!(results.records.len(), 3 * 2 * 2);
    let mut cells = BTreeMap::new();
    for r in &results.records {
        *cells.entry((r.config_id.clone(), r.dataset.clone(), r.resample)).or_insert(0) += 1;
        assert!((0.0..=1.0).contains(&r.accuracy));
    }
    assert_eq!(cells.len(), 12);
    assert!(cells.values().all(|&c| c == 1));
    assert_eq!(results.summary.len(), 3);
    for d in 0..2 {
        let total: f64 = results.summary.iter().map(|s| s.ranks[d]).sum();
        assert!((total - 6.0).abs() < 1e-12);
    }
}

#[test]
fn parallel_sweep_matches_sequential_accuracies() {
    let configs = one_parameter_grid("p_norm", &["0.2", "0.8"]).unwrap();
    let configs: Vec<_> = configs
        .into_iter()
        .map(|mut c| {
            c.config.n_shapelets = 20;
            c
        })
        .collect();
    let datasets = vec![("a".to_string(), small(3, 0.5))];
    let seq = sweep(&configs, &datasets, 2, 0, &SweepOptions::default()).unwrap();
    let par = sweep(
        &configs,
        &datasets,
        2,
        0,
        &SweepOptions {
            parallel: true,
            ..Default::default()
        },
    )
    .unwrap();
    let accs = |rs: &[SweepRecord]| rs.iter().map(|r| r.accuracy).collect::<Vec<_>>();
    assert_eq!(accs(&seq.records), accs(&par.records));
}

#[test]
fn single_config_ranks_first() {
    let configs = one_parameter_grid("lengths", &["5+7"]).unwrap();
    let datasets = vec![("a".to_string(), small(1, 0.3)), ("b".to_string(), small(2, 0.3))];
    let record = |ds: &str| SweepRecord {
        config_id: configs[0].id.clone(),
        dataset: ds.into(),
        resample: 0,
        accuracy: 0.7,
        fit_s: 0.0,
        transform_s: 0.0,
        predict_s: 0.0,
    };
    let summary = rank_summary(&configs, &datasets, &[record("a"), record("b")]);
    assert_eq!(summary[0].ranks, vec![1.0, 1.0]);
    assert_eq!(summary[0].mean_rank, 1.0);
}

#[test]
fn tied_configs_share_rank() {
    let configs = one_parameter_grid("n_shapelets", &["1", "2", "3"]).unwrap();
    let datasets = vec![("a".to_string(), small(1, 0.3))];
    let records: Vec<SweepRecord> = configs
        .iter()
        .zip([0.9, 0.5, 0.9])
        .map(|(c, acc)| SweepRecord {
            config_id: c.id.clone(),
            dataset: "a".into(),
            resample: 0,
            accuracy: acc,
            fit_s: 0.0,
            transform_s: 0.0,
            predict_s: 0.0,
        })
        .collect();
    let ranks: Vec<f64> = rank_summary(&configs, &datasets, &records).iter().map(|s| s.ranks[0]).collect();
    assert_eq!(ranks, vec![1.5, 3.0, 1.5]);
}

#[test]
fn scalability_reports_every_point() {
    let template = SyntheticSpec {
        n_per_class: 10,
        length: 64,
        pattern_length: 7,
        pattern_dilation: 2,
        ..Default::default()
    };
    let config = GenerationConfig {
        n_shapelets: 50,
        lengths: vec![7],
        ..Default::default()
    };
    let curve = scalability(&template, ScaleAxis::SeriesLength, &[64, 128, 256], &config, 0).unwrap();
    assert_eq!(curve.iter().map(|p| p.size).collect::<Vec<_>>(), vec![64, 128, 256]);
    assert!(curve.iter().all(|p| p.fit_s > 0.0 && p.transform_s > 0.0));
    let curve = scalability(&template, ScaleAxis::NSeries, &[10, 40], &config, 0).unwrap();
    // Timing noise makes strict monotonicity flaky; only report gross violations.
    if curve[1].transform_s < 0.95 * curve[0].transform_s {
        eprintln!("note: transform time not monotone in n: {curve:?}");
    }
}
