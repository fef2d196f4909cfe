mod common;

use common::*;
use rdst::parallel::with_threads;
use rdst::sampler::generate_bank;
use rdst::transform::transform;
use rdst::GenerationConfig;

fn setup() -> (rdst::LabeledDataset, rdst::ShapeletBank) {
    let mut rng = XorShift(31);
    let ds = random_dataset(&mut rng, 24, 80, 3);
    let config = GenerationConfig {
        n_shapelets: 700,
        lengths: vec![5, 9, 11],
        p_norm: 0.5,
        ..Default::default()
    };
    let bank = generate_bank(&ds, &config, 77).unwrap();
    (ds, bank)
}

#[test]
fn thread_count_does_not_change_bytes() {
    let (ds, bank) = setup();
    let a = with_threads(Some(1), || transform(&bank, ds.series())).unwrap().unwrap();
    let b = with_threads(Some(8), || transform(&bank, ds.series())).unwrap().unwrap();
    assert_eq!(a.to_le_bytes(), b.to_le_bytes());
}

#[test]
fn permuting_rows_permutes_output() {
    let (ds, bank) = setup();
    let fm = transform(&bank, ds.series()).unwrap();
    let order: Vec<usize> = (0..ds.len()).rev().collect();
    let shuffled = ds.subset(&order);
    let fp = transform(&bank, shuffled.series()).unwrap();
    for (new_row, &old_row) in order.iter().enumerate() {
        assert_eq!(fp.row(new_row), fm.row(old_row));
    }
}

#[test]
fn column_semantics() {
    let (ds, bank) = setup();
    let fm = transform(&bank, ds.series()).unwrap();
    assert_eq!(fm.n_cols(), 3 * bank.len());
    for r in 0..fm.n_rows() {
        for (k, shp) in bank.shapelets.iter().enumerate() {
            let n_pos = shp.n_positions(80).unwrap() as f64;
            let (min, argmin, so) = (fm.get(r, 3 * k), fm.get(r, 3 * k + 1), fm.get(r, 3 * k + 2));
            assert!(min >= 0.0);
            assert!(argmin.fract() == 0.0 && argmin >= 0.0 && argmin < n_pos);
            assert!(so.fract() == 0.0 && so >= 0.0 && so <= n_pos);
        }
    }
}
