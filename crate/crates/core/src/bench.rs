//! Sensitivity sweeps and scalability curves at desk scale.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset_io::{make_synthetic, stratified_resample, SyntheticSpec};
use crate::error::{Error, Result};
use crate::model::{GenerationConfig, LabeledDataset};
use crate::pipeline::RdstClassifier;
use crate::ridge::{accuracy, AlphaGrid};
use crate::stats::{descending_ranks, mean};
use crate::transform::transform;

/// A named configuration in a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub id: String,
    pub config: GenerationConfig,
}

/// Builds one config per value of a single parameter, all other parameters
/// at their defaults.
pub fn one_parameter_grid(param: &str, values: &[&str]) -> Result<Vec<SweepConfig>> {
    let base = GenerationConfig::default();
    values
        .iter()
        .map(|raw| {
            let mut config = base.clone();
            let bad = || Error::Config(format!("bad value {raw:?} for {param}"));
            match param {
                "n_shapelets" => config.n_shapelets = raw.parse().map_err(|_| bad())?,
                "lengths" => {
                    config.lengths = raw
                        .split(['+', ' ', ';'])
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse().map_err(|_| bad()))
                        .collect::<Result<_>>()?
                }
                "p_norm" => config.p_norm = raw.parse().map_err(|_| bad())?,
                "percentiles" => {
                    let (a, b) = raw.split_once(['-', ':']).ok_or_else(bad)?;
                    config.p1 = a.parse().map_err(|_| bad())?;
                    config.p2 = b.parse().map_err(|_| bad())?;
                }
                other => return Err(Error::Config(format!("unknown sweep parameter {other:?}"))),
            }
            config.check()?;
            Ok(SweepConfig {
                id: format!("{param}={raw}"),
                config,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub config_id: String,
    pub dataset: String,
    pub resample: usize,
    pub accuracy: f64,
    pub fit_s: f64,
    pub transform_s: f64,
    pub predict_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankSummary {
    pub config_id: String,
    /// Rank per dataset (1 = best, ties averaged), in dataset order.
    pub ranks: Vec<f64>,
    pub mean_rank: f64,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub records: Vec<SweepRecord>,
    pub summary: Vec<RankSummary>,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub train_fraction: f64,
    pub alpha_grid: AlphaGrid,
    /// Evaluate configs concurrently. Timings are then not meaningful.
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            train_fraction: 0.5,
            alpha_grid: AlphaGrid::default(),
            parallel: false,
        }
    }
}

/// One fit/predict run on a resample; the bank seed is `seed + resample`.
pub fn evaluate_split(
    train: &LabeledDataset,
    test: &LabeledDataset,
    config: &GenerationConfig,
    seed: u64,
    grid: &AlphaGrid,
) -> Result<(f64, f64, f64, f64)> {
    let fitted = RdstClassifier::fit(train, config, seed, grid)?;
    let t0 = Instant::now();
    let features = transform(&fitted.classifier.bank, test.series())?;
    let t1 = Instant::now();
    let predicted = fitted.classifier.ridge.predict(&features)?;
    let t2 = Instant::now();
    Ok((
        accuracy(&predicted, test.labels()),
        fitted.timings.total(),
        (t1 - t0).as_secs_f64(),
        (t2 - t1).as_secs_f64(),
    ))
}

/// Evaluates every config on every dataset over `n_resamples` seeded
/// stratified resamples. Resample `r` splits with seed `seed + r`, shared by
/// all configs.
pub fn sweep(
    configs: &[SweepConfig],
    datasets: &[(String, LabeledDataset)],
    n_resamples: usize,
    seed: u64,
    options: &SweepOptions,
) -> Result<SweepResults> {
    if configs.is_empty() || datasets.is_empty() || n_resamples == 0 {
        return Err(Error::Config(
            "a sweep needs at least one config, dataset and resample".into(),
        ));
    }
    let mut splits = Vec::new();
    for (name, ds) in datasets {
        for r in 0..n_resamples {
            let (train, test) = stratified_resample(ds, options.train_fraction, seed + r as u64)?;
            splits.push((name.clone(), r, train, test));
        }
    }
    let run_config = |c: &SweepConfig| -> Result<Vec<SweepRecord>> {
        splits
            .iter()
            .map(|(name, r, train, test)| {
                let (acc, fit_s, transform_s, predict_s) =
                    evaluate_split(train, test, &c.config, seed + *r as u64, &options.alpha_grid)?;
                Ok(SweepRecord {
                    config_id: c.id.clone(),
                    dataset: name.clone(),
                    resample: *r,
                    accuracy: acc,
                    fit_s,
                    transform_s,
                    predict_s,
                })
            })
            .collect()
    };
    let per_config: Vec<Vec<SweepRecord>> = if options.parallel {
        configs.par_iter().map(run_config).collect::<Result<_>>()?
    } else {
        configs.iter().map(run_config).collect::<Result<_>>()?
    };
    let records: Vec<SweepRecord> = per_config.into_iter().flatten().collect();
    let summary = rank_summary(configs, datasets, &records);
    Ok(SweepResults { records, summary })
}

/// Mean accuracy per (config, dataset), ranked per dataset, then averaged
/// across datasets.
pub fn rank_summary(
    configs: &[SweepConfig],
    datasets: &[(String, LabeledDataset)],
    records: &[SweepRecord],
) -> Vec<RankSummary> {
    let mean_acc = |cid: &str, ds: &str| {
        let accs: Vec<f64> = records
            .iter()
            .filter(|r| r.config_id == cid && r.dataset == ds)
            .map(|r| r.accuracy)
            .collect();
        mean(&accs)
    };
    let mut ranks = vec![Vec::with_capacity(datasets.len()); configs.len()];
    let mut accs = vec![Vec::with_capacity(datasets.len()); configs.len()];
    for (ds, _) in datasets {
        let per_config: Vec<f64> = configs.iter().map(|c| mean_acc(&c.id, ds)).collect();
        for (i, r) in descending_ranks(&per_config).into_iter().enumerate() {
            ranks[i].push(r);
            accs[i].push(per_config[i]);
        }
    }
    configs
        .iter()
        .zip(ranks.into_iter().zip(accs))
        .map(|(c, (ranks, accs))| RankSummary {
            config_id: c.id.clone(),
            mean_rank: mean(&ranks),
            mean_accuracy: mean(&accs),
            ranks,
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    writeln!(out, "config_id,dataset,resample,accuracy,fit_s,transform_s,predict_s")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.config_id, r.dataset, r.resample, r.accuracy, r.fit_s, r.transform_s, r.predict_s
        )?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScaleAxis {
    NSeries,
    SeriesLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingPoint {
    pub size: usize,
    /// Bank generation, training transform and ridge fit.
    pub fit_s: f64,
    /// Transform of the full dataset with the fitted bank.
    pub transform_s: f64,
}

pub const SCALABILITY_REPEATS: usize = 3;

/// Times fit and transform at each size, averaging [`SCALABILITY_REPEATS`]
/// runs. On the `NSeries` axis `size` is the total number of series.
pub fn scalability(
    template: &SyntheticSpec,
    axis: ScaleAxis,
    points: &[usize],
    config: &GenerationConfig,
    seed: u64,
) -> Result<Vec<TimingPoint>> {
    if let Some(p) = points.iter().find(|p| **p == 0) {
        return Err(Error::Config(format!("invalid scalability point {p}")));
    }
    let grid = AlphaGrid::default();
    points
        .iter()
        .map(|&size| {
            let mut spec = template.clone();
            match axis {
                ScaleAxis::NSeries => spec.n_per_class = size.div_ceil(2),
                ScaleAxis::SeriesLength => spec.length = size,
            }
            let ds = make_synthetic(&spec)?;
            let mut fit_s = 0.0;
            let mut transform_s = 0.0;
            for rep in 0..SCALABILITY_REPEATS {
                let fitted = RdstClassifier::fit(&ds, config, seed + rep as u64, &grid)?;
                let t0 = Instant::now();
                transform(&fitted.classifier.bank, ds.series())?;
                transform_s += t0.elapsed().as_secs_f64();
                fit_s += fitted.timings.total();
            }
            let reps = SCALABILITY_REPEATS as f64;
            Ok(TimingPoint {
                size,
                fit_s: fit_s / reps,
                transform_s: transform_s / reps,
            })
        })
        .collect()
}
