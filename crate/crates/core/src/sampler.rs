//! Random shapelet generation.
//!
//! Shapelet `k` draws from its own ChaCha8 stream: the generator is seeded
//! from the bank seed and switched to stream `k`, so every shapelet depends
//! only on `(seed, k, dataset)` and banks can be generated in parallel with
//! schedule-independent output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distance::{distance_vector, znormalize};
use crate::error::{Error, Result};
use crate::model::{
    validate_dataset, DilatedShapelet, GenerationConfig, LabeledDataset, ShapeletBank,
};
use crate::stats::percentile;

/// Where a shapelet's values and threshold were taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    /// Series the values were extracted from.
    pub value_series: usize,
    pub start: usize,
    /// Class index of `value_series`.
    pub source_class: usize,
    /// Same-class series whose distance vector gave the threshold.
    pub lambda_series: usize,
}

/// Random stream and read-only context for drawing a single shapelet.
pub struct SamplerState<'a> {
    rng: ChaCha8Rng,
    config: &'a GenerationConfig,
    dataset: &'a LabeledDataset,
    members: &'a [Vec<usize>],
}

impl<'a> SamplerState<'a> {
    /// `members` is `dataset.members_by_class()`, computed once per bank.
    pub fn new(
        seed: u64,
        shapelet_index: u64,
        config: &'a GenerationConfig,
        dataset: &'a LabeledDataset,
        members: &'a [Vec<usize>],
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shapelet_index);
        Self {
            rng,
            config,
            dataset,
            members,
        }
    }

    pub fn sample_length(&mut self) -> Result<usize> {
        let m = self.dataset.series_len();
        if let Some(l) = self.config.lengths.iter().find(|l| **l > m) {
            return Err(Error::Config(format!(
                "shapelet length {l} exceeds series length {m}"
            )));
        }
        let idx = self.rng.random_range(0..self.config.lengths.len());
        Ok(self.config.lengths[idx])
    }

    /// `d = floor(2^x)` with `x` uniform in `[0, log2(m/l)]`.
    pub fn sample_dilation(&mut self, l: usize, m: usize) -> usize {
        let upper = (m as f64 / l as f64).log2().max(0.0);
        let x = self.rng.random::<f64>() * upper;
        let d = (x.exp2().floor() as usize).max(1);
        // exp2 round-off must never push the span past the series.
        d.min((m - 1) / (l - 1))
    }

    pub fn sample_normalized(&mut self) -> bool {
        self.rng.random_bool(self.config.p_norm)
    }

    /// Values of a dilated window from a uniformly chosen series, z-normalized
    /// when `normalized` is set. Returns `(values, value_series, start)`.
    pub fn sample_values(
        &mut self,
        l: usize,
        d: usize,
        normalized: bool,
    ) -> (Vec<f64>, usize, usize) {
        let m = self.dataset.series_len();
        let series = self.rng.random_range(0..self.dataset.len());
        let start = self.rng.random_range(0..m - (l - 1) * d);
        let window = dilated_window(self.dataset.series()[series].values(), start, l, d);
        let values = if normalized {
            znormalize(&window)
        } else {
            window
        };
        (values, series, start)
    }

    /// Threshold drawn uniformly between the `p1` and `p2` percentiles of the
    /// distance vector to a random member of `source_class`. Returns the
    /// threshold and the chosen series.
    pub fn sample_lambda(
        &mut self,
        shapelet: &DilatedShapelet,
        source_class: usize,
    ) -> Result<(f64, usize)> {
        let pool = &self.members[source_class];
        let series = pool[self.rng.random_range(0..pool.len())];
        let f = distance_vector(shapelet, self.dataset.series()[series].values())?;
        let lo = percentile(f.values(), self.config.p1);
        let hi = percentile(f.values(), self.config.p2);
        let u = self.rng.random::<f64>();
        let lambda = if hi > lo { lo + u * (hi - lo) } else { lo };
        Ok((lambda.clamp(lo, hi).max(0.0), series))
    }

    /// length -> dilation -> normalization coin -> values -> threshold.
    pub fn sample_shapelet(&mut self) -> Result<(DilatedShapelet, Provenance)> {
        let m = self.dataset.series_len();
        let l = self.sample_length()?;
        let d = self.sample_dilation(l, m);
        let normalized = self.sample_normalized();
        let (values, value_series, start) = self.sample_values(l, d, normalized);
        let source_class = self
            .dataset
            .class_index(self.dataset.labels()[value_series])
            .expect("label is in class table");
        let mut shapelet = DilatedShapelet::new(values, d, 0.0, normalized)?;
        let (lambda, lambda_series) = self.sample_lambda(&shapelet, source_class)?;
        shapelet = DilatedShapelet::new(shapelet.values().to_vec(), d, lambda, normalized)?;
        Ok((
            shapelet,
            Provenance {
                value_series,
                start,
                source_class,
                lambda_series,
            },
        ))
    }
}

/// `[x[start], x[start + d], ..., x[start + (l-1)*d]]`.
pub fn dilated_window(series: &[f64], start: usize, l: usize, d: usize) -> Vec<f64> {
    (0..l).map(|j| series[start + j * d]).collect()
}

fn check_inputs(dataset: &LabeledDataset, config: &GenerationConfig) -> Result<()> {
    let report = validate_dataset(dataset);
    if !report.passes() {
        return Err(Error::Validation(report));
    }
    config.check_for_length(dataset.series_len())
}

/// Generates a bank of `config.n_shapelets` shapelets, in parallel on the
/// current rayon pool.
pub fn generate_bank(
    dataset: &LabeledDataset,
    config: &GenerationConfig,
    seed: u64,
) -> Result<ShapeletBank> {
    generate_bank_with_provenance(dataset, config, seed).map(|(bank, _)| bank)
}

/// [`generate_bank`], also returning where each shapelet came from.
pub fn generate_bank_with_provenance(
    dataset: &LabeledDataset,
    config: &GenerationConfig,
    seed: u64,
) -> Result<(ShapeletBank, Vec<Provenance>)> {
    check_inputs(dataset, config)?;
    let members = dataset.members_by_class();
    let drawn: Vec<(DilatedShapelet, Provenance)> = (0..config.n_shapelets)
        .into_par_iter()
        .map(|k| SamplerState::new(seed, k as u64, config, dataset, &members).sample_shapelet())
        .collect::<Result<_>>()?;
    let (shapelets, provenance) = drawn.into_iter().unzip();
    Ok((
        ShapeletBank {
            shapelets,
            config: config.clone(),
            seed,
            train_length: dataset.series_len(),
        },
        provenance,
    ))
}
