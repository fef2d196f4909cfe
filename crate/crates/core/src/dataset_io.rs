//! UCR-style TSV datasets, synthetic data and stratified resampling.
//!
//! A dataset file has one series per line: the class label, then the `m`
//! sample values, all separated by tabs, no header. Files ending in `.gz`
//! are transparently (de)compressed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_dataset, LabeledDataset, TimeSeries};

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

fn open_reader(path: &Path) -> Result<Box<dyn Read>> {
    let file = File::open(path)?;
    Ok(if is_gz(path) {
        Box::new(GzDecoder::new(file))
    } else {
        Box::new(file)
    })
}

pub fn open_writer(path: &Path) -> Result<Box<dyn Write>> {
    let file = BufWriter::new(File::create(path)?);
    Ok(if is_gz(path) {
        Box::new(GzEncoder::new(file, Compression::default()))
    } else {
        Box::new(file)
    })
}

/// Integer labels are kept; float labels with integral values (`"1.0"`) are
/// truncated; anything else is mapped to `0..C` by sorted token order.
fn decode_labels(tokens: &[String]) -> Vec<i64> {
    if let Some(ints) = tokens.iter().map(|t| t.parse::<i64>().ok()).collect::<Option<Vec<_>>>() {
        return ints;
    }
    let integral = |t: &String| {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.fract() == 0.0 && v.abs() < 9.0e15)
            .map(|v| v as i64)
    };
    if let Some(ints) = tokens.iter().map(integral).collect::<Option<Vec<_>>>() {
        return ints;
    }
    let mut distinct = tokens.to_vec();
    distinct.sort();
    distinct.dedup();
    tokens
        .iter()
        .map(|t| distinct.binary_search(t).expect("token is present") as i64)
        .collect()
}

/// Parses a TSV dataset without dataset-level validation. Rows must still
/// all have the same number of values.
pub fn parse_tsv<R: BufRead>(reader: R) -> Result<LabeledDataset> {
    let mut label_tokens = Vec::new();
    let mut series = Vec::new();
    let mut width: Option<(usize, usize)> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let label = fields.next().unwrap_or_default().trim().to_string();
        if label.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                column: 1,
                message: "missing label".into(),
            });
        }
        let mut values = Vec::new();
        for (col, field) in fields.enumerate() {
            let column = col + 2;
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                column,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    column,
                    message: format!("non-finite value {field:?}"),
                });
            }
            values.push(v);
        }
        match width {
            None => width = Some((values.len(), lineno)),
            Some((w, first)) if w != values.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    column: values.len().min(w) + 2,
                    message: format!(
                        "ragged row: {} values, line {first} has {w}",
                        values.len()
                    ),
                })
            }
            Some(_) => {}
        }
        let ts = TimeSeries::new(values).map_err(|e| Error::Parse {
            line: lineno,
            column: 2,
            message: e.to_string(),
        })?;
        label_tokens.push(label);
        series.push(ts);
    }
    Ok(LabeledDataset::new(series, decode_labels(&label_tokens)))
}

/// Reads a dataset file without dataset-level validation (for inference
/// inputs, which may hold a single class).
pub fn read_tsv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    parse_tsv(BufReader::new(open_reader(path.as_ref())?))
}

/// Reads a training dataset and checks every dataset invariant.
pub fn load_tsv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let ds = read_tsv(path)?;
    let report = validate_dataset(&ds);
    if !report.passes() {
        return Err(Error::Validation(report));
    }
    Ok(ds)
}

/// Floats are written in shortest round-trip form.
pub fn write_tsv<W: Write>(dataset: &LabeledDataset, mut out: W) -> Result<()> {
    let mut line = String::new();
    for (s, label) in dataset.series().iter().zip(dataset.labels()) {
        line.clear();
        line.push_str(&label.to_string());
        for v in s.values() {
            line.push('\t');
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_tsv(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = open_writer(path.as_ref())?;
    write_tsv(dataset, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Two-class synthetic problem: Gaussian noise, with a fixed dilated pattern
/// added at a random admissible position in every class-1 series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_per_class: usize,
    pub length: usize,
    pub pattern_length: usize,
    pub pattern_dilation: usize,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_per_class: 50,
            length: 256,
            pattern_length: 11,
            pattern_dilation: 4,
            noise_std: 0.2,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn check(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_per_class == 0 {
            return fail("n_per_class must be positive".into());
        }
        if self.pattern_length < 2 || self.pattern_dilation < 1 {
            return fail("pattern length must be >= 2 and dilation >= 1".into());
        }
        if (self.pattern_length - 1) * self.pattern_dilation >= self.length {
            return fail(format!(
                "pattern span {} does not fit length {}",
                (self.pattern_length - 1) * self.pattern_dilation,
                self.length
            ));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return fail(format!("noise_std = {} must be >= 0", self.noise_std));
        }
        Ok(())
    }
}

/// One period of a unit sine, sampled at `pattern_length` points.
pub fn synthetic_pattern(spec: &SyntheticSpec) -> Vec<f64> {
    let l = spec.pattern_length;
    (0..l)
        .map(|j| (std::f64::consts::TAU * j as f64 / (l - 1) as f64 + 0.5).sin())
        .collect()
}

/// Class 0 rows first, then class 1 rows. Returns the dataset and, for every
/// class-1 row, the start position of the injected pattern.
pub fn make_synthetic_with_positions(spec: &SyntheticSpec) -> Result<(LabeledDataset, Vec<usize>)> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pattern = synthetic_pattern(spec);
    let span = (spec.pattern_length - 1) * spec.pattern_dilation;
    let mut series = Vec::with_capacity(2 * spec.n_per_class);
    let mut labels = Vec::with_capacity(2 * spec.n_per_class);
    let mut positions = Vec::with_capacity(spec.n_per_class);
    for class in 0..2 {
        for _ in 0..spec.n_per_class {
            let mut values: Vec<f64> = (0..spec.length)
                .map(|_| rng.sample::<f64, _>(StandardNormal) * spec.noise_std)
                .collect();
            if class == 1 {
                let start = rng.random_range(0..spec.length - span);
                for (j, p) in pattern.iter().enumerate() {
                    values[start + j * spec.pattern_dilation] += p;
                }
                positions.push(start);
            }
            series.push(TimeSeries::new(values)?);
            labels.push(class);
        }
    }
    Ok((LabeledDataset::new(series, labels), positions))
}

pub fn make_synthetic(spec: &SyntheticSpec) -> Result<LabeledDataset> {
    make_synthetic_with_positions(spec).map(|(ds, _)| ds)
}

/// Per-class proportional split: each class contributes
/// `round(train_fraction * n_c)` rows to train (at least 1, at most
/// `n_c - 1`), the rest to test. Rows keep their original relative order.
pub fn stratified_resample(
    dataset: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = stratified_indices(dataset, train_fraction, seed)?;
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

/// Row indices of the split computed by [`stratified_resample`].
pub fn stratified_indices(
    dataset: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction {train_fraction} must be in (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, members) in dataset.members_by_class().into_iter().enumerate() {
        let n = members.len();
        if n < 2 {
            return Err(Error::Config(format!(
                "class {} has {n} member(s) and cannot appear in both splits",
                dataset.class_table()[class]
            )));
        }
        let mut shuffled = members;
        shuffled.shuffle(&mut rng);
        let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&shuffled[..n_train]);
        test.extend_from_slice(&shuffled[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
