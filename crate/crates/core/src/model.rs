//! Shared domain types. Everything here is immutable once constructed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that stored normalized shapelet values are
/// z-normalized.
pub const NORMALIZED_TOLERANCE: f64 = 1e-9;

/// A univariate series of at least two finite samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "length {} is below the minimum of 2",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value {} at position {pos}",
                values[pos]
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        TimeSeries::new(values)
    }
}

impl From<TimeSeries> for Vec<f64> {
    fn from(ts: TimeSeries) -> Self {
        ts.values
    }
}

/// Series with integer class labels.
///
/// Construction does not enforce dataset-level invariants; run
/// [`validate_dataset`] (or use [`LabeledDataset::validated`]) before
/// training on it.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    series: Vec<TimeSeries>,
    labels: Vec<i64>,
    class_table: Vec<i64>,
}

impl LabeledDataset {
    pub fn new(series: Vec<TimeSeries>, labels: Vec<i64>) -> Self {
        let mut class_table = labels.clone();
        class_table.sort_unstable();
        class_table.dedup();
        Self {
            series,
            labels,
            class_table,
        }
    }

    /// Builds the dataset and rejects it unless every invariant holds.
    pub fn validated(series: Vec<TimeSeries>, labels: Vec<i64>) -> Result<Self> {
        let ds = Self::new(series, labels);
        let report = validate_dataset(&ds);
        if report.passes() {
            Ok(ds)
        } else {
            Err(Error::Validation(report))
        }
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Sorted distinct labels. Position in this table is the class index.
    pub fn class_table(&self) -> &[i64] {
        &self.class_table
    }

    pub fn n_classes(&self) -> usize {
        self.class_table.len()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Common series length, taken from the first series.
    pub fn series_len(&self) -> usize {
        self.series.first().map_or(0, TimeSeries::len)
    }

    pub fn class_index(&self, label: i64) -> Option<usize> {
        self.class_table.binary_search(&label).ok()
    }

    /// Labels mapped to contiguous indices `0..C`.
    pub fn encoded_labels(&self) -> Vec<usize> {
        self.labels
            .iter()
            .map(|l| self.class_index(*l).expect("label is in class table"))
            .collect()
    }

    /// Member indices per class index.
    pub fn members_by_class(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.class_table.len()];
        for (i, c) in self.encoded_labels().into_iter().enumerate() {
            members[c].push(i);
        }
        members
    }

    /// Sub-dataset made of the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset::new(
            indices.iter().map(|&i| self.series[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    CountMismatch { series: usize, labels: usize },
    TooFewSeries(usize),
    UnequalLength {
        index: usize,
        expected: usize,
        found: usize,
    },
    TooFewClasses(usize),
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::CountMismatch { series, labels } => {
                write!(f, "{series} series but {labels} labels")
            }
            ValidationIssue::TooFewSeries(n) => write!(f, "{n} series, at least 2 required"),
            ValidationIssue::UnequalLength {
                index,
                expected,
                found,
            } => write!(
                f,
                "unequal lengths: series {index} has length {found}, expected {expected}"
            ),
            ValidationIssue::TooFewClasses(n) => {
                write!(f, "{n} distinct class(es), at least 2 required")
            }
        }
    }
}

/// Outcome of [`validate_dataset`]. Warnings never make validation fail.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    /// Classes with a single member; they cannot be split by a stratified
    /// resample.
    pub singleton_classes: Vec<i64>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.issues.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks the training-dataset invariants. Non-finite samples and series
/// shorter than 2 are already excluded by [`TimeSeries::new`].
pub fn validate_dataset(dataset: &LabeledDataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = dataset.series.len();
    if n != dataset.labels.len() {
        report.issues.push(ValidationIssue::CountMismatch {
            series: n,
            labels: dataset.labels.len(),
        });
    }
    if n < 2 {
        report.issues.push(ValidationIssue::TooFewSeries(n));
    }
    let expected = dataset.series_len();
    for (index, s) in dataset.series.iter().enumerate() {
        if s.len() != expected {
            report.issues.push(ValidationIssue::UnequalLength {
                index,
                expected,
                found: s.len(),
            });
        }
    }
    if dataset.class_table.len() < 2 {
        report
            .issues
            .push(ValidationIssue::TooFewClasses(dataset.class_table.len()));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for l in &dataset.labels {
        *counts.entry(*l).or_default() += 1;
    }
    report.singleton_classes = counts
        .into_iter()
        .filter(|(_, c)| *c == 1)
        .map(|(l, _)| l)
        .collect();
    report
}

/// A shapelet `{values, dilation, lambda}` plus its distance mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilatedShapelet {
    values: Vec<f64>,
    dilation: usize,
    lambda: f64,
    normalized: bool,
}

impl DilatedShapelet {
    /// Stores `values` as given. Normalized shapelets must already be
    /// z-normalized (or all zero).
    pub fn new(values: Vec<f64>, dilation: usize, lambda: f64, normalized: bool) -> Result<Self> {
        let shp = Self {
            values,
            dilation,
            lambda,
            normalized,
        };
        shp.check()?;
        Ok(shp)
    }

    /// Z-normalizes `raw` and builds a normalized shapelet from it.
    pub fn normalized_from(raw: &[f64], dilation: usize, lambda: f64) -> Result<Self> {
        Self::new(crate::distance::znormalize(raw), dilation, lambda, true)
    }

    pub(crate) fn check(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::Config(format!("invalid shapelet: {msg}")));
        if self.values.len() < 2 {
            return invalid(format!("length {} < 2", self.values.len()));
        }
        if self.dilation < 1 {
            return invalid("dilation must be >= 1".into());
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return invalid(format!("threshold {} must be finite and >= 0", self.lambda));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite value".into());
        }
        if self.normalized && !self.is_degenerate() {
            let (mean, std) = crate::distance::mean_std(&self.values);
            if mean.abs() >= NORMALIZED_TOLERANCE || (std - 1.0).abs() >= NORMALIZED_TOLERANCE {
                return invalid(format!(
                    "normalized values have mean {mean} and std {std}"
                ));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dilation(&self) -> usize {
        self.dilation
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// A normalized shapelet drawn from a constant subsequence stores zeros.
    pub fn is_degenerate(&self) -> bool {
        self.normalized && self.values.iter().all(|v| *v == 0.0)
    }

    /// Distance between the first and last sample positions, `(l-1)*d`.
    pub fn span(&self) -> usize {
        (self.values.len() - 1) * self.dilation
    }

    /// Number of admissible start positions on a series of length `m`.
    pub fn n_positions(&self, m: usize) -> Option<usize> {
        let span = self.span();
        (span < m).then(|| m - span)
    }
}

/// The four generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub n_shapelets: usize,
    pub lengths: Vec<usize>,
    pub p_norm: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            n_shapelets: 10_000,
            lengths: vec![11],
            p_norm: 0.8,
            p1: 5.0,
            p2: 10.0,
        }
    }
}

impl GenerationConfig {
    /// Checks everything that does not depend on the training data.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_shapelets == 0 {
            return fail("n_shapelets must be positive".into());
        }
        if self.lengths.is_empty() {
            return fail("the set of shapelet lengths is empty".into());
        }
        if let Some(l) = self.lengths.iter().find(|l| **l < 2) {
            return fail(format!("shapelet length {l} is below 2"));
        }
        if !(0.0..=1.0).contains(&self.p_norm) {
            return fail(format!("p_norm = {} is outside [0, 1]", self.p_norm));
        }
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=100.0).contains(&p) {
                return fail(format!("{name} = {p} is outside [0, 100]"));
            }
        }
        if self.p1 > self.p2 {
            return fail(format!("p1 = {} exceeds p2 = {}", self.p1, self.p2));
        }
        Ok(())
    }

    /// Checks the data-dependent constraint `max(L) <= m`.
    pub fn check_for_length(&self, m: usize) -> Result<()> {
        self.check()?;
        if let Some(l) = self.lengths.iter().find(|l| **l > m) {
            return Err(Error::Config(format!(
                "shapelet length {l} exceeds series length {m}"
            )));
        }
        Ok(())
    }
}

/// Generated shapelets together with what produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeletBank {
    pub shapelets: Vec<DilatedShapelet>,
    pub config: GenerationConfig,
    pub seed: u64,
    pub train_length: usize,
}

impl ShapeletBank {
    pub fn len(&self) -> usize {
        self.shapelets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapelets.is_empty()
    }

    pub fn n_features(&self) -> usize {
        3 * self.shapelets.len()
    }
}

/// Which of the three per-shapelet features a column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Min,
    Argmin,
    #[serde(rename = "SO")]
    Occurrence,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Min, FeatureKind::Argmin, FeatureKind::Occurrence];

    /// Maps a column index to `(shapelet index, feature kind)`.
    pub fn of_column(col: usize) -> (usize, FeatureKind) {
        (col / 3, Self::ALL[col % 3])
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Min => "min",
            FeatureKind::Argmin => "argmin",
            FeatureKind::Occurrence => "SO",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Row-major `n x (3 * n_shapelets)` matrix. Columns `3k, 3k+1, 3k+2` hold
/// min, argmin and SO for shapelet `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_row_major(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                expected: n_rows * n_cols,
                found: data.len(),
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_rows).map(move |r| self.get(r, col))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Little-endian bytes of every entry, for bitwise comparisons.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.data.iter().flat_map(|v| v.to_le_bytes()).collect()
    }
}

/// One-vs-rest ridge classifier over standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    /// One weight vector per class, in class-table order.
    pub weights: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
    pub feature_means: Vec<f64>,
    /// Population standard deviations. Zero for constant columns.
    pub feature_stds: Vec<f64>,
    /// Constant columns; their weights are zero and they are ignored at
    /// prediction time.
    pub constant: Vec<bool>,
    pub alpha: f64,
    pub class_table: Vec<i64>,
}

impl RidgeModel {
    pub fn n_features(&self) -> usize {
        self.feature_means.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_table.len()
    }

    pub fn class_index(&self, label: i64) -> Option<usize> {
        self.class_table.iter().position(|c| *c == label)
    }
}
