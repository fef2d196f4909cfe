//! Dilated distance vectors and the (min, argmin, SO) feature triple.
//!
//! Entry `i` of the distance vector between a shapelet `s` of length `l`
//! with dilation `d` and a series `x` is
//!
//! ```text
//! f_i = sqrt( sum_{j=0}^{l-1} (x[i + j*d] - s[j])^2 )
//! ```
//!
//! for `i` in `0..m - (l-1)*d`. In normalized mode each dilated window is
//! z-normalized before the comparison; the shapelet itself was normalized
//! once when it was created. The sum is always accumulated in ascending `j`
//! so results are bitwise reproducible.

use crate::error::{Error, Result};
use crate::model::DilatedShapelet;

/// Population standard deviations below this are treated as zero variance.
pub const DEGENERATE_STD: f64 = 1e-8;

/// Population mean and standard deviation, two-pass.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Z-normalizes with the population standard deviation. A vector whose std
/// is below [`DEGENERATE_STD`] maps to all zeros.
pub fn znormalize(values: &[f64]) -> Vec<f64> {
    let (mean, std) = mean_std(values);
    if std < DEGENERATE_STD {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / std).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector(Vec<f64>);

impl DistanceVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Features extracted from one distance vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureTriple {
    pub min_dist: f64,
    /// 0-based, first minimizer.
    pub argmin_idx: usize,
    /// Number of entries strictly below the shapelet threshold.
    pub occ_count: usize,
}

fn n_positions(shapelet: &DilatedShapelet, m: usize) -> Result<usize> {
    shapelet.n_positions(m).ok_or(Error::ShapeletTooLong {
        span: shapelet.span(),
        series_len: m,
    })
}

/// Calls `visit(i, f_i)` for every admissible start position, in order.
fn for_each_distance(
    shapelet: &DilatedShapelet,
    series: &[f64],
    mut visit: impl FnMut(usize, f64),
) -> Result<()> {
    let n = n_positions(shapelet, series.len())?;
    let s = shapelet.values();
    let d = shapelet.dilation();
    if !shapelet.normalized() {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, sj) in s.iter().enumerate() {
                let diff = series[i + j * d] - sj;
                acc += diff * diff;
            }
            visit(i, acc.sqrt());
        }
        return Ok(());
    }

    let l = s.len() as f64;
    // Squared norm of the shapelet, which is the squared distance to a
    // zero (degenerate) window.
    let s_norm2 = s.iter().map(|v| v * v).sum::<f64>();
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..s.len() {
            sum += series[i + j * d];
        }
        let mean = sum / l;
        let mut var = 0.0;
        for j in 0..s.len() {
            let c = series[i + j * d] - mean;
            var += c * c;
        }
        let std = (var / l).sqrt();
        if std < DEGENERATE_STD {
            visit(i, s_norm2.sqrt());
            continue;
        }
        let mut acc = 0.0;
        for (j, sj) in s.iter().enumerate() {
            let diff = (series[i + j * d] - mean) / std - sj;
            acc += diff * diff;
        }
        visit(i, acc.sqrt());
    }
    Ok(())
}

/// Full distance vector of length `m - (l-1)*d`.
pub fn distance_vector(shapelet: &DilatedShapelet, series: &[f64]) -> Result<DistanceVector> {
    let mut out = Vec::with_capacity(series.len());
    for_each_distance(shapelet, series, |_, f| out.push(f))?;
    Ok(DistanceVector(out))
}

/// Min, first argmin and strict-threshold occurrence count, computed in one
/// pass without materializing the distance vector.
pub fn extract_features(shapelet: &DilatedShapelet, series: &[f64]) -> Result<FeatureTriple> {
    let lambda = shapelet.lambda();
    let mut triple = FeatureTriple {
        min_dist: f64::INFINITY,
        argmin_idx: 0,
        occ_count: 0,
    };
    for_each_distance(shapelet, series, |i, f| {
        if f < triple.min_dist {
            triple.min_dist = f;
            triple.argmin_idx = i;
        }
        if f < lambda {
            triple.occ_count += 1;
        }
    })?;
    Ok(triple)
}

/// Same triple as [`extract_features`], from an already computed vector and
/// an explicit threshold.
pub fn features_from_vector(distances: &[f64], lambda: f64) -> FeatureTriple {
    let mut triple = FeatureTriple {
        min_dist: f64::INFINITY,
        argmin_idx: 0,
        occ_count: 0,
    };
    for (i, &f) in distances.iter().enumerate() {
        if f < triple.min_dist {
            triple.min_dist = f;
            triple.argmin_idx = i;
        }
        if f < lambda {
            triple.occ_count += 1;
        }
    }
    triple
}
