//! One-vs-rest ridge classifier with leave-one-out regularization selection.
//!
//! Columns are standardized first, targets are encoded as +1/-1 per class
//! and centered, so the intercept of each class is the mean of its target.
//! For every candidate `alpha` the exact leave-one-out residuals
//! `e_i / (1 - h_ii)` are computed from one eigendecomposition, of `ZᵀZ`
//! when there are at most as many features as samples and of `ZZᵀ`
//! otherwise. Both cases reduce to an orthonormal `n x r` basis `Q` with
//! eigenvalues `s`, for which the hat matrix is
//! `H = Q diag(s / (s + alpha)) Qᵀ + 11ᵀ/n`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{FeatureMatrix, RidgeModel, ValidationIssue, ValidationReport};

/// Candidate regularization strengths, strictly increasing and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid(Vec<f64>);

impl Default for AlphaGrid {
    /// 10 log-spaced values from 1e-3 to 1e3.
    fn default() -> Self {
        Self((0..10).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 9.0)).collect())
    }
}

impl AlphaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("alpha grid is empty".into()));
        }
        if values.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Config("alpha values must be finite and > 0".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("alpha grid must be strictly increasing".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Column statistics and the standardized design matrix.
#[derive(Debug, Clone)]
pub struct Standardized {
    pub z: DMatrix<f64>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub constant: Vec<bool>,
}

fn is_constant(mean: f64, std: f64) -> bool {
    std <= 1e-12 * mean.abs().max(1.0)
}

/// Standardizes every column to mean 0 and population std 1. Constant
/// columns become zero and are flagged.
pub fn standardize(features: &FeatureMatrix) -> Standardized {
    let (n, p) = (features.n_rows(), features.n_cols());
    let mut z = DMatrix::from_row_slice(n, p, features.as_slice());
    let mut means = vec![0.0; p];
    let mut stds = vec![0.0; p];
    let mut constant = vec![false; p];
    for j in 0..p {
        let mut col = z.column_mut(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let std = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
        if is_constant(mean, std) {
            col.fill(0.0);
            constant[j] = true;
            stds[j] = 0.0;
        } else {
            col.iter_mut().for_each(|v| *v = (*v - mean) / std);
            stds[j] = std;
        }
        means[j] = mean;
    }
    Standardized {
        z,
        means,
        stds,
        constant,
    }
}

/// Diagnostics of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeReport {
    /// Sum of squared leave-one-out residuals per grid value.
    pub cv_errors: Vec<f64>,
    pub selected: usize,
    /// Leave-one-out accuracy at the selected alpha.
    pub loo_accuracy: f64,
    /// Largest `|Zᵀ(Zw - y) + alpha w|` entry over all classes.
    pub gradient_norm: f64,
    /// True when the dual (`ZZᵀ`) path was used.
    pub dual: bool,
}

#[derive(Debug, Clone)]
pub struct RidgeFit {
    pub model: RidgeModel,
    pub report: RidgeReport,
}

/// Targets as an `n x C` matrix of +1/-1, centered per column, plus the
/// column means and the class table.
fn encode_targets(labels: &[i64]) -> (DMatrix<f64>, Vec<f64>, Vec<i64>, Vec<usize>) {
    let mut class_table = labels.to_vec();
    class_table.sort_unstable();
    class_table.dedup();
    let encoded: Vec<usize> = labels
        .iter()
        .map(|l| class_table.binary_search(l).expect("label in table"))
        .collect();
    let n = labels.len();
    let mut y = DMatrix::from_fn(n, class_table.len(), |i, c| {
        if encoded[i] == c {
            1.0
        } else {
            -1.0
        }
    });
    let mut means = Vec::with_capacity(class_table.len());
    for mut col in y.column_iter_mut() {
        let mean = col.iter().sum::<f64>() / n as f64;
        col.iter_mut().for_each(|v| *v -= mean);
        means.push(mean);
    }
    (y, means, class_table, encoded)
}

/// Orthonormal basis and eigenvalues of the column space of `z`.
fn spectral_basis(z: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, bool) {
    let (n, p) = z.shape();
    if p <= n {
        let eig = SymmetricEigen::new(z.transpose() * z);
        let scale = eig.eigenvalues.amax().max(1.0);
        let mut cols = Vec::new();
        let mut s = Vec::new();
        for k in 0..p {
            let sk = eig.eigenvalues[k];
            if sk > 1e-12 * scale {
                cols.push((z * eig.eigenvectors.column(k)) / sk.sqrt());
                s.push(sk);
            }
        }
        let q = if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        };
        (q, s, false)
    } else {
        let eig = SymmetricEigen::new(z * z.transpose());
        let s = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
        (eig.eigenvectors, s, true)
    }
}

/// Leave-one-out residuals for every grid value from a shared basis.
fn loo_residuals(q: &DMatrix<f64>, s: &[f64], y: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    let n = y.nrows();
    let qty = q.transpose() * y;
    let shrink: Vec<f64> = s.iter().map(|sk| sk / (sk + alpha)).collect();
    let mut filtered = qty;
    for (k, f) in shrink.iter().enumerate() {
        filtered.row_mut(k).scale_mut(*f);
    }
    let fitted = q * filtered;
    let mut loo = y - fitted;
    for i in 0..n {
        let mut h = 1.0 / n as f64;
        for (k, f) in shrink.iter().enumerate() {
            h += q[(i, k)] * q[(i, k)] * f;
        }
        let denom = 1.0 - h;
        loo.row_mut(i).unscale_mut(denom);
    }
    loo
}

/// Solves `(ZᵀZ + alpha I) W = Zᵀ Y`, through the dual system
/// `(ZZᵀ + alpha I) C = Y`, `W = ZᵀC` when `Z` is wide. One step of
/// iterative refinement follows the Cholesky solve.
pub fn ridge_solve(z: &DMatrix<f64>, y: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    let (n, p) = z.shape();
    let solve = |a: DMatrix<f64>, b: DMatrix<f64>| -> Result<DMatrix<f64>> {
        let chol = a.clone().cholesky().ok_or(Error::DegenerateData)?;
        let mut x = chol.solve(&b);
        let r = &b - &a * &x;
        x += chol.solve(&r);
        Ok(x)
    };
    if p <= n {
        let a = z.transpose() * z + DMatrix::identity(p, p) * alpha;
        solve(a, z.transpose() * y)
    } else {
        let a = z * z.transpose() + DMatrix::identity(n, n) * alpha;
        Ok(z.transpose() * solve(a, y.clone())?)
    }
}

/// `max |Zᵀ(ZW - Y) + alpha W|`, the gradient of the ridge objective.
pub fn gradient_norm(z: &DMatrix<f64>, y: &DMatrix<f64>, w: &DMatrix<f64>, alpha: f64) -> f64 {
    let g = z.transpose() * (z * w - y) + w * alpha;
    g.amax()
}

/// Fits the classifier, selecting alpha from `grid` by leave-one-out error
/// (ties go to the smaller alpha).
pub fn fit(features: &FeatureMatrix, labels: &[i64], grid: &AlphaGrid) -> Result<RidgeFit> {
    let n = features.n_rows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let mut report = ValidationReport::default();
    if n < 2 {
        report.issues.push(ValidationIssue::TooFewSeries(n));
    }
    let (y, y_means, class_table, encoded) = encode_targets(labels);
    if class_table.len() < 2 {
        report
            .issues
            .push(ValidationIssue::TooFewClasses(class_table.len()));
    }
    if !report.passes() {
        return Err(Error::Validation(report));
    }
    if features.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("feature matrix has non-finite entries".into()));
    }
    let std = standardize(features);
    if std.constant.iter().all(|c| *c) {
        return Err(Error::DegenerateData);
    }

    let (q, s, dual) = spectral_basis(&std.z);
    let mut cv_errors = Vec::with_capacity(grid.values().len());
    let mut best: Option<(usize, f64, DMatrix<f64>)> = None;
    for (idx, &alpha) in grid.values().iter().enumerate() {
        let loo = loo_residuals(&q, &s, &y, alpha);
        let err = loo.norm_squared();
        cv_errors.push(err);
        if best.as_ref().is_none_or(|(_, e, _)| err < *e) {
            best = Some((idx, err, loo));
        }
    }
    let (selected, _, loo) = best.expect("grid is non-empty");
    let alpha = grid.values()[selected];

    let correct = (0..n)
        .filter(|&i| {
            // leave-one-out decision value = target - loo residual
            let scores = (0..class_table.len()).map(|c| y[(i, c)] + y_means[c] - loo[(i, c)]);
            argmax(scores) == encoded[i]
        })
        .count();

    let mut w = ridge_solve(&std.z, &y, alpha)?;
    for (j, _) in std.constant.iter().enumerate().filter(|(_, c)| **c) {
        w.row_mut(j).fill(0.0);
    }
    let gradient_norm = gradient_norm(&std.z, &y, &w, alpha);

    let model = RidgeModel {
        weights: w.column_iter().map(|c| c.iter().copied().collect()).collect(),
        intercepts: y_means,
        feature_means: std.means,
        feature_stds: std.stds,
        constant: std.constant,
        alpha,
        class_table,
    };
    Ok(RidgeFit {
        model,
        report: RidgeReport {
            cv_errors,
            selected,
            loo_accuracy: correct as f64 / n as f64,
            gradient_norm,
            dual,
        },
    })
}

/// Index of the largest value; the first one wins ties.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

impl RidgeModel {
    /// Per-row decision values `w_c · z + b_c`, in class-table order.
    pub fn decision_function(&self, features: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        if features.n_cols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: features.n_cols(),
            });
        }
        let mut z = vec![0.0; self.n_features()];
        let mut out = Vec::with_capacity(features.n_rows());
        for r in 0..features.n_rows() {
            for (j, x) in features.row(r).iter().enumerate() {
                z[j] = if self.constant[j] {
                    0.0
                } else {
                    (x - self.feature_means[j]) / self.feature_stds[j]
                };
            }
            let scores = self
                .weights
                .iter()
                .zip(&self.intercepts)
                .map(|(w, b)| b + w.iter().zip(&z).map(|(wj, zj)| wj * zj).sum::<f64>())
                .collect();
            out.push(scores);
        }
        Ok(out)
    }

    /// Label with the largest decision value; ties go to the lowest class
    /// index.
    pub fn predict(&self, features: &FeatureMatrix) -> Result<Vec<i64>> {
        Ok(self
            .decision_function(features)?
            .into_iter()
            .map(|scores| self.class_table[argmax(scores.into_iter())])
            .collect())
    }
}

pub fn accuracy(predicted: &[i64], truth: &[i64]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
