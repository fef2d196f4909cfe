//! Brute-force reference implementations. Everything in here is written
//! from the formulas with plain loops and uses nothing from the library's
//! algorithmic code.

#![allow(dead_code, clippy::needless_range_loop)]

use rdst::{LabeledDataset, TimeSeries};

/// z-normalization written out independently: population std, zeros for
/// std below 1e-8.
pub fn naive_znorm(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let mut mean = 0.0;
    for x in v {
        mean += x;
    }
    mean /= n;
    let mut var = 0.0;
    for x in v {
        var += (x - mean) * (x - mean);
    }
    let sd = (var / n).sqrt();
    let mut out = Vec::with_capacity(v.len());
    for x in v {
        out.push(if sd < 1e-8 { 0.0 } else { (x - mean) / sd });
    }
    out
}

/// Dilated distance vector, direct transliteration of the definition.
pub fn naive_distance(shapelet: &[f64], dilation: usize, normalized: bool, x: &[f64]) -> Vec<f64> {
    let l = shapelet.len();
    let m = x.len();
    assert!((l - 1) * dilation < m, "shapelet too long");
    let mut f = Vec::new();
    for i in 0..m - (l - 1) * dilation {
        let mut sub = Vec::with_capacity(l);
        for j in 0..l {
            sub.push(x[i + j * dilation]);
        }
        if normalized {
            sub = naive_znorm(&sub);
        }
        let mut acc = 0.0;
        for j in 0..l {
            acc += (sub[j] - shapelet[j]) * (sub[j] - shapelet[j]);
        }
        f.push(acc.sqrt());
    }
    f
}

/// The contiguous (undilated) shapelet distance.
pub fn contiguous_distance(shapelet: &[f64], x: &[f64]) -> Vec<f64> {
    let l = shapelet.len();
    let mut f = Vec::new();
    for i in 0..=x.len() - l {
        let mut acc = 0.0;
        for j in 0..l {
            let diff = x[i + j] - shapelet[j];
            acc += diff * diff;
        }
        f.push(acc.sqrt());
    }
    f
}

pub fn naive_min_argmin(f: &[f64]) -> (f64, usize) {
    let mut best = 0;
    for i in 1..f.len() {
        if f[i] < f[best] {
            best = i;
        }
    }
    (f[best], best)
}

pub fn naive_count_below(f: &[f64], lambda: f64) -> usize {
    let mut c = 0;
    for v in f {
        if *v < lambda {
            c += 1;
        }
    }
    c
}

/// Dense Gaussian elimination with partial pivoting. Panics on a singular
/// system.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        assert!(a[piv][col].abs() > 1e-300, "singular matrix");
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    x
}

/// Solves `(XᵀX + alpha I) w = Xᵀy` through the normal equations.
pub fn naive_ridge(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Vec<f64> {
    let n = x.len();
    let p = x[0].len();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for i in 0..n {
        for j in 0..p {
            b[j] += x[i][j] * y[i];
            for k in 0..p {
                a[j][k] += x[i][j] * x[i][k];
            }
        }
    }
    for (j, row) in a.iter_mut().enumerate() {
        row[j] += alpha;
    }
    gauss_solve(a, b)
}

/// Column standardization with population std; constant columns (std
/// below 1e-12 relative) become zero.
pub fn naive_standardize(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    let p = x[0].len();
    let mut out = vec![vec![0.0; p]; n];
    for j in 0..p {
        let mut mean = 0.0;
        for row in x {
            mean += row[j];
        }
        mean /= n as f64;
        let mut var = 0.0;
        for row in x {
            var += (row[j] - mean) * (row[j] - mean);
        }
        let sd = (var / n as f64).sqrt();
        if sd <= 1e-12 * mean.abs().max(1.0) {
            continue;
        }
        for i in 0..n {
            out[i][j] = (x[i][j] - mean) / sd;
        }
    }
    out
}

/// Centered one-vs-rest targets for class index `c`.
pub fn centered_targets(labels: &[usize], c: usize) -> Vec<f64> {
    let y: Vec<f64> = labels.iter().map(|l| if *l == c { 1.0 } else { -1.0 }).collect();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| v - mean).collect()
}

/// Deterministic xorshift for test data that must not depend on `rand`.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Approximately standard normal (sum of 12 uniforms).
    pub fn gauss(&mut self) -> f64 {
        (0..12).map(|_| self.unit()).sum::<f64>() - 6.0
    }
}

pub fn random_dataset(rng: &mut XorShift, n: usize, m: usize, n_classes: usize) -> LabeledDataset {
    let series = (0..n)
        .map(|_| TimeSeries::new((0..m).map(|_| rng.gauss()).collect()).unwrap())
        .collect();
    let labels = (0..n).map(|i| (i % n_classes) as i64).collect();
    LabeledDataset::new(series, labels)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || a == b
}
