//! Applies a shapelet bank to series, producing the feature matrix.

use std::io::Write;

use rayon::prelude::*;

use crate::distance::extract_features;
use crate::error::{Error, Result};
use crate::model::{FeatureMatrix, LabeledDataset, ShapeletBank, TimeSeries};

/// Shapelets per parallel task within a row.
const SHAPELET_BLOCK: usize = 256;

/// Every output cell is written by exactly one task, so the result does not
/// depend on the number of threads.
pub fn transform(bank: &ShapeletBank, series: &[TimeSeries]) -> Result<FeatureMatrix> {
    let m = bank.train_length;
    if let Some((index, s)) = series.iter().enumerate().find(|(_, s)| s.len() != m) {
        return Err(Error::LengthMismatch {
            index,
            expected: m,
            found: s.len(),
        });
    }
    let n_cols = bank.n_features();
    let mut data = vec![0.0; series.len() * n_cols];
    if n_cols > 0 {
        data.par_chunks_mut(n_cols)
            .zip(series.par_iter())
            .try_for_each(|(row, s)| {
                row.par_chunks_mut(3 * SHAPELET_BLOCK)
                    .enumerate()
                    .try_for_each(|(block, cells)| {
                        let first = block * SHAPELET_BLOCK;
                        for (offset, out) in cells.chunks_mut(3).enumerate() {
                            let t = extract_features(&bank.shapelets[first + offset], s.values())?;
                            out[0] = t.min_dist;
                            out[1] = t.argmin_idx as f64;
                            out[2] = t.occ_count as f64;
                        }
                        Ok::<(), Error>(())
                    })
            })?;
    }
    FeatureMatrix::from_row_major(series.len(), n_cols, data)
}

pub fn transform_dataset(bank: &ShapeletBank, dataset: &LabeledDataset) -> Result<FeatureMatrix> {
    transform(bank, dataset.series())
}

/// Writes the matrix as CSV with header `s{k}_min,s{k}_argmin,s{k}_so`.
pub fn write_csv<W: Write>(matrix: &FeatureMatrix, mut out: W) -> Result<()> {
    let header: Vec<String> = (0..matrix.n_cols() / 3)
        .flat_map(|k| [format!("s{k}_min"), format!("s{k}_argmin"), format!("s{k}_so")])
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let mut line = String::new();
    for r in 0..matrix.n_rows() {
        line.clear();
        for (c, v) in matrix.row(r).iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DilatedShapelet, GenerationConfig};

    fn bank(shapelets: Vec<DilatedShapelet>, m: usize) -> ShapeletBank {
        ShapeletBank {
            config: GenerationConfig {
                n_shapelets: shapelets.len(),
                ..Default::default()
            },
            shapelets,
            seed: 0,
            train_length: m,
        }
    }

    fn series(n: usize, m: usize) -> Vec<TimeSeries> {
        (0..n)
            .map(|i| TimeSeries::new((0..m).map(|j| ((i * 31 + j * 17) % 11) as f64).collect()).unwrap())
            .collect()
    }

    #[test]
    fn shape_is_rows_by_three_per_shapelet() {
        let shp = |d| DilatedShapelet::new(vec![1.0, 2.0, 3.0], d, 1.0, false).unwrap();
        let b = bank(vec![shp(1), shp(2), shp(3), shp(1)], 20);
        let fm = transform(&b, &series(3, 20)).unwrap();
        assert_eq!((fm.n_rows(), fm.n_cols()), (3, 12));
    }

    #[test]
    fn identity_match_in_first_row() {
        let xs = series(2, 20);
        let values = xs[0].values()[4..8].to_vec();
        let b = bank(vec![DilatedShapelet::new(values, 1, 0.5, false).unwrap()], 20);
        let fm = transform(&b, &xs).unwrap();
        assert_eq!(fm.get(0, 0), 0.0);
        assert!(fm.get(0, 2) >= 1.0);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let b = bank(vec![DilatedShapelet::new(vec![0.0, 1.0], 1, 0.0, false).unwrap()], 20);
        let mut xs = series(2, 20);
        xs.push(TimeSeries::new(vec![0.0; 19]).unwrap());
        assert!(matches!(
            transform(&b, &xs),
            Err(Error::LengthMismatch {
                index: 2,
                expected: 20,
                found: 19
            })
        ));
    }

    #[test]
    fn csv_header_and_rows() {
        let b = bank(
            vec![
                DilatedShapelet::new(vec![0.0, 1.0], 1, 0.0, false).unwrap(),
                DilatedShapelet::new(vec![1.0, 0.0], 2, 9.0, false).unwrap(),
            ],
            6,
        );
        let fm = transform(&b, &series(2, 6)).unwrap();
        let mut buf = Vec::new();
        write_csv(&fm, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s0_min,s0_argmin,s0_so,s1_min,s1_argmin,s1_so");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 6);
    }
}
