//! The full classifier: shapelet bank, transform and ridge model, plus the
//! versioned model archive.

use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::time::Instant;

use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};

use crate::dataset_io::open_writer;
use crate::error::{Error, Result};
use crate::model::{GenerationConfig, LabeledDataset, RidgeModel, ShapeletBank, TimeSeries};
use crate::ridge::{self, AlphaGrid, RidgeReport};
use crate::sampler::generate_bank;
use crate::transform::transform;

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;

/// A fitted shapelet bank and the ridge model trained on its features.
#[derive(Debug, Clone, PartialEq)]
pub struct RdstClassifier {
    pub bank: ShapeletBank,
    pub ridge: RidgeModel,
}

/// Wall-clock seconds spent in each fitting stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FitTimings {
    pub generate_s: f64,
    pub transform_s: f64,
    pub ridge_s: f64,
}

impl FitTimings {
    pub fn total(&self) -> f64 {
        self.generate_s + self.transform_s + self.ridge_s
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub classifier: RdstClassifier,
    pub report: RidgeReport,
    pub timings: FitTimings,
}

impl RdstClassifier {
    /// Runs on the current rayon pool.
    pub fn fit(
        train: &LabeledDataset,
        config: &GenerationConfig,
        seed: u64,
        grid: &AlphaGrid,
    ) -> Result<FitOutcome> {
        let t0 = Instant::now();
        let bank = generate_bank(train, config, seed)?;
        let t1 = Instant::now();
        let features = transform(&bank, train.series())?;
        let t2 = Instant::now();
        let fit = ridge::fit(&features, train.labels(), grid)?;
        let t3 = Instant::now();
        Ok(FitOutcome {
            classifier: RdstClassifier {
                bank,
                ridge: fit.model,
            },
            report: fit.report,
            timings: FitTimings {
                generate_s: (t1 - t0).as_secs_f64(),
                transform_s: (t2 - t1).as_secs_f64(),
                ridge_s: (t3 - t2).as_secs_f64(),
            },
        })
    }

    pub fn decision_function(&self, series: &[TimeSeries]) -> Result<Vec<Vec<f64>>> {
        self.ridge.decision_function(&transform(&self.bank, series)?)
    }

    pub fn predict(&self, series: &[TimeSeries]) -> Result<Vec<i64>> {
        self.ridge.predict(&transform(&self.bank, series)?)
    }

    pub fn to_archive(&self) -> ModelArchive {
        ModelArchive {
            format_version: ARCHIVE_FORMAT_VERSION,
            bank: self.bank.clone(),
            ridge: self.ridge.clone(),
        }
    }
}

/// Self-contained serialized classifier. The bank carries the generation
/// config, seed and training length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format_version: u32,
    pub bank: ShapeletBank,
    pub ridge: RidgeModel,
}

impl ModelArchive {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.format_version != ARCHIVE_FORMAT_VERSION {
            return Err(Error::ArchiveVersion {
                expected: ARCHIVE_FORMAT_VERSION,
                found: header.format_version,
            });
        }
        let archive: ModelArchive = serde_json::from_str(text)?;
        archive.check()?;
        Ok(archive)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("corrupt archive: {m}")));
        for s in &self.bank.shapelets {
            s.check()?;
            if s.n_positions(self.bank.train_length).is_none() {
                return bad("shapelet does not fit the training length".into());
            }
        }
        if self.bank.shapelets.len() != self.bank.config.n_shapelets {
            return bad("shapelet count differs from the generation config".into());
        }
        let p = self.bank.n_features();
        let r = &self.ridge;
        let c = r.class_table.len();
        if r.feature_means.len() != p
            || r.feature_stds.len() != p
            || r.constant.len() != p
            || r.weights.len() != c
            || r.intercepts.len() != c
            || r.weights.iter().any(|w| w.len() != p)
        {
            return bad("ridge model dimensions do not match the bank".into());
        }
        Ok(())
    }

    pub fn into_classifier(self) -> RdstClassifier {
        RdstClassifier {
            bank: self.bank,
            ridge: self.ridge,
        }
    }

    /// Writes JSON, gzip-compressed when the path ends in `.gz`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = open_writer(path.as_ref())?;
        out.write_all(self.to_json()?.as_bytes())?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = BufReader::new(std::fs::File::open(path)?);
        let mut text = String::new();
        if path.extension().is_some_and(|e| e == "gz") {
            GzDecoder::new(file).read_to_string(&mut text)?;
        } else {
            let mut file = file;
            file.read_to_string(&mut text)?;
        }
        Self::from_json(&text)
    }
}
