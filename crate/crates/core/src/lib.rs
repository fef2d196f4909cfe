//! Random dilated shapelet transform for univariate time series
//! classification.
//!
//! A [`ShapeletBank`] of randomly drawn dilated shapelets is generated from
//! the training data ([`sampler`]), every series is mapped to the
//! `(min, argmin, SO)` features of each shapelet ([`transform`]), and a
//! one-vs-rest ridge classifier is fitted on top ([`ridge`]).

pub mod bench;
pub mod cli;
pub mod dataset_io;
pub mod distance;
pub mod error;
pub mod interpretability;
pub mod model;
pub mod parallel;
pub mod pipeline;
pub mod ridge;
pub mod sampler;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
pub use model::{
    validate_dataset, DilatedShapelet, FeatureKind, FeatureMatrix, GenerationConfig,
    LabeledDataset, RidgeModel, ShapeletBank, TimeSeries, ValidationReport,
};
pub use pipeline::{ModelArchive, RdstClassifier};
pub use ridge::AlphaGrid;
