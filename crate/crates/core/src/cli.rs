//! Command-line interface. Exit codes: 0 success, 2 configuration error,
//! 3 data error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{self, ScaleAxis, SweepOptions};
use crate::dataset_io::{load_tsv, make_synthetic, read_tsv, save_tsv, stratified_resample, SyntheticSpec};
use crate::error::{Error, Result};
use crate::interpretability::{explain, write_bundle};
use crate::model::{GenerationConfig, LabeledDataset};
use crate::parallel::with_threads;
use crate::pipeline::{ModelArchive, RdstClassifier};
use crate::ridge::{accuracy, AlphaGrid};
use crate::stats;
use crate::transform::{transform, write_csv};

#[derive(Debug, Parser)]
#[command(name = "rdst", version, about = "Random dilated shapelet transform classifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on a labeled TSV file and write the model archive.
    Fit(FitArgs),
    /// Predict labels for a TSV file, one label per line.
    Predict(PredictArgs),
    /// Fit and score over one or more resamples; prints a JSON report.
    Evaluate(EvaluateArgs),
    /// Export weight rankings, summaries and shapelet placements.
    Explain(ExplainArgs),
    /// Write a synthetic two-class dataset.
    Synthesize(SynthesizeArgs),
    /// Write the feature matrix of a TSV file as CSV.
    Transform(TransformArgs),
    /// Sensitivity sweep over one generation parameter.
    Sweep(SweepArgs),
    /// Timing curve along the number of series or the series length.
    Scale(ScaleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerationArgs {
    /// Number of shapelets to generate.
    #[arg(long, default_value_t = 10_000)]
    pub n_shapelets: usize,
    /// Candidate shapelet lengths, comma separated.
    #[arg(long, default_value = "11", value_delimiter = ',')]
    pub lengths: Vec<usize>,
    /// Probability that a shapelet uses z-normalized distance.
    #[arg(long, default_value_t = 0.8)]
    pub p_norm: f64,
    /// Lower percentile bound for the occurrence threshold.
    #[arg(long, default_value_t = 5.0)]
    pub p1: f64,
    /// Upper percentile bound for the occurrence threshold.
    #[arg(long, default_value_t = 10.0)]
    pub p2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ridge regularization candidates, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub alpha_grid: Option<Vec<f64>>,
}

impl GenerationArgs {
    fn config(&self) -> Result<GenerationConfig> {
        let config = GenerationConfig {
            n_shapelets: self.n_shapelets,
            lengths: self.lengths.clone(),
            p_norm: self.p_norm,
            p1: self.p1,
            p2: self.p2,
        };
        config.check()?;
        Ok(config)
    }

    fn grid(&self) -> Result<AlphaGrid> {
        match &self.alpha_grid {
            Some(v) => AlphaGrid::new(v.clone()),
            None => Ok(AlphaGrid::default()),
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub train: PathBuf,
    #[command(flatten)]
    pub generation: GenerationArgs,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Model archive path; `.gz` compresses.
    #[arg(short, long, default_value = "model.json")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    /// Label file (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write per-class decision values as CSV.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub train: PathBuf,
    /// Test file. Without it every resample is drawn from the training file.
    pub test: Option<PathBuf>,
    #[command(flatten)]
    pub generation: GenerationArgs,
    #[arg(long, default_value_t = 1)]
    pub n_resamples: usize,
    /// Train share of resamples (default: the share of the given split, or 0.5).
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Report path (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    /// Class label to explain.
    #[arg(long = "class")]
    pub class_id: i64,
    /// Number of top shapelets to place on every series.
    #[arg(long, default_value_t = 1)]
    pub top_k: usize,
    #[arg(short, long, default_value = "explanation")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also split the data and write the test part here.
    #[arg(long)]
    pub test_output: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 50)]
    pub n_per_class: usize,
    #[arg(long, default_value_t = 256)]
    pub length: usize,
    #[arg(long, default_value_t = 11)]
    pub pattern_length: usize,
    #[arg(long, default_value_t = 4)]
    pub pattern_dilation: usize,
    #[arg(long, default_value_t = 0.2)]
    pub noise_std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SynthesizeArgs {
    fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            n_per_class: self.n_per_class,
            length: self.length,
            pattern_length: self.pattern_length,
            pattern_dilation: self.pattern_dilation,
            noise_std: self.noise_std,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    /// CSV path (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// One of n_shapelets, lengths, p_norm, percentiles.
    #[arg(long)]
    pub param: String,
    /// Values, comma separated. Lengths use `+` inside a value (`7+9+11`),
    /// percentiles use `-` (`5-10`).
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<String>,
    /// Dataset files, comma separated (each is resampled).
    #[arg(long, value_delimiter = ',')]
    pub data: Vec<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub n_resamples: usize,
    #[arg(long, default_value_t = 0.5)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate configs concurrently (timings become unreliable).
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Results CSV (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Mean-rank summary as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[arg(long, value_enum)]
    pub axis: ScaleAxis,
    #[arg(long, value_delimiter = ',', required = true)]
    pub points: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub n_shapelets: usize,
    /// Series length on the n-series axis.
    #[arg(long, default_value_t = 128)]
    pub length: usize,
    /// Series count on the series-length axis.
    #[arg(long, default_value_t = 100)]
    pub n_series: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn output_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn load_model(path: &Path) -> Result<RdstClassifier> {
    Ok(ModelArchive::load(path)?.into_classifier())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Explain(a) => cmd_explain(&a),
        Command::Synthesize(a) => cmd_synthesize(&a),
        Command::Transform(a) => cmd_transform(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Scale(a) => cmd_scale(&a),
    }
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let config = args.generation.config()?;
    let grid = args.generation.grid()?;
    let train = load_tsv(&args.train)?;
    let outcome = with_threads(args.threads, || {
        RdstClassifier::fit(&train, &config, args.generation.seed, &grid)
    })??;
    outcome.classifier.to_archive().save(&args.output)?;
    eprintln!(
        "fitted {} shapelets on {} series (alpha = {}, leave-one-out accuracy = {:.4}) in {:.2}s",
        outcome.classifier.bank.len(),
        train.len(),
        outcome.classifier.ridge.alpha,
        outcome.report.loo_accuracy,
        outcome.timings.total()
    );
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let clf = load_model(&args.model)?;
    let data = read_tsv(&args.data)?;
    let features = with_threads(args.threads, || transform(&clf.bank, data.series()))??;
    let scores = clf.ridge.decision_function(&features)?;
    let labels = clf.ridge.predict(&features)?;
    let mut out = output_writer(args.output.as_deref())?;
    for l in &labels {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    if let Some(path) = &args.scores {
        let mut w = io::BufWriter::new(fs::File::create(path)?);
        let header: Vec<String> = clf.ridge.class_table.iter().map(|c| format!("class_{c}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in &scores {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ResampleResult {
    pub resample: usize,
    pub accuracy: f64,
    pub fit_s: f64,
    pub transform_s: f64,
    pub predict_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub config: GenerationConfig,
    pub seed: u64,
    pub resamples: Vec<ResampleResult>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
}

/// Resample 0 is the given split when a test set is supplied; every other
/// resample re-splits the pooled data with seed `seed + r`.
pub fn evaluate(
    train: &LabeledDataset,
    test: Option<&LabeledDataset>,
    config: &GenerationConfig,
    seed: u64,
    grid: &AlphaGrid,
    n_resamples: usize,
    train_fraction: Option<f64>,
) -> Result<EvaluationReport> {
    if n_resamples == 0 {
        return Err(Error::Config("n_resamples must be positive".into()));
    }
    let pooled = match test {
        Some(t) => LabeledDataset::new(
            train.series().iter().chain(t.series()).cloned().collect(),
            train.labels().iter().chain(t.labels()).copied().collect(),
        ),
        None => train.clone(),
    };
    let fraction = train_fraction.unwrap_or(match test {
        Some(t) => train.len() as f64 / (train.len() + t.len()) as f64,
        None => 0.5,
    });
    let mut resamples = Vec::with_capacity(n_resamples);
    for r in 0..n_resamples {
        let rseed = seed + r as u64;
        let (tr, te) = match test {
            Some(t) if r == 0 => (train.clone(), t.clone()),
            _ => stratified_resample(&pooled, fraction, rseed)?,
        };
        let fitted = RdstClassifier::fit(&tr, config, rseed, grid)?;
        let t0 = Instant::now();
        let features = transform(&fitted.classifier.bank, te.series())?;
        let t1 = Instant::now();
        let predicted = fitted.classifier.ridge.predict(&features)?;
        let t2 = Instant::now();
        resamples.push(ResampleResult {
            resample: r,
            accuracy: accuracy(&predicted, te.labels()),
            fit_s: fitted.timings.total(),
            transform_s: (t1 - t0).as_secs_f64(),
            predict_s: (t2 - t1).as_secs_f64(),
        });
    }
    let accs: Vec<f64> = resamples.iter().map(|r| r.accuracy).collect();
    Ok(EvaluationReport {
        config: config.clone(),
        seed,
        mean_accuracy: stats::mean(&accs),
        std_accuracy: stats::std_dev(&accs),
        resamples,
    })
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let config = args.generation.config()?;
    let grid = args.generation.grid()?;
    let train = load_tsv(&args.train)?;
    let test = args.test.as_ref().map(read_tsv).transpose()?;
    let report = with_threads(args.threads, || {
        evaluate(
            &train,
            test.as_ref(),
            &config,
            args.generation.seed,
            &grid,
            args.n_resamples,
            args.train_fraction,
        )
    })??;
    let mut out = output_writer(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn cmd_explain(args: &ExplainArgs) -> Result<()> {
    let clf = load_model(&args.model)?;
    if clf.ridge.class_index(args.class_id).is_none() {
        return Err(Error::UnknownClass(args.class_id));
    }
    let data = read_tsv(&args.data)?;
    if let Some((index, s)) = data
        .series()
        .iter()
        .enumerate()
        .find(|(_, s)| s.len() != clf.bank.train_length)
    {
        return Err(Error::LengthMismatch {
            index,
            expected: clf.bank.train_length,
            found: s.len(),
        });
    }
    let bundle = explain(
        &clf.ridge,
        &clf.bank,
        args.class_id,
        data.series(),
        data.labels(),
        args.top_k,
    )?;
    write_bundle(&bundle, &args.output_dir)
}

pub fn cmd_synthesize(args: &SynthesizeArgs) -> Result<()> {
    let ds = make_synthetic(&args.spec())?;
    match &args.test_output {
        None => save_tsv(&ds, &args.output),
        Some(test_path) => {
            let (train, test) = stratified_resample(&ds, args.train_fraction, args.seed)?;
            save_tsv(&train, &args.output)?;
            save_tsv(&test, test_path)
        }
    }
}

pub fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let clf = load_model(&args.model)?;
    let data = read_tsv(&args.data)?;
    let features = with_threads(args.threads, || transform(&clf.bank, data.series()))??;
    write_csv(&features, output_writer(args.output.as_deref())?)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let values: Vec<&str> = args.values.iter().map(String::as_str).collect();
    let configs = bench::one_parameter_grid(&args.param, &values)?;
    if args.data.is_empty() {
        return Err(Error::Config("--data needs at least one dataset".into()));
    }
    let datasets = args
        .data
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            Ok((name, load_tsv(p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let options = SweepOptions {
        train_fraction: args.train_fraction,
        parallel: args.parallel,
        ..Default::default()
    };
    let results = with_threads(args.threads, || {
        bench::sweep(&configs, &datasets, args.n_resamples, args.seed, &options)
    })??;
    bench::write_sweep_csv(&results.records, output_writer(args.output.as_deref())?)?;
    if let Some(path) = &args.summary {
        fs::write(path, serde_json::to_string_pretty(&results.summary)?)?;
    }
    Ok(())
}

pub fn cmd_scale(args: &ScaleArgs) -> Result<()> {
    let template = SyntheticSpec {
        n_per_class: args.n_series.div_ceil(2),
        length: args.length,
        ..Default::default()
    };
    let config = GenerationConfig {
        n_shapelets: args.n_shapelets,
        ..Default::default()
    };
    let curve = with_threads(args.threads, || {
        bench::scalability(&template, args.axis, &args.points, &config, args.seed)
    })??;
    let mut out = output_writer(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &curve)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
