//! Multi-run experiments: seeded splits, per-method scoring, aggregation.
//!
//! Run `r` of an experiment with master seed `s` draws everything from
//! `run_seed(s, r) = splitmix64(splitmix64(s) ^ r)`, so a run's outcome does
//! not depend on which other runs were executed or in what order. All methods
//! in one run share the same train/test split.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{parse_dataset, Dataset};
use crate::embeddings::{filter_vocab, load_embeddings, random_table, EmbeddingTable};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_run, RunScore};
use crate::predictors::{fit_mode, fit_nn, fit_plsr_predictor, fit_true_mode};
use crate::regression::default_components;
use crate::retrofit::{parse_lexicon, retrofit, RetrofitParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Plsr,
    Mode,
    TrueMode,
    Nn,
    PlsrRandom,
    NnRandom,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Plsr,
        Method::Mode,
        Method::TrueMode,
        Method::Nn,
        Method::PlsrRandom,
        Method::NnRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Plsr => "plsr",
            Method::Mode => "mode",
            Method::TrueMode => "true-mode",
            Method::Nn => "nn",
            Method::PlsrRandom => "plsr-random",
            Method::NnRandom => "nn-random",
        }
    }

    /// Whether the method reads the supplied embedding table.
    pub fn needs_embeddings(self) -> bool {
        matches!(self, Method::Plsr | Method::Nn)
    }

    pub fn uses_random_vectors(self) -> bool {
        matches!(self, Method::PlsrRandom | Method::NnRandom)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

/// Parses a comma-separated method list, e.g. `mode,nn`. Duplicates are dropped.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m: Method = tok.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub train_size: usize,
    pub runs: usize,
    /// PLSR components; `None` uses [`default_components`].
    pub n_components: Option<usize>,
    pub seed: u64,
    /// Dimension of the per-run random tables.
    pub random_dim: usize,
    /// Execute runs on the rayon pool. Output is identical either way.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            methods: vec![Method::Mode],
            train_size: 60,
            runs: 1000,
            n_components: None,
            seed: 0,
            random_dim: 300,
            parallel: true,
        }
    }
}

/// Files an experiment reads.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFiles {
    pub dataset: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub retrofit: RetrofitParams,
}

#[derive(Debug, Clone)]
pub struct PreparedInputs {
    pub dataset: Dataset,
    /// Embeddings restricted to dataset concepts (retrofitted first when a
    /// lexicon was given).
    pub embeddings: Option<EmbeddingTable>,
    /// Concepts with no embedding.
    pub missing_embeddings: usize,
    /// Words repeated in the embedding file.
    pub duplicate_words: usize,
}

/// Loads the dataset and, if given, the embeddings and lexicon.
pub fn prepare_inputs(files: &ExperimentFiles) -> Result<PreparedInputs> {
    let dataset = parse_dataset(BufReader::new(File::open(&files.dataset)?))?;
    let mut missing_embeddings = 0;
    let mut duplicate_words = 0;
    let embeddings = match &files.embeddings {
        None => None,
        Some(path) => {
            let loaded = load_embeddings(BufReader::new(File::open(path)?))?;
            duplicate_words = loaded.duplicates.len();
            let mut table = loaded.table;
            if let Some(lex_path) = &files.lexicon {
                let lex = parse_lexicon(BufReader::new(File::open(lex_path)?))?;
                table = retrofit(&table, &lex, &files.retrofit)?;
            }
            let (filtered, missing) = filter_vocab(&table, dataset.concepts());
            missing_embeddings = missing;
            Some(filtered)
        }
    };
    Ok(PreparedInputs {
        dataset,
        embeddings,
        missing_embeddings,
        duplicate_words,
    })
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_seed(master: u64, run: usize) -> u64 {
    splitmix64(splitmix64(master) ^ run as u64)
}

// Separates the random-table stream from the split stream of the same run.
const RANDOM_TABLE_STREAM: u64 = 0x5241_4E44_5645_4353;

/// Uniform train/test split without replacement. Both halves keep dataset
/// order.
pub fn split<R: Rng + ?Sized>(d: &Dataset, train_size: usize, rng: &mut R) -> Result<(Vec<String>, Vec<String>)> {
    let n = d.n_concepts();
    if train_size == 0 || train_size >= n {
        return Err(Error::InvalidArgument(format!(
            "train size must be in 1..{n}, got {train_size}"
        )));
    }
    let mut in_train = vec![false; n];
    for i in sample(rng, n, train_size) {
        in_train[i] = true;
    }
    let (mut train, mut test) = (Vec::with_capacity(train_size), Vec::with_capacity(n - train_size));
    for (c, &t) in d.concepts().iter().zip(&in_train) {
        if t {
            train.push(c.clone());
        } else {
            test.push(c.clone());
        }
    }
    Ok((train, test))
}

/// One method's outcome on one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub method: Method,
    pub outcome: std::result::Result<RunScore, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub min: f64,
    pub avg: f64,
    pub max: f64,
    /// Runs that produced a score.
    pub n_runs: usize,
    pub failed_runs: usize,
    pub skipped_undefined: usize,
    pub skipped_coverage: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub methods: Vec<MethodSummary>,
    /// Every (run, method) outcome, ordered by run then method.
    pub runs: Vec<RunRecord>,
}

fn score_method(
    method: Method,
    train: &[String],
    test: &[String],
    d: &Dataset,
    embeddings: Option<&EmbeddingTable>,
    random: Option<&EmbeddingTable>,
    n_components: Option<usize>,
) -> Result<RunScore> {
    let table = if method.uses_random_vectors() { random } else { embeddings };
    let components = |t: &EmbeddingTable| n_components.unwrap_or_else(|| default_components(train.len(), t.dim()));
    match method {
        Method::Mode => evaluate_run(&fit_mode(train, d)?, test, d),
        Method::TrueMode => evaluate_run(&fit_true_mode(train, d)?, test, d),
        Method::Nn | Method::NnRandom => {
            let t = table.expect("validated");
            evaluate_run(&fit_nn(train, d, t)?, test, d)
        }
        Method::Plsr | Method::PlsrRandom => {
            let t = table.expect("validated");
            evaluate_run(&fit_plsr_predictor(train, d, t, components(t))?, test, d)
        }
    }
}

fn run_once(
    cfg: &ExperimentConfig,
    d: &Dataset,
    embeddings: Option<&EmbeddingTable>,
    run: usize,
) -> Result<Vec<RunRecord>> {
    let seed = run_seed(cfg.seed, run);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train, test) = split(d, cfg.train_size, &mut rng)?;
    let random = if cfg.methods.iter().any(|m| m.uses_random_vectors()) {
        Some(random_table(
            d.concepts(),
            cfg.random_dim,
            splitmix64(seed ^ RANDOM_TABLE_STREAM),
        )?)
    } else {
        None
    };
    Ok(cfg
        .methods
        .iter()
        .map(|&method| RunRecord {
            run,
            method,
            outcome: score_method(
                method,
                &train,
                &test,
                d,
                embeddings,
                random.as_ref(),
                cfg.n_components,
            )
            .map_err(|e| e.to_string()),
        })
        .collect())
}

fn validate(cfg: &ExperimentConfig, d: &Dataset, embeddings: Option<&EmbeddingTable>) -> Result<()> {
    if cfg.runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    if cfg.methods.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    if cfg.train_size == 0 || cfg.train_size >= d.n_concepts() {
        return Err(Error::InvalidArgument(format!(
            "train size must be in 1..{}, got {}",
            d.n_concepts(),
            cfg.train_size
        )));
    }
    if cfg.n_components == Some(0) {
        return Err(Error::InvalidArgument("components must be at least 1".into()));
    }
    if let Some(m) = cfg.methods.iter().find(|m| m.needs_embeddings()) {
        if embeddings.is_none() {
            return Err(Error::InvalidArgument(format!(
                "method `{}` needs an embedding table",
                m.name()
            )));
        }
    }
    if cfg.random_dim == 0 && cfg.methods.iter().any(|m| m.uses_random_vectors()) {
        return Err(Error::InvalidArgument("random vector dimension must be at least 1".into()));
    }
    Ok(())
}

/// Runs every configured method on `cfg.runs` seeded splits and aggregates
/// min/avg/max of the per-run mean correlations.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    d: &Dataset,
    embeddings: Option<&EmbeddingTable>,
) -> Result<ExperimentSummary> {
    validate(cfg, d, embeddings)?;
    // warm the gold-vector cache before fanning out
    d.gold_vectors();

    let per_run: Vec<Vec<RunRecord>> = if cfg.parallel {
        (0..cfg.runs)
            .into_par_iter()
            .map(|r| run_once(cfg, d, embeddings, r))
            .collect::<Result<_>>()?
    } else {
        (0..cfg.runs)
            .map(|r| run_once(cfg, d, embeddings, r))
            .collect::<Result<_>>()?
    };
    let runs: Vec<RunRecord> = per_run.into_iter().flatten().collect();

    let mut methods = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let mut scores = Vec::new();
        let (mut failed, mut undefined, mut coverage) = (0, 0, 0);
        let mut first_error = None;
        for rec in runs.iter().filter(|r| r.method == method) {
            match &rec.outcome {
                Ok(s) => {
                    scores.push(s.mean_rho);
                    undefined += s.n_skipped_undefined;
                    coverage += s.n_skipped_coverage;
                }
                Err(e) => {
                    failed += 1;
                    first_error.get_or_insert_with(|| e.clone());
                }
            }
        }
        if scores.is_empty() {
            return Err(Error::MethodUnusable {
                method: method.name().to_string(),
                reason: first_error.unwrap_or_default(),
            });
        }
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let avg = crate::evaluation::order_free_mean(&mut scores).clamp(min, max);
        methods.push(MethodSummary {
            method,
            min,
            avg,
            max,
            n_runs: scores.len(),
            failed_runs: failed,
            skipped_undefined: undefined,
            skipped_coverage: coverage,
        });
    }
    Ok(ExperimentSummary { methods, runs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryFormat {
    Csv,
    Table,
}

impl FromStr for SummaryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SummaryFormat::Csv),
            "table" => Ok(SummaryFormat::Table),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

pub const SUMMARY_HEADER: &str = "method,min,avg,max,n_runs,skipped_undefined,skipped_coverage";

/// Renders the summary. CSV prints floats at full (round-trip) precision;
/// the table rounds them to three decimals.
pub fn emit_summary(s: &ExperimentSummary, format: SummaryFormat) -> String {
    let mut out = String::new();
    match format {
        SummaryFormat::Csv => {
            out.push_str(SUMMARY_HEADER);
            out.push('\n');
            for m in &s.methods {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    m.method.name(),
                    m.min,
                    m.avg,
                    m.max,
                    m.n_runs,
                    m.skipped_undefined,
                    m.skipped_coverage
                );
            }
        }
        SummaryFormat::Table => {
            let w = s
                .methods
                .iter()
                .map(|m| m.method.name().len())
                .chain(["method".len()])
                .max()
                .unwrap_or(6);
            let _ = writeln!(
                out,
                "{:<w$}  {:>7}  {:>7}  {:>7}  {:>6}  {:>9}  {:>8}",
                "method", "min", "avg", "max", "runs", "undefined", "coverage"
            );
            for m in &s.methods {
                let _ = writeln!(
                    out,
                    "{:<w$}  {:>7.3}  {:>7.3}  {:>7.3}  {:>6}  {:>9}  {:>8}",
                    m.method.name(),
                    m.min,
                    m.avg,
                    m.max,
                    m.n_runs,
                    m.skipped_undefined,
                    m.skipped_coverage
                );
            }
        }
    }
    out
}

pub const RUN_LOG_HEADER: &str = "run,method,mean_rho,n_scored,skipped_undefined,skipped_coverage,error";

/// One CSV line per (run, method).
pub fn emit_run_log(s: &ExperimentSummary) -> String {
    let mut out = String::from(RUN_LOG_HEADER);
    out.push('\n');
    for r in &s.runs {
        match &r.outcome {
            Ok(score) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},",
                    r.run,
                    r.method.name(),
                    score.mean_rho,
                    score.n_scored,
                    score.n_skipped_undefined,
                    score.n_skipped_coverage
                );
            }
            Err(e) => {
                let msg = e.replace([',', '\n', '\r'], " ");
                let _ = writeln!(out, "{},{},,,,,{}", r.run, r.method.name(), msg);
            }
        }
    }
    out
}
