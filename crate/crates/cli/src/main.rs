use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mtsem_core::corpus::{parse_dataset, synth_dataset, Dataset, SynthParams};
use mtsem_core::embeddings::load_embeddings;
use mtsem_core::harness::{
    emit_run_log, emit_summary, parse_methods, prepare_inputs, run_experiment, ExperimentConfig,
    ExperimentFiles, SummaryFormat,
};
use mtsem_core::retrofit::{parse_lexicon, retrofit, BetaMode, RetrofitParams};

/// Predict quantified feature vectors from word embeddings.
#[derive(Parser)]
#[command(name = "mtsem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-split experiment and print min/avg/max per method.
    Run(RunArgs),
    /// Dump the model-theoretic vectors of a dataset as TSV.
    Vectors(DatasetArgs),
    /// Per-feature quantifier counts as CSV.
    Stats(DatasetArgs),
    /// Retrofit an embedding table to a lexicon.
    Retrofit(RetrofitArgs),
    /// Generate a synthetic annotation dataset.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Retrofit the embeddings to this lexicon before use.
    #[arg(long, requires = "embeddings")]
    lexicon: Option<PathBuf>,
    /// Comma-separated: plsr, mode, true-mode, nn, plsr-random, nn-random.
    #[arg(long, default_value = "mode")]
    methods: String,
    #[arg(long, default_value_t = 60)]
    train_size: usize,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// PLSR components (default: min(50, train-1, dim)).
    #[arg(long)]
    components: Option<usize>,
    #[arg(long, default_value_t = 10)]
    retrofit_iters: usize,
    /// Dimension of the random vectors used by the *-random methods.
    #[arg(long, default_value_t = 300)]
    random_dim: usize,
    /// csv or table.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Execute runs sequentially.
    #[arg(long)]
    no_parallel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one CSV line per (run, method) here.
    #[arg(long)]
    per_run_log: Option<PathBuf>,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RetrofitArgs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Constant edge weight (default: 1/degree).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    concepts: usize,
    #[arg(long)]
    features: usize,
    /// Features annotated per concept.
    #[arg(long, conflicts_with = "dense")]
    per_concept: Option<usize>,
    /// Annotate every feature of every concept.
    #[arg(long)]
    dense: bool,
    #[arg(long, default_value_t = 1)]
    annotators: usize,
    #[arg(long, default_value_t = 0.6)]
    dominance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_dataset(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
}

fn vectors_tsv(d: &Dataset) -> String {
    let mut out = String::from("concept");
    for f in d.features() {
        out.push('\t');
        out.push_str(f);
    }
    out.push('\n');
    for (c, g) in d.concepts().iter().zip(d.gold_vectors()) {
        out.push_str(c);
        for (v, m) in g.values.iter().zip(&g.mask) {
            out.push('\t');
            if *m {
                out.push_str(&v.to_string());
            } else {
                out.push_str("NA");
            }
        }
        out.push('\n');
    }
    out
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let format: SummaryFormat = a.format.parse()?;
    let cfg = ExperimentConfig {
        methods: parse_methods(&a.methods)?,
        train_size: a.train_size,
        runs: a.runs,
        n_components: a.components,
        seed: a.seed,
        random_dim: a.random_dim,
        parallel: !a.no_parallel,
    };
    let files = ExperimentFiles {
        dataset: a.dataset,
        embeddings: a.embeddings,
        lexicon: a.lexicon,
        retrofit: RetrofitParams {
            iterations: a.retrofit_iters,
            ..Default::default()
        },
    };
    let inputs = prepare_inputs(&files)?;
    if inputs.duplicate_words > 0 {
        eprintln!("warning: {} duplicate words in embeddings (last kept)", inputs.duplicate_words);
    }
    if inputs.missing_embeddings > 0 {
        eprintln!("warning: {} concepts have no embedding", inputs.missing_embeddings);
    }
    let summary = run_experiment(&cfg, &inputs.dataset, inputs.embeddings.as_ref())?;
    for m in &summary.methods {
        if m.failed_runs > 0 {
            eprintln!("warning: {} failed in {} runs", m.method.name(), m.failed_runs);
        }
    }
    if let Some(p) = &a.per_run_log {
        write_output(Some(p), &emit_run_log(&summary))?;
    }
    write_output(a.out.as_deref(), &emit_summary(&summary, format))
}

fn cmd_retrofit(a: RetrofitArgs) -> Result<()> {
    let f = File::open(&a.embeddings).with_context(|| format!("opening {}", a.embeddings.display()))?;
    let loaded = load_embeddings(BufReader::new(f))?;
    let f = File::open(&a.lexicon).with_context(|| format!("opening {}", a.lexicon.display()))?;
    let lex = parse_lexicon(BufReader::new(f))?;
    let params = RetrofitParams {
        iterations: a.iterations,
        alpha: a.alpha,
        beta: a.beta.map_or(BetaMode::InverseDegree, BetaMode::Constant),
    };
    let table = retrofit(&loaded.table, &lex, &params)?;
    match &a.out {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            table.write_text(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            table.write_text(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let per_concept = match (a.dense, a.per_concept) {
        (true, _) => a.features,
        (false, Some(n)) => n,
        (false, None) => bail!("one of --per-concept or --dense is required"),
    };
    let d = synth_dataset(&SynthParams {
        n_concepts: a.concepts,
        n_features: a.features,
        features_per_concept: per_concept,
        annotators: a.annotators,
        dominance: a.dominance,
        seed: a.seed,
    })?;
    write_output(a.out.as_deref(), &d.to_tsv())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Vectors(a) => read_dataset(&a.dataset).and_then(|d| write_output(a.out.as_deref(), &vectors_tsv(&d))),
        Command::Stats(a) => read_dataset(&a.dataset)
            .and_then(|d| write_output(a.out.as_deref(), &d.quantifier_distribution().to_csv())),
        Command::Retrofit(a) => cmd_retrofit(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
