//! Map distributional word vectors onto quantified-feature ("model-theoretic")
//! vectors and benchmark the mapping against simple baselines.
//!
//! The crate is organised bottom-up:
//!
//! - [`corpus`]: quantifier annotations, the TSV dataset format, gold vectors
//!   with annotation masks, per-feature quantifier statistics, and a seeded
//!   synthetic dataset generator.
//! - [`embeddings`]: word-vector tables in word2vec/GloVe text format, random
//!   tables, and cosine similarity.
//! - [`regression`]: NIPALS partial least squares regression.
//! - [`predictors`]: PLSR, mode, true-mode and nearest-neighbour predictors
//!   behind one [`predictors::Predictor`] trait.
//! - [`retrofit`]: lexicon-graph retrofitting of embedding tables.
//! - [`evaluation`]: masked Spearman scoring.
//! - [`harness`]: seeded train/test splits, multi-run aggregation and result
//!   tables.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod predictors;
pub mod regression;
pub mod retrofit;

pub use error::{Error, Result};
