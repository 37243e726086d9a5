//! Predictors from a concept to a feature-space vector.
//!
//! All predictors are fitted on a list of training concepts and then queried
//! by concept name. Outputs are plain value vectors with one entry per dataset
//! feature; the evaluation step applies the gold annotation mask.

use ndarray::Array2;

use crate::corpus::{Dataset, QuantifierCounts};
use crate::embeddings::{cosine, EmbeddingTable};
use crate::error::{Error, Result};
use crate::regression::{plsr_fit, PlsrModel};

/// Mean values closer than this are counted as the same value by [`fit_mode`].
pub const MODE_TOLERANCE: f64 = 1e-9;

pub trait Predictor: Send + Sync {
    /// Output length.
    fn n_features(&self) -> usize;

    /// Predicted feature vector for `concept`. Embedding-based predictors fail
    /// with [`Error::MissingEmbedding`] when the concept has no vector.
    fn predict(&self, concept: &str) -> Result<Vec<f64>>;
}

fn training_indices<S: AsRef<str>>(train: &[S], d: &Dataset) -> Result<Vec<usize>> {
    if train.is_empty() {
        return Err(Error::InsufficientData("empty training set".into()));
    }
    train
        .iter()
        .map(|c| {
            d.concept_index(c.as_ref())
                .ok_or_else(|| Error::UnknownConcept(c.as_ref().to_string()))
        })
        .collect()
}

/// Concept-independent predictor: one constant per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePredictor {
    values: Vec<f64>,
    coverage: Vec<bool>,
}

impl ModePredictor {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Whether any training concept annotated each feature.
    pub fn coverage(&self) -> &[bool] {
        &self.coverage
    }
}

impl Predictor for ModePredictor {
    fn n_features(&self) -> usize {
        self.values.len()
    }

    fn predict(&self, _concept: &str) -> Result<Vec<f64>> {
        Ok(self.values.clone())
    }
}

/// Most frequent value among `means`, grouping values within
/// [`MODE_TOLERANCE`]; ties go to the larger value.
fn mode_of(means: &mut [f64]) -> f64 {
    means.sort_by(f64::total_cmp);
    let mut best = (0usize, 0.0f64);
    let mut i = 0;
    while i < means.len() {
        let start = means[i];
        let mut j = i;
        while j < means.len() && means[j] - start <= MODE_TOLERANCE {
            j += 1;
        }
        let count = j - i;
        // ascending scan: `>=` prefers the later (larger) group on ties
        if count >= best.0 {
            best = (count, means[j - 1]);
        }
        i = j;
    }
    best.1
}

/// Per feature, the most common per-concept mean value among training
/// concepts annotated with it. Unannotated features predict 0.
pub fn fit_mode<S: AsRef<str>>(train: &[S], d: &Dataset) -> Result<ModePredictor> {
    let idx = training_indices(train, d)?;
    let mut means: Vec<Vec<f64>> = vec![Vec::new(); d.n_features()];
    for &c in &idx {
        for (f, r) in d.concept_records(c) {
            means[f].push(r.mean());
        }
    }
    let coverage = means.iter().map(|m| !m.is_empty()).collect();
    let values = means
        .iter_mut()
        .map(|m| if m.is_empty() { 0.0 } else { mode_of(m) })
        .collect();
    Ok(ModePredictor { values, coverage })
}

/// Per feature, the scalar of the most frequent individual annotation pooled
/// over training concepts. Ties go to the larger scalar.
pub fn fit_true_mode<S: AsRef<str>>(train: &[S], d: &Dataset) -> Result<ModePredictor> {
    let idx = training_indices(train, d)?;
    let mut pooled = vec![QuantifierCounts::default(); d.n_features()];
    for &c in &idx {
        for (f, r) in d.concept_records(c) {
            pooled[f].add(&QuantifierCounts::from_annotations(&r.annotations));
        }
    }
    let coverage = pooled.iter().map(|c| c.total() > 0).collect();
    let values = pooled
        .iter()
        .map(|c| c.mode().map_or(0.0, |q| q.scalar()))
        .collect();
    Ok(ModePredictor { values, coverage })
}

/// Returns the gold vector of the most cosine-similar training concept.
#[derive(Debug, Clone)]
pub struct NearestNeighborPredictor<'a> {
    table: &'a EmbeddingTable,
    candidates: Vec<Candidate<'a>>,
    n_features: usize,
    skipped: usize,
}

#[derive(Debug, Clone)]
struct Candidate<'a> {
    concept: String,
    embedding: &'a [f64],
    gold: Vec<f64>,
}

impl NearestNeighborPredictor<'_> {
    /// Training concepts that had no embedding and were left out.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn n_candidates(&self) -> usize {
        self.candidates.len()
    }

    /// Name of the training concept selected for `concept`.
    pub fn neighbor(&self, concept: &str) -> Result<&str> {
        self.nearest(concept).map(|c| c.concept.as_str())
    }

    fn nearest(&self, concept: &str) -> Result<&Candidate<'_>> {
        let query = self
            .table
            .get(concept)
            .ok_or_else(|| Error::MissingEmbedding(concept.to_string()))?;
        let mut best: Option<(f64, &Candidate<'_>)> = None;
        for cand in &self.candidates {
            let sim = cosine(query, cand.embedding)?;
            if best.is_none_or(|(b, _)| sim > b) {
                best = Some((sim, cand));
            }
        }
        Ok(best.expect("fit guarantees a candidate").1)
    }
}

impl Predictor for NearestNeighborPredictor<'_> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict(&self, concept: &str) -> Result<Vec<f64>> {
        self.nearest(concept).map(|c| c.gold.clone())
    }
}

/// Nearest-neighbour baseline. Training concepts without an embedding (or
/// with a zero vector) are skipped; ties go to the earlier training concept.
pub fn fit_nn<'a, S: AsRef<str>>(
    train: &[S],
    d: &Dataset,
    e: &'a EmbeddingTable,
) -> Result<NearestNeighborPredictor<'a>> {
    let idx = training_indices(train, d)?;
    let mut candidates = Vec::new();
    let mut skipped = 0;
    for (&c, name) in idx.iter().zip(train) {
        match e.get(name.as_ref()) {
            Some(v) if v.iter().any(|&x| x != 0.0) => candidates.push(Candidate {
                concept: name.as_ref().to_string(),
                embedding: v,
                gold: d.gold_vector(c).values.clone(),
            }),
            _ => skipped += 1,
        }
    }
    if candidates.is_empty() {
        return Err(Error::InsufficientData(
            "no training concept has an embedding".into(),
        ));
    }
    Ok(NearestNeighborPredictor {
        table: e,
        candidates,
        n_features: d.n_features(),
        skipped,
    })
}

/// PLSR from embedding space to feature space.
#[derive(Debug, Clone)]
pub struct PlsrPredictor<'a> {
    table: &'a EmbeddingTable,
    model: PlsrModel,
    skipped: usize,
}

impl PlsrPredictor<'_> {
    pub fn model(&self) -> &PlsrModel {
        &self.model
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

impl Predictor for PlsrPredictor<'_> {
    fn n_features(&self) -> usize {
        self.model.output_dim()
    }

    fn predict(&self, concept: &str) -> Result<Vec<f64>> {
        let x = self
            .table
            .get(concept)
            .ok_or_else(|| Error::MissingEmbedding(concept.to_string()))?;
        self.model.predict(x)
    }
}

/// Fits PLSR on the embeddings (X) and gold vectors (Y) of the training
/// concepts that have embeddings. `n_components` is clamped to what the
/// usable rows allow.
pub fn fit_plsr_predictor<'a, S: AsRef<str>>(
    train: &[S],
    d: &Dataset,
    e: &'a EmbeddingTable,
    n_components: usize,
) -> Result<PlsrPredictor<'a>> {
    let idx = training_indices(train, d)?;
    let rows: Vec<(usize, &[f64])> = idx
        .iter()
        .zip(train)
        .filter_map(|(&c, name)| e.get(name.as_ref()).map(|v| (c, v)))
        .collect();
    let skipped = idx.len() - rows.len();
    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} training concept(s) with embeddings, need at least 2",
            rows.len()
        )));
    }
    let (n, dim, q) = (rows.len(), e.dim(), d.n_features());
    let mut x = Array2::zeros((n, dim));
    let mut y = Array2::zeros((n, q));
    for (i, (c, v)) in rows.iter().enumerate() {
        x.row_mut(i).assign(&ndarray::ArrayView1::from(*v));
        y.row_mut(i)
            .assign(&ndarray::ArrayView1::from(&d.gold_vector(*c).values[..]));
    }
    let k = n_components.clamp(1, (n - 1).min(dim));
    let model = plsr_fit(x.view(), y.view(), k)?;
    Ok(PlsrPredictor {
        table: e,
        model,
        skipped,
    })
}
