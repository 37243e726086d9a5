//! Masked Spearman scoring.
//!
//! A prediction is compared with a gold vector only on the coordinates the
//! gold vector marks as annotated. Correlations that are undefined (fewer
//! than two coordinates, or a constant side) are reported, not scored.

use crate::corpus::{Dataset, ModelTheoreticVector};
use crate::error::{Error, Result};
use crate::predictors::Predictor;

/// Fractional (average) ranks, 1-based.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share the mean of ranks i+1..=j
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
///
/// Returns `Ok(None)` when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "spearman of vectors with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "spearman needs at least 2 points, got {}",
            a.len()
        )));
    }
    let is_constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    if is_constant(a) || is_constant(b) {
        return Ok(None);
    }
    Ok(pearson(&average_ranks(a), &average_ranks(b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptScore {
    pub concept: String,
    /// `None` when the correlation is undefined.
    pub rho: Option<f64>,
    pub n_annotated: usize,
}

/// Spearman between `pred` and `gold` restricted to annotated coordinates.
/// Annotated zeros (`no`) are included.
pub fn masked_spearman(concept: &str, pred: &[f64], gold: &ModelTheoreticVector) -> Result<ConceptScore> {
    if pred.len() != gold.len() {
        return Err(Error::InvalidArgument(format!(
            "prediction has {} entries, gold vector has {}",
            pred.len(),
            gold.len()
        )));
    }
    let (p, g): (Vec<f64>, Vec<f64>) = gold
        .annotated_indices()
        .map(|i| (pred[i], gold.values[i]))
        .unzip();
    let rho = if p.len() < 2 { None } else { spearman(&p, &g)? };
    Ok(ConceptScore {
        concept: concept.to_string(),
        rho,
        n_annotated: p.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunScore {
    /// Mean over concepts with a defined correlation.
    pub mean_rho: f64,
    pub n_scored: usize,
    pub n_skipped_undefined: usize,
    pub n_skipped_coverage: usize,
}

/// Mean that does not depend on input order.
pub(crate) fn order_free_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Per-concept scores for `test`. Concepts the predictor cannot cover are
/// returned as `Err` entries alongside the successes.
pub fn score_concepts<P, S>(p: &P, test: &[S], d: &Dataset) -> Result<Vec<std::result::Result<ConceptScore, String>>>
where
    P: Predictor + ?Sized,
    S: AsRef<str>,
{
    let mut out = Vec::with_capacity(test.len());
    for c in test {
        let c = c.as_ref();
        let idx = d
            .concept_index(c)
            .ok_or_else(|| Error::UnknownConcept(c.to_string()))?;
        match p.predict(c) {
            Ok(pred) => out.push(Ok(masked_spearman(c, &pred, d.gold_vector(idx))?)),
            Err(Error::MissingEmbedding(w)) => out.push(Err(w)),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Scores a fitted predictor on `test` and averages the defined correlations.
pub fn evaluate_run<P, S>(p: &P, test: &[S], d: &Dataset) -> Result<RunScore>
where
    P: Predictor + ?Sized,
    S: AsRef<str>,
{
    if test.is_empty() {
        return Err(Error::InvalidArgument("empty test set".into()));
    }
    let mut rhos = Vec::new();
    let (mut undefined, mut coverage) = (0, 0);
    for s in score_concepts(p, test, d)? {
        match s {
            Ok(ConceptScore { rho: Some(r), .. }) => rhos.push(r),
            Ok(_) => undefined += 1,
            Err(_) => coverage += 1,
        }
    }
    if rhos.is_empty() {
        return Err(Error::NoDefinedScores { undefined, coverage });
    }
    Ok(RunScore {
        mean_rho: order_free_mean(&mut rhos),
        n_scored: rhos.len(),
        n_skipped_undefined: undefined,
        n_skipped_coverage: coverage,
    })
}
