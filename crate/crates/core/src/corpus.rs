//! Quantifier annotations and model-theoretic vectors.
//!
//! A dataset is a sparse concepts × features table where every annotated pair
//! carries one or more quantifier judgements. The on-disk form is TSV:
//!
//! ```text
//! # comment
//! yam	is_orange	some	most	most
//! cat	has_a_coat	most
//! ```
//!
//! The number of annotation columns may vary from line to line. Concepts and
//! features are indexed in order of first appearance, so the i-th coordinate
//! of every vector built from one dataset denotes the same feature.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One of the five annotation levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    No,
    Few,
    Some,
    Most,
    All,
}

impl Quantifier {
    /// All quantifiers in ascending scalar order.
    pub const ALL: [Quantifier; 5] = [
        Quantifier::No,
        Quantifier::Few,
        Quantifier::Some,
        Quantifier::Most,
        Quantifier::All,
    ];

    pub fn scalar(self) -> f64 {
        match self {
            Quantifier::No => 0.0,
            Quantifier::Few => 0.05,
            Quantifier::Some => 0.35,
            Quantifier::Most => 0.95,
            Quantifier::All => 1.0,
        }
    }

    /// Scalar value in hundredths (`scalar() == hundredths() / 100`).
    pub fn hundredths(self) -> u64 {
        match self {
            Quantifier::No => 0,
            Quantifier::Few => 5,
            Quantifier::Some => 35,
            Quantifier::Most => 95,
            Quantifier::All => 100,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quantifier::No => "no",
            Quantifier::Few => "few",
            Quantifier::Some => "some",
            Quantifier::Most => "most",
            Quantifier::All => "all",
        }
    }

    /// Position in [`Quantifier::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Scalar value of a quantifier: no→0, few→0.05, some→0.35, most→0.95, all→1.
pub fn quantifier_scalar(q: Quantifier) -> f64 {
    q.scalar()
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantifier {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "no" => Ok(Quantifier::No),
            "few" => Ok(Quantifier::Few),
            "some" => Ok(Quantifier::Some),
            "most" => Ok(Quantifier::Most),
            "all" => Ok(Quantifier::All),
            _ => Err(()),
        }
    }
}

/// Per-quantifier tallies, indexed like [`Quantifier::ALL`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuantifierCounts(pub [usize; 5]);

impl QuantifierCounts {
    pub fn from_annotations(annotations: &[Quantifier]) -> Self {
        let mut counts = Self::default();
        for &q in annotations {
            counts.0[q.index()] += 1;
        }
        counts
    }

    pub fn get(&self, q: Quantifier) -> usize {
        self.0[q.index()]
    }

    pub fn add(&mut self, other: &QuantifierCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Mean of the mapped scalars.
    ///
    /// Summed exactly in integer hundredths and divided once, so any two
    /// annotation lists with the same exact mean yield the same `f64`.
    pub fn mean_scalar(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let hundredths: u64 = Quantifier::ALL
            .iter()
            .map(|&q| self.get(q) as u64 * q.hundredths())
            .sum();
        hundredths as f64 / (100 * total as u64) as f64
    }

    /// Most frequent quantifier; ties go to the larger scalar. `None` when empty.
    pub fn mode(&self) -> Option<Quantifier> {
        let mut best: Option<(usize, Quantifier)> = None;
        for &q in Quantifier::ALL.iter() {
            let c = self.get(q);
            if c == 0 {
                continue;
            }
            // ALL is ascending, so `>=` moves ties toward the larger scalar.
            if best.is_none_or(|(bc, _)| c >= bc) {
                best = Some((c, q));
            }
        }
        best.map(|(_, q)| q)
    }
}

/// Mean scalar value of an annotation list. Order-independent.
pub fn annotation_mean(annotations: &[Quantifier]) -> f64 {
    QuantifierCounts::from_annotations(annotations).mean_scalar()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub concept: String,
    pub feature: String,
    pub annotations: Vec<Quantifier>,
}

impl AnnotationRecord {
    pub fn mean(&self) -> f64 {
        annotation_mean(&self.annotations)
    }
}

/// Gold vector for one concept: averaged scalars plus an annotation mask.
///
/// `mask[i] == false` means the feature was never annotated for the concept;
/// its value is 0 ("presumed no"). An explicit `no` annotation also yields 0
/// but keeps `mask[i] == true`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTheoreticVector {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ModelTheoreticVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_annotated(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Indices of annotated coordinates, ascending.
    pub fn annotated_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }
}

/// Immutable annotation store.
#[derive(Debug, Default)]
pub struct Dataset {
    concepts: Vec<String>,
    features: Vec<String>,
    concept_ids: HashMap<String, usize>,
    feature_ids: HashMap<String, usize>,
    records: Vec<AnnotationRecord>,
    record_ids: Vec<(usize, usize)>,
    pairs: HashMap<(usize, usize), usize>,
    by_concept: Vec<Vec<usize>>,
    gold: OnceLock<Vec<ModelTheoreticVector>>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.concepts == other.concepts
            && self.features == other.features
            && self.records == other.records
    }
}

impl Clone for Dataset {
    fn clone(&self) -> Self {
        let mut builder = DatasetBuilder::default();
        for r in &self.records {
            builder.insert(r.clone());
        }
        builder.finish()
    }
}

/// Incremental construction of a [`Dataset`].
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    inner: Dataset,
}

impl DatasetBuilder {
    /// Adds a record. Returns `false` (and leaves the builder unchanged) if
    /// the (concept, feature) pair is already present.
    pub fn insert(&mut self, record: AnnotationRecord) -> bool {
        let d = &mut self.inner;
        let known_c = d.concept_ids.get(&record.concept).copied();
        let known_f = d.feature_ids.get(&record.feature).copied();
        if let (Some(c), Some(f)) = (known_c, known_f) {
            if d.pairs.contains_key(&(c, f)) {
                return false;
            }
        }
        let c = known_c.unwrap_or_else(|| {
            let id = d.concepts.len();
            d.concepts.push(record.concept.clone());
            d.concept_ids.insert(record.concept.clone(), id);
            d.by_concept.push(Vec::new());
            id
        });
        let f = known_f.unwrap_or_else(|| {
            let id = d.features.len();
            d.features.push(record.feature.clone());
            d.feature_ids.insert(record.feature.clone(), id);
            id
        });
        let idx = d.records.len();
        d.records.push(record);
        d.record_ids.push((c, f));
        d.pairs.insert((c, f), idx);
        d.by_concept[c].push(idx);
        true
    }

    pub fn finish(self) -> Dataset {
        self.inner
    }
}

impl Dataset {
    /// Builds a dataset from records, rejecting duplicate pairs and empty
    /// annotation lists. Error line numbers are 1-based record positions.
    pub fn from_records<I>(records: I) -> Result<Dataset>
    where
        I: IntoIterator<Item = AnnotationRecord>,
    {
        let mut builder = DatasetBuilder::default();
        for (i, r) in records.into_iter().enumerate() {
            if r.annotations.is_empty() {
                return Err(Error::TooFewFields {
                    line: i + 1,
                    expected: 3,
                    found: 2,
                });
            }
            let (concept, feature) = (r.concept.clone(), r.feature.clone());
            if !builder.insert(r) {
                return Err(Error::DuplicatePair {
                    line: i + 1,
                    concept,
                    feature,
                });
            }
        }
        Ok(builder.finish())
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    /// All records, in input order.
    pub fn records(&self) -> &[AnnotationRecord] {
        &self.records
    }

    pub fn concept_index(&self, concept: &str) -> Option<usize> {
        self.concept_ids.get(concept).copied()
    }

    pub fn feature_index(&self, feature: &str) -> Option<usize> {
        self.feature_ids.get(feature).copied()
    }

    pub fn record(&self, concept: &str, feature: &str) -> Option<&AnnotationRecord> {
        let c = self.concept_index(concept)?;
        let f = self.feature_index(feature)?;
        self.pairs.get(&(c, f)).map(|&i| &self.records[i])
    }

    /// Records of one concept as `(feature index, record)` pairs.
    pub fn concept_records(
        &self,
        concept: usize,
    ) -> impl Iterator<Item = (usize, &AnnotationRecord)> + '_ {
        self.by_concept[concept]
            .iter()
            .map(move |&i| (self.record_ids[i].1, &self.records[i]))
    }

    /// Gold vector for `concept`.
    pub fn build_feature_vector(&self, concept: &str) -> Result<ModelTheoreticVector> {
        let c = self
            .concept_index(concept)
            .ok_or_else(|| Error::UnknownConcept(concept.to_string()))?;
        Ok(self.gold_vectors()[c].clone())
    }

    /// Gold vectors for every concept, indexed like [`Dataset::concepts`].
    /// Computed once and cached.
    pub fn gold_vectors(&self) -> &[ModelTheoreticVector] {
        self.gold.get_or_init(|| {
            (0..self.concepts.len())
                .map(|c| {
                    let mut values = vec![0.0; self.features.len()];
                    let mut mask = vec![false; self.features.len()];
                    for (f, r) in self.concept_records(c) {
                        values[f] = r.mean();
                        mask[f] = true;
                    }
                    ModelTheoreticVector { values, mask }
                })
                .collect()
        })
    }

    /// Gold vector by concept index.
    pub fn gold_vector(&self, concept: usize) -> &ModelTheoreticVector {
        &self.gold_vectors()[concept]
    }

    /// Per-feature quantifier tallies over every individual annotation.
    pub fn quantifier_distribution(&self) -> QuantifierDistribution {
        let mut counts = vec![QuantifierCounts::default(); self.features.len()];
        for (r, &(_, f)) in self.records.iter().zip(&self.record_ids) {
            counts[f].add(&QuantifierCounts::from_annotations(&r.annotations));
        }
        QuantifierDistribution {
            rows: self.features.iter().cloned().zip(counts).collect(),
        }
    }

    pub fn n_annotations(&self) -> usize {
        self.records.iter().map(|r| r.annotations.len()).sum()
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.records {
            write!(w, "{}\t{}", r.concept, r.feature)?;
            for q in &r.annotations {
                write!(w, "\t{q}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("dataset tokens are UTF-8")
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_dataset(s.as_bytes())
    }
}

/// Parses the annotation TSV format.
pub fn parse_dataset<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut builder = DatasetBuilder::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(Error::TooFewFields {
                line: lineno,
                expected: 3,
                found: fields.len(),
            });
        }
        let annotations = fields[2..]
            .iter()
            .map(|tok| {
                tok.parse::<Quantifier>()
                    .map_err(|_| Error::UnknownQuantifier {
                        line: lineno,
                        token: tok.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let record = AnnotationRecord {
            concept: fields[0].to_string(),
            feature: fields[1].to_string(),
            annotations,
        };
        let (concept, feature) = (record.concept.clone(), record.feature.clone());
        if !builder.insert(record) {
            return Err(Error::DuplicatePair {
                line: lineno,
                concept,
                feature,
            });
        }
    }
    Ok(builder.finish())
}

/// Per-feature quantifier counts, in dataset feature order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuantifierDistribution {
    pub rows: Vec<(String, QuantifierCounts)>,
}

impl QuantifierDistribution {
    pub fn get(&self, feature: &str) -> Option<&QuantifierCounts> {
        self.rows.iter().find(|(f, _)| f == feature).map(|(_, c)| c)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(|(_, c)| c.total()).sum()
    }

    /// CSV with header `feature,no,few,some,most,all`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,no,few,some,most,all\n");
        for (f, c) in &self.rows {
            out.push_str(f);
            for n in c.0 {
                out.push(',');
                out.push_str(&n.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Shape parameters for [`synth_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub n_concepts: usize,
    pub n_features: usize,
    pub features_per_concept: usize,
    pub annotators: usize,
    /// Probability that an annotation equals its feature's dominant quantifier.
    pub dominance: f64,
    pub seed: u64,
}

impl SynthParams {
    /// Dense, single-annotator shape (73 × 54).
    pub fn animal_shaped(dominance: f64, seed: u64) -> Self {
        SynthParams {
            n_concepts: 73,
            n_features: 54,
            features_per_concept: 54,
            annotators: 1,
            dominance,
            seed,
        }
    }

    /// Sparse, three-annotator shape (541 concepts, 2201 features, 11 per concept).
    pub fn norms_shaped(dominance: f64, seed: u64) -> Self {
        SynthParams {
            n_concepts: 541,
            n_features: 2201,
            features_per_concept: 11,
            annotators: 3,
            dominance,
            seed,
        }
    }
}

/// Generates a random dataset.
///
/// Every feature gets a dominant quantifier drawn uniformly. Each concept is
/// annotated on `features_per_concept` distinct features (uniform, emitted in
/// feature order); each annotator picks the dominant quantifier with
/// probability `dominance` and one of the other four uniformly otherwise.
pub fn synth_dataset(p: &SynthParams) -> Result<Dataset> {
    if p.features_per_concept == 0 || p.features_per_concept > p.n_features {
        return Err(Error::InvalidArgument(format!(
            "features_per_concept must be in 1..={}, got {}",
            p.n_features, p.features_per_concept
        )));
    }
    if p.annotators == 0 {
        return Err(Error::InvalidArgument("annotators must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p.dominance) {
        return Err(Error::InvalidArgument(format!(
            "dominance must be in [0, 1], got {}",
            p.dominance
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let dominant: Vec<usize> = (0..p.n_features).map(|_| rng.random_range(0..5)).collect();
    let cw = digits(p.n_concepts);
    let fw = digits(p.n_features);

    let mut builder = DatasetBuilder::default();
    for c in 0..p.n_concepts {
        let mut feats = if p.features_per_concept == p.n_features {
            (0..p.n_features).collect::<Vec<_>>()
        } else {
            sample(&mut rng, p.n_features, p.features_per_concept).into_vec()
        };
        feats.sort_unstable();
        for f in feats {
            let annotations = (0..p.annotators)
                .map(|_| {
                    let q = if rng.random::<f64>() < p.dominance {
                        dominant[f]
                    } else {
                        let k = rng.random_range(0..4);
                        if k >= dominant[f] {
                            k + 1
                        } else {
                            k
                        }
                    };
                    Quantifier::ALL[q]
                })
                .collect();
            builder.insert(AnnotationRecord {
                concept: format!("concept_{c:0cw$}"),
                feature: format!("feature_{f:0fw$}"),
                annotations,
            });
        }
    }
    Ok(builder.finish())
}

fn digits(n: usize) -> usize {
    n.saturating_sub(1).max(1).to_string().len()
}
