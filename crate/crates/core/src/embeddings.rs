//! Word-vector tables.
//!
//! Text format, one word per line: `word f1 f2 ... fD`. A first line made of
//! exactly two integers (`N D`, as written by word2vec) is treated as a header.

use std::io::{BufRead, Write};

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Word → vector map with a fixed dimension. Iteration follows insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: IndexMap<String, Vec<f64>>,
}

/// Result of [`load_embeddings`].
#[derive(Debug, Clone)]
pub struct LoadedTable {
    pub table: EmbeddingTable,
    /// Words that appeared more than once; the last occurrence was kept.
    pub duplicates: Vec<String>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: IndexMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    /// Inserts or replaces a vector. Returns the previous vector, if any.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> Result<Option<Vec<f64>>> {
        if vector.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "vector has {} components, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        Ok(self.vectors.insert(word.into(), vector))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub(crate) fn get_mut(&mut self, word: &str) -> Option<&mut Vec<f64>> {
        self.vectors.get_mut(word)
    }

    /// Returns a copy with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> EmbeddingTable {
        EmbeddingTable {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|(w, v)| (w.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }

    /// Writes the table without a header. Floats use the shortest
    /// representation that round-trips exactly.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (word, v) in &self.vectors {
            w.write_all(word.as_bytes())?;
            for x in v {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("words are UTF-8")
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut toks = line.split_whitespace();
    let n = toks.next()?.parse().ok()?;
    let d = toks.next()?.parse().ok()?;
    if toks.next().is_some() {
        return None;
    }
    Some((n, d))
}

/// Reads a word2vec/GloVe style text table.
///
/// The dimension comes from the header when present, otherwise from the
/// first data line. Blank lines are skipped.
pub fn load_embeddings<R: BufRead>(reader: R) -> Result<LoadedTable> {
    let mut dim: Option<usize> = None;
    let mut vectors: IndexMap<String, Vec<f64>> = IndexMap::new();
    let mut duplicates = Vec::new();
    let mut first = true;

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if std::mem::take(&mut first) {
            if let Some((_, d)) = parse_header(&line) {
                if d == 0 {
                    return Err(Error::DimensionMismatch {
                        line: lineno,
                        expected: 1,
                        found: 0,
                    });
                }
                dim = Some(d);
                continue;
            }
        }
        let mut toks = line.split_whitespace();
        let word = toks.next().expect("line is not blank");
        let values = toks
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::InvalidNumber {
                    line: lineno,
                    token: t.to_string(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let expected = *dim.get_or_insert(values.len());
        if values.len() != expected || values.is_empty() {
            return Err(Error::DimensionMismatch {
                line: lineno,
                expected: expected.max(1),
                found: values.len(),
            });
        }
        if vectors.insert(word.to_string(), values).is_some() {
            duplicates.push(word.to_string());
        }
    }

    Ok(LoadedTable {
        table: EmbeddingTable {
            dim: dim.unwrap_or(0),
            vectors,
        },
        duplicates,
    })
}

/// Table of i.i.d. Uniform[0, 1) vectors, one per distinct word.
pub fn random_table<S: AsRef<str>>(words: &[S], dim: usize, seed: u64) -> Result<EmbeddingTable> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new(dim);
    for w in words {
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        table.vectors.entry(w.as_ref().to_string()).or_insert(v);
    }
    Ok(table)
}

/// Cosine similarity `u·v / (‖u‖‖v‖)`, clamped to [-1, 1].
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::InvalidArgument(format!(
            "cosine of vectors with lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::UndefinedSimilarity);
    }
    Ok((dot / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}

/// Restricts `table` to `words` (in the order given). Returns the filtered
/// table and the number of distinct requested words it lacked.
pub fn filter_vocab<S: AsRef<str>>(table: &EmbeddingTable, words: &[S]) -> (EmbeddingTable, usize) {
    let mut out = EmbeddingTable::new(table.dim);
    let mut seen = std::collections::HashSet::new();
    let mut missing = 0;
    for w in words {
        let w = w.as_ref();
        if !seen.insert(w) {
            continue;
        }
        match table.vectors.get(w) {
            Some(v) => {
                out.vectors.insert(w.to_string(), v.clone());
            }
            None => missing += 1,
        }
    }
    (out, missing)
}
