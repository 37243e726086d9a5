//! Retrofitting word vectors to a lexicon graph.
//!
//! Each sweep visits the words that appear in both the table and the lexicon,
//! in sorted order, and replaces each vector in place with
//!
//! ```text
//! q_i = (Σ_j β_ij q_j + α q̂_i) / (Σ_j β_ij + α)
//! ```
//!
//! where `j` ranges over lexicon neighbours that have vectors and `q̂_i` is the
//! original vector. Updates made earlier in a sweep are visible to later words.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};

/// Symmetric word graph without self-loops.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    adjacency: BTreeMap<String, BTreeSet<String>>,
}

impl Lexicon {
    pub fn neighbors(&self, word: &str) -> Option<&BTreeSet<String>> {
        self.adjacency.get(word)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Adds an undirected edge. Self-loops are ignored.
    pub fn link(&mut self, a: &str, b: &str) {
        if a == b {
            self.adjacency.entry(a.to_string()).or_default();
            return;
        }
        self.adjacency
            .entry(a.to_string())
            .or_default()
            .insert(b.to_string());
        self.adjacency
            .entry(b.to_string())
            .or_default()
            .insert(a.to_string());
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.adjacency.keys().map(String::as_str)
    }
}

/// Reads `word neighbour1 neighbour2 ...` lines. Edges are symmetrised.
pub fn parse_lexicon<R: BufRead>(reader: R) -> Result<Lexicon> {
    let mut lex = Lexicon::default();
    for line in reader.lines() {
        let line = line?;
        let mut toks = line.split_whitespace();
        let Some(word) = toks.next() else { continue };
        lex.adjacency.entry(word.to_string()).or_default();
        for n in toks {
            lex.link(word, n);
        }
    }
    Ok(lex)
}

/// Edge weight β_ij.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaMode {
    /// `1 / deg(i)`, with the degree counted over neighbours that have vectors.
    InverseDegree,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrofitParams {
    pub iterations: usize,
    pub alpha: f64,
    pub beta: BetaMode,
}

impl Default for RetrofitParams {
    fn default() -> Self {
        RetrofitParams {
            iterations: 10,
            alpha: 1.0,
            beta: BetaMode::InverseDegree,
        }
    }
}

/// In-place retrofitting state, for callers that want to drive sweeps
/// themselves (e.g. until convergence).
#[derive(Debug, Clone)]
pub struct Retrofitter {
    original: EmbeddingTable,
    current: EmbeddingTable,
    // (word, embedded neighbours), sorted by word
    schedule: Vec<(String, Vec<String>)>,
    alpha: f64,
    beta: BetaMode,
}

impl Retrofitter {
    pub fn new(table: &EmbeddingTable, lex: &Lexicon, alpha: f64, beta: BetaMode) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        if let BetaMode::Constant(c) = beta {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "beta must be non-negative, got {c}"
                )));
            }
        }
        let schedule = lex
            .adjacency
            .iter()
            .filter(|(w, _)| table.contains(w))
            .filter_map(|(w, ns)| {
                let ns: Vec<String> = ns.iter().filter(|n| table.contains(n)).cloned().collect();
                (!ns.is_empty()).then(|| (w.clone(), ns))
            })
            .collect();
        Ok(Retrofitter {
            original: table.clone(),
            current: table.clone(),
            schedule,
            alpha,
            beta,
        })
    }

    /// Runs one sweep and returns the largest absolute coordinate change.
    pub fn sweep(&mut self) -> f64 {
        let dim = self.current.dim();
        let mut max_change = 0.0f64;
        let mut acc = vec![0.0; dim];
        for (word, neighbors) in &self.schedule {
            let beta = match self.beta {
                BetaMode::InverseDegree => 1.0 / neighbors.len() as f64,
                BetaMode::Constant(c) => c,
            };
            let orig = self.original.get(word).expect("scheduled words have vectors");
            for (a, o) in acc.iter_mut().zip(orig) {
                *a = self.alpha * o;
            }
            for n in neighbors {
                let v = self.current.get(n).expect("scheduled neighbours have vectors");
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += beta * x;
                }
            }
            let denom = beta * neighbors.len() as f64 + self.alpha;
            let target = self.current.get_mut(word).expect("scheduled words have vectors");
            for (t, a) in target.iter_mut().zip(&acc) {
                let new = a / denom;
                max_change = max_change.max((new - *t).abs());
                *t = new;
            }
        }
        max_change
    }

    pub fn table(&self) -> &EmbeddingTable {
        &self.current
    }

    pub fn into_table(self) -> EmbeddingTable {
        self.current
    }
}

/// Retrofits `table` to `lex` for `params.iterations` sweeps. Words without
/// embedded lexicon neighbours keep their vectors.
pub fn retrofit(table: &EmbeddingTable, lex: &Lexicon, params: &RetrofitParams) -> Result<EmbeddingTable> {
    if params.iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be at least 1".into()));
    }
    let mut r = Retrofitter::new(table, lex, params.alpha, params.beta)?;
    for _ in 0..params.iterations {
        r.sweep();
    }
    Ok(r.into_table())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::load_embeddings;

    fn lex(s: &str) -> Lexicon {
        parse_lexicon(s.as_bytes()).unwrap()
    }

    fn table(s: &str) -> EmbeddingTable {
        load_embeddings(s.as_bytes()).unwrap().table
    }

    #[test]
    fn symmetrised() {
        let l = lex("a b c\n");
        assert_eq!(l.neighbors("a").unwrap().len(), 2);
        assert!(l.neighbors("b").unwrap().contains("a"));
        assert!(l.neighbors("c").unwrap().contains("a"));
    }

    #[test]
    fn self_loop_dropped() {
        let l = lex("a a\n");
        assert!(l.neighbors("a").unwrap().is_empty());
    }

    #[test]
    fn empty_lexicon() {
        let l = lex("");
        assert!(l.is_empty());
        let t = table("a 1 2\nb 3 4\n");
        let out = retrofit(&t, &l, &RetrofitParams { iterations: 1, ..Default::default() }).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn zero_iterations_rejected() {
        let t = table("a 1\n");
        let params = RetrofitParams { iterations: 0, ..Default::default() };
        assert!(matches!(retrofit(&t, &lex(""), &params), Err(Error::InvalidArgument(_))));
        let params = RetrofitParams { alpha: 0.0, ..Default::default() };
        assert!(matches!(retrofit(&t, &lex(""), &params), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn word_without_embedded_neighbors_unchanged() {
        let t = table("a 1 2\nb 3 4\n");
        let out = retrofit(&t, &lex("a zzz\n"), &RetrofitParams::default()).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn linked_words_pull_together() {
        let t = table("a 0 0\nb 1 1\nc 5 5\n");
        let out = retrofit(&t, &lex("a b\n"), &RetrofitParams::default()).unwrap();
        let a = out.get("a").unwrap()[0];
        let b = out.get("b").unwrap()[0];
        assert!(a > 0.0 && b < 1.0 && a < b);
        assert_eq!(out.get("c").unwrap(), &[5.0, 5.0]);
    }
}
