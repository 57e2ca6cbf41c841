use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Provision, RetrievalError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub provision_id: String,
    pub term_counts: BTreeMap<String, u32>,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvisionIndex {
    pub provisions: Vec<Provision>,
    pub chunks: Vec<Chunk>,
    pub document_frequencies: BTreeMap<String, u32>,
    pub average_chunk_length: f64,
    pub params: Bm25Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub provision_id: String,
    pub score: f64,
    pub rank: usize,
}

/// Lowercase, split on anything not alphanumeric, drop empties.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn ingest_provisions(provisions: Vec<Provision>) -> Result<ProvisionIndex, RetrievalError> {
    ingest_with_params(provisions, Bm25Params::default())
}

pub fn ingest_with_params(provisions: Vec<Provision>, params: Bm25Params) -> Result<ProvisionIndex, RetrievalError> {
    let mut seen = HashSet::new();
    let mut chunks = Vec::with_capacity(provisions.len());
    let mut document_frequencies: BTreeMap<String, u32> = BTreeMap::new();
    let mut total_len = 0usize;
    for p in &provisions {
        if !seen.insert(p.id.as_str()) {
            return Err(RetrievalError::DuplicateId(p.id.clone()));
        }
        if p.body.trim().is_empty() {
            return Err(RetrievalError::EmptyBody(p.id.clone()));
        }
        let tokens = tokenize(&format!("{}\n{}", p.heading, p.body));
        let mut term_counts: BTreeMap<String, u32> = BTreeMap::new();
        for t in &tokens {
            *term_counts.entry(t.clone()).or_default() += 1;
        }
        for term in term_counts.keys() {
            *document_frequencies.entry(term.clone()).or_default() += 1;
        }
        total_len += tokens.len();
        chunks.push(Chunk { provision_id: p.id.clone(), term_counts, length: tokens.len() });
    }
    let average_chunk_length = if chunks.is_empty() { 0.0 } else { total_len as f64 / chunks.len() as f64 };
    Ok(ProvisionIndex { provisions, chunks, document_frequencies, average_chunk_length, params })
}

impl ProvisionIndex {
    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn provision(&self, id: &str) -> Option<&Provision> {
        self.provisions.iter().find(|p| p.id == id)
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`, always positive.
    fn idf(&self, df: u32) -> f64 {
        let n = self.chunks.len() as f64;
        let df = f64::from(df);
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    fn score_chunk(&self, chunk: &Chunk, query_terms: &BTreeMap<String, u32>) -> Option<f64> {
        let Bm25Params { k1, b } = self.params;
        let norm = k1 * (1.0 - b + b * chunk.length as f64 / self.average_chunk_length);
        let mut score = 0.0;
        let mut matched = false;
        for (term, qtf) in query_terms {
            let Some(&tf) = chunk.term_counts.get(term) else { continue };
            let df = self.document_frequencies[term];
            let tf = f64::from(tf);
            score += f64::from(*qtf) * self.idf(df) * tf * (k1 + 1.0) / (tf + norm);
            matched = true;
        }
        matched.then_some(score)
    }
}

/// Top-k chunks by BM25, highest score first, ties broken by ascending id.
/// Chunks sharing no term with the query are not returned.
pub fn retrieve(index: &ProvisionIndex, query: &str, k: usize) -> Result<Vec<RetrievalResult>, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    if index.is_empty() {
        return Err(RetrievalError::EmptyIndex);
    }
    let mut query_terms: BTreeMap<String, u32> = BTreeMap::new();
    for t in tokenize(query) {
        *query_terms.entry(t).or_default() += 1;
    }
    let mut scored: Vec<(f64, &str)> = index
        .chunks
        .iter()
        .filter_map(|c| index.score_chunk(c, &query_terms).map(|s| (s, c.provision_id.as_str())))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    Ok(scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (score, id))| RetrievalResult { provision_id: id.to_string(), score, rank: i + 1 })
        .collect())
}
