//! Code-provision retrieval for grounded question answering.
//!
//! One provision is one chunk. Ranking is Okapi BM25 over lowercase
//! alphanumeric tokens with the heading prepended to the body.

mod bm25;
mod context;
mod rag;

pub use bm25::{ingest_provisions, retrieve, tokenize, Bm25Params, Chunk, ProvisionIndex, RetrievalResult};
pub use context::{assemble_context, AssembledContext, DEFAULT_BUDGET, DEFAULT_K, NO_PROVISIONS_MARKER};
pub use rag::{answer_with_rag, compare_with_rules, reported_watts, RagAnswer, RulesComparison};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provision {
    pub id: String,
    pub section_label: String,
    pub heading: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RetrievalError {
    #[error("DuplicateId: provision id '{0}' appears more than once")]
    DuplicateId(String),
    #[error("EmptyBody: provision '{0}' has an empty body")]
    EmptyBody(String),
    #[error("EmptyIndex: no provisions have been indexed")]
    EmptyIndex,
    #[error("InvalidK: k must be at least 1")]
    InvalidK,
    #[error("BudgetTooSmall: query needs {needed} tokens but the budget is {budget}")]
    BudgetTooSmall { needed: usize, budget: usize },
    #[error("GeneratorUnavailable: {0}")]
    GeneratorUnavailable(String),
    #[error("CorpusFormat: {0}")]
    CorpusFormat(String),
}

/// Reads a corpus file: a JSON array of `{id, section_label, heading, body}`.
pub fn load_corpus(text: &str) -> Result<Vec<Provision>, RetrievalError> {
    serde_json::from_str(text).map_err(|e| RetrievalError::CorpusFormat(e.to_string()))
}
