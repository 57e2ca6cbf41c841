//! Operator surface for the compliance toolkit: the `acr` command line, the
//! HTTP chat service and the generator benchmark harness.

pub mod bench;
pub mod chat;
pub mod cli;
pub mod http;
pub mod setup;

use serde::Serialize;

/// Error reported to operators, as JSON on stdout or in an HTTP body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct ServiceError {
    pub kind: String,
    pub message: String,
}

impl ServiceError {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Self { kind: kind.into(), message: message.into() }
    }

    pub fn file_not_found(path: &std::path::Path) -> Self {
        Self::new("FileNotFound", format!("file not found: {}", path.display()))
    }

    pub fn document(&self) -> serde_json::Value {
        serde_json::json!({ "error": self })
    }
}

/// Core errors already lead their message with a kind tag; split it off.
fn from_tagged(text: String, fallback: &str) -> ServiceError {
    match text.split_once(": ") {
        Some((kind, rest)) if !kind.is_empty() && kind.chars().all(|c| c.is_ascii_alphanumeric()) => {
            ServiceError::new(kind, rest)
        }
        _ => ServiceError::new(fallback, text),
    }
}

macro_rules! tagged_from {
    ($($t:ty => $fallback:literal),* $(,)?) => {$(
        impl From<$t> for ServiceError {
            fn from(e: $t) -> Self {
                from_tagged(e.to_string(), $fallback)
            }
        }
    )*};
}

tagged_from!(
    acr_core::gbxml::GbxmlError => "GbxmlError",
    acr_core::rules::RulesError => "RulesError",
    acr_core::retrieval::RetrievalError => "RetrievalError",
    acr_core::comcheck::ComcheckError => "ComcheckError",
    acr_core::docparse::DocParseError => "DocParseError",
    acr_core::agent::AgentError => "AgentError",
);

/// Reads a file, mapping a missing path to `FileNotFound`.
pub fn read_file(path: &std::path::Path) -> Result<String, ServiceError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ServiceError::file_not_found(path),
        _ => ServiceError::new("IoError", format!("{}: {e}", path.display())),
    })
}
