//! Client seam for a COMcheck-style allowance API.
//!
//! Three transports share one call surface:
//! - `live` POSTs a thin JSON mapping of [`AllowanceRequest`] to
//!   `COMCHECK_ENDPOINT` with `COMCHECK_TOKEN` as bearer credential. The
//!   request/response schema is a placeholder; no public contract exists.
//! - `replay` answers from recorded fixtures keyed by a canonical request hash.
//! - `local` delegates to the in-process rules engine.

mod client;
mod fixtures;

pub use client::{ComcheckClient, LiveConfig};
pub use fixtures::{canonical_hash, canonical_json, FixtureStore, RecordOutcome, RecordedFixture};

use serde::{Deserialize, Serialize};

use crate::rules::RulesError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportMode {
    Live,
    Replay,
    Local,
}

impl std::str::FromStr for TransportMode {
    type Err = ComcheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "live" => Ok(TransportMode::Live),
            "replay" => Ok(TransportMode::Replay),
            "local" => Ok(TransportMode::Local),
            other => Err(ComcheckError::MissingConfiguration(format!("unknown transport mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for TransportMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TransportMode::Live => "live",
            TransportMode::Replay => "replay",
            TransportMode::Local => "local",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllowanceRequest {
    pub floor_area_ft2: f64,
    pub use_type: String,
    pub code_version: String,
}

impl AllowanceRequest {
    pub fn new(floor_area_ft2: f64, use_type: impl Into<String>, code_version: impl Into<String>) -> Result<Self, ComcheckError> {
        if !(floor_area_ft2.is_finite() && floor_area_ft2 >= 0.0) {
            return Err(ComcheckError::Rules(RulesError::NegativeArea(floor_area_ft2)));
        }
        Ok(Self { floor_area_ft2, use_type: use_type.into(), code_version: code_version.into() })
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("request serializes")
    }

    pub fn canonical_hash(&self) -> String {
        canonical_hash(&self.to_value())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ComcheckError {
    #[error("MissingFixture: no recorded response for request hash {0}")]
    MissingFixture(String),
    #[error("EndpointUnreachable: {0}")]
    EndpointUnreachable(String),
    #[error("MalformedResponse: {0}")]
    MalformedResponse(String),
    #[error("MissingConfiguration: {0}")]
    MissingConfiguration(String),
    #[error("FixtureIo: {0}")]
    FixtureIo(String),
    #[error("{0}")]
    Rules(#[from] RulesError),
}

impl ComcheckError {
    pub fn kind(&self) -> &'static str {
        match self {
            ComcheckError::MissingFixture(_) => "MissingFixture",
            ComcheckError::EndpointUnreachable(_) => "EndpointUnreachable",
            ComcheckError::MalformedResponse(_) => "MalformedResponse",
            ComcheckError::MissingConfiguration(_) => "MissingConfiguration",
            ComcheckError::FixtureIo(_) => "FixtureIo",
            ComcheckError::Rules(e) => e.kind(),
        }
    }
}

/// Reads the allowance from a response document `{"allowed_wattage_w": <int>}`.
pub fn parse_response(doc: &serde_json::Value) -> Result<i64, ComcheckError> {
    let v = doc
        .get("allowed_wattage_w")
        .ok_or_else(|| ComcheckError::MalformedResponse("missing 'allowed_wattage_w'".into()))?;
    if let Some(i) = v.as_i64() {
        return Ok(i);
    }
    match v.as_f64() {
        Some(f) if f.fract() == 0.0 => Ok(f as i64),
        _ => Err(ComcheckError::MalformedResponse(format!("'allowed_wattage_w' is not an integer: {v}"))),
    }
}

pub fn response_document(watts: i64) -> serde_json::Value {
    serde_json::json!({ "allowed_wattage_w": watts })
}
