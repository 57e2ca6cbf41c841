use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{AllowanceRequest, ComcheckError};

/// Serializes with object keys sorted at every level.
pub fn canonical_json(value: &Value) -> String {
    fn write(v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                let mut keys: Vec<&String> = map.keys().collect();
                keys.sort();
                out.push('{');
                for (i, k) in keys.into_iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&Value::String(k.clone()).to_string());
                    out.push(':');
                    write(&map[k], out);
                }
                out.push('}');
            }
            Value::Array(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write(item, out);
                }
                out.push(']');
            }
            other => out.push_str(&other.to_string()),
        }
    }
    let mut out = String::new();
    write(value, &mut out);
    out
}

/// SHA-256 of the canonical JSON, lowercase hex.
pub fn canonical_hash(value: &Value) -> String {
    hex::encode(Sha256::digest(canonical_json(value).as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedFixture {
    pub request: Value,
    pub response: Value,
    pub recorded_at: String,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordOutcome {
    Inserted,
    Unchanged,
    Overwritten,
}

/// Recorded responses keyed by canonical request hash.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FixtureStore {
    fixtures: BTreeMap<String, RecordedFixture>,
}

impl FixtureStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.fixtures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixtures.is_empty()
    }

    pub fn get(&self, hash: &str) -> Option<&RecordedFixture> {
        self.fixtures.get(hash)
    }

    pub fn lookup(&self, request: &AllowanceRequest) -> Option<&RecordedFixture> {
        self.get(&request.canonical_hash())
    }

    pub fn record(&mut self, request: &AllowanceRequest, response: Value, source: &str) -> RecordOutcome {
        self.record_value(request.to_value(), response, source)
    }

    pub fn record_value(&mut self, request: Value, response: Value, source: &str) -> RecordOutcome {
        let hash = canonical_hash(&request);
        match self.fixtures.get(&hash) {
            Some(existing) if existing.response == response => RecordOutcome::Unchanged,
            existing => {
                let outcome = if existing.is_some() {
                    log::warn!("fixture {hash}: overwriting recorded response with a different one");
                    RecordOutcome::Overwritten
                } else {
                    RecordOutcome::Inserted
                };
                self.fixtures.insert(
                    hash,
                    RecordedFixture {
                        request,
                        response,
                        recorded_at: chrono::Utc::now().to_rfc3339(),
                        source: source.to_string(),
                    },
                );
                outcome
            }
        }
    }

    /// Loads every `*.json` file in `dir`; each holds one [`RecordedFixture`].
    /// The key is recomputed from the stored request.
    pub fn load_dir(dir: &Path) -> Result<Self, ComcheckError> {
        let io = |e: std::io::Error| ComcheckError::FixtureIo(format!("{}: {e}", dir.display()));
        let mut store = Self::new();
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let text = std::fs::read_to_string(&path).map_err(io)?;
            let fixture: RecordedFixture = serde_json::from_str(&text)
                .map_err(|e| ComcheckError::FixtureIo(format!("{}: {e}", path.display())))?;
            store.fixtures.insert(canonical_hash(&fixture.request), fixture);
        }
        Ok(store)
    }

    /// Writes one `<hash>.json` file per fixture.
    pub fn save_dir(&self, dir: &Path) -> Result<(), ComcheckError> {
        let io = |e: std::io::Error| ComcheckError::FixtureIo(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        for (hash, fixture) in &self.fixtures {
            let text = serde_json::to_string_pretty(fixture).expect("fixture serializes");
            std::fs::write(dir.join(format!("{hash}.json")), text + "\n").map_err(io)?;
        }
        Ok(())
    }
}
