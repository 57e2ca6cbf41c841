use std::path::Path;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use super::{parse_response, response_document, AllowanceRequest, ComcheckError, FixtureStore, RecordOutcome, TransportMode};
use crate::rules::{lighting_allowed_wattage, Area, BuildingUseType, CodeVersion, LpdCatalog};

#[derive(Debug, Clone, PartialEq)]
pub struct LiveConfig {
    pub endpoint: String,
    pub token: Option<String>,
    pub timeout: Duration,
}

impl LiveConfig {
    /// `COMCHECK_ENDPOINT` and `COMCHECK_TOKEN`; `None` without an endpoint.
    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var("COMCHECK_ENDPOINT").ok().filter(|s| !s.is_empty())?;
        Some(Self {
            endpoint,
            token: std::env::var("COMCHECK_TOKEN").ok().filter(|s| !s.is_empty()),
            timeout: Duration::from_secs(30),
        })
    }
}

/// Allowance client. Lookups take a read lock on the fixture store; recording
/// takes the write lock.
#[derive(Debug)]
pub struct ComcheckClient {
    catalog: Arc<LpdCatalog>,
    store: RwLock<FixtureStore>,
    live: Option<LiveConfig>,
    default_mode: TransportMode,
}

impl ComcheckClient {
    pub fn local(catalog: Arc<LpdCatalog>) -> Self {
        Self { catalog, store: RwLock::new(FixtureStore::new()), live: None, default_mode: TransportMode::Local }
    }

    pub fn replay(catalog: Arc<LpdCatalog>, store: FixtureStore) -> Self {
        Self { catalog, store: RwLock::new(store), live: None, default_mode: TransportMode::Replay }
    }

    pub fn live(catalog: Arc<LpdCatalog>, config: LiveConfig) -> Self {
        Self { catalog, store: RwLock::new(FixtureStore::new()), live: Some(config), default_mode: TransportMode::Live }
    }

    /// Builds a client from `COMCHECK_MODE`, `COMCHECK_ENDPOINT` and
    /// `COMCHECK_TOKEN`. Without an explicit mode: live when an endpoint is
    /// set, replay when a fixtures directory is given, local otherwise.
    pub fn from_env(catalog: Arc<LpdCatalog>, fixtures_dir: Option<&Path>) -> Result<Self, ComcheckError> {
        let live = LiveConfig::from_env();
        let mode = match std::env::var("COMCHECK_MODE").ok().filter(|s| !s.is_empty()) {
            Some(m) => m.parse()?,
            None if live.is_some() => TransportMode::Live,
            None if fixtures_dir.is_some() => TransportMode::Replay,
            None => TransportMode::Local,
        };
        let store = match fixtures_dir {
            Some(dir) if dir.exists() => FixtureStore::load_dir(dir)?,
            _ => FixtureStore::new(),
        };
        if mode == TransportMode::Live && live.is_none() {
            return Err(ComcheckError::MissingConfiguration("live mode needs COMCHECK_ENDPOINT".into()));
        }
        Ok(Self { catalog, store: RwLock::new(store), live, default_mode: mode })
    }

    pub fn default_mode(&self) -> TransportMode {
        self.default_mode
    }

    pub fn catalog(&self) -> &LpdCatalog {
        &self.catalog
    }

    pub fn fixture_count(&self) -> usize {
        self.store.read().unwrap().len()
    }

    pub fn store_snapshot(&self) -> FixtureStore {
        self.store.read().unwrap().clone()
    }

    /// Allowance in the client's default mode.
    pub fn allowed_wattage_default(&self, request: &AllowanceRequest) -> Result<i64, ComcheckError> {
        self.allowed_wattage(request, self.default_mode)
    }

    pub fn allowed_wattage(&self, request: &AllowanceRequest, mode: TransportMode) -> Result<i64, ComcheckError> {
        match mode {
            TransportMode::Local => self.local_watts(request),
            TransportMode::Replay => {
                let hash = request.canonical_hash();
                let store = self.store.read().unwrap();
                let fixture = store.get(&hash).ok_or(ComcheckError::MissingFixture(hash))?;
                parse_response(&fixture.response)
            }
            TransportMode::Live => self.live_watts(request),
        }
    }

    pub fn record_fixture(&self, request: &AllowanceRequest, response: serde_json::Value, source: &str) -> RecordOutcome {
        self.store.write().unwrap().record(request, response, source)
    }

    /// Computes the allowance locally and records it as a replay fixture.
    pub fn record_from_local(&self, request: &AllowanceRequest) -> Result<i64, ComcheckError> {
        let watts = self.local_watts(request)?;
        self.record_fixture(request, response_document(watts), "local");
        Ok(watts)
    }

    fn local_watts(&self, request: &AllowanceRequest) -> Result<i64, ComcheckError> {
        let use_type = BuildingUseType::new(request.use_type.clone())?;
        let code_version = CodeVersion::new(request.code_version.clone())?;
        Ok(lighting_allowed_wattage(&self.catalog, Area::ft2(request.floor_area_ft2), &use_type, &code_version)?)
    }

    fn live_watts(&self, request: &AllowanceRequest) -> Result<i64, ComcheckError> {
        let cfg = self
            .live
            .as_ref()
            .ok_or_else(|| ComcheckError::MissingConfiguration("live mode needs COMCHECK_ENDPOINT".into()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(cfg.timeout)
            .build()
            .map_err(|e| ComcheckError::EndpointUnreachable(e.to_string()))?;
        let mut req = client.post(&cfg.endpoint).json(&request.to_value());
        if let Some(token) = &cfg.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| ComcheckError::EndpointUnreachable(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(ComcheckError::EndpointUnreachable(format!("HTTP {}", resp.status())));
        }
        let doc: serde_json::Value = resp.json().map_err(|e| ComcheckError::MalformedResponse(e.to_string()))?;
        parse_response(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Arc<LpdCatalog> {
        Arc::new(LpdCatalog::builtin())
    }

    fn bank(ft2: f64) -> AllowanceRequest {
        AllowanceRequest::new(ft2, "bank_financial_institution", "ashrae_90_1_2022").unwrap()
    }

    #[test]
    fn local_mode_bank() {
        let c = ComcheckClient::local(catalog());
        assert_eq!(c.allowed_wattage(&bank(5381.955), TransportMode::Local).unwrap(), 3019);
    }

    #[test]
    fn replay_seeded_fixture() {
        let mut store = FixtureStore::new();
        store.record(&bank(5381.955), response_document(3019), "seed");
        let c = ComcheckClient::replay(catalog(), store);
        assert_eq!(c.allowed_wattage_default(&bank(5381.955)).unwrap(), 3019);
    }

    #[test]
    fn replay_miss_names_hash() {
        let c = ComcheckClient::replay(catalog(), FixtureStore::new());
        let err = c.allowed_wattage_default(&bank(1.0)).unwrap_err();
        assert_eq!(err, ComcheckError::MissingFixture(bank(1.0).canonical_hash()));
        assert!(err.to_string().contains(&bank(1.0).canonical_hash()));
    }

    #[test]
    fn live_without_config() {
        let c = ComcheckClient::local(catalog());
        assert!(matches!(
            c.allowed_wattage(&bank(1.0), TransportMode::Live),
            Err(ComcheckError::MissingConfiguration(_))
        ));
    }

    #[test]
    fn malformed_fixture_response() {
        let mut store = FixtureStore::new();
        store.record(&bank(2.0), serde_json::json!({"watts": "lots"}), "seed");
        let c = ComcheckClient::replay(catalog(), store);
        assert!(matches!(c.allowed_wattage_default(&bank(2.0)), Err(ComcheckError::MalformedResponse(_))));
    }

    #[test]
    fn unknown_use_type_propagates() {
        let c = ComcheckClient::local(catalog());
        let r = AllowanceRequest::new(100.0, "spaceport", "ashrae_90_1_2022").unwrap();
        assert_eq!(c.allowed_wattage_default(&r).unwrap_err().kind(), "UnknownUseType");
    }

    proptest::proptest! {
        #[test]
        fn local_and_recorded_replay_agree(ft2 in 0.0f64..1e6) {
            let c = ComcheckClient::local(catalog());
            let r = bank(ft2);
            let local = c.record_from_local(&r).unwrap();
            proptest::prop_assert_eq!(c.allowed_wattage(&r, TransportMode::Replay).unwrap(), local);
        }
    }
}
