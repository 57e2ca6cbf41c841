mod common;

use std::sync::Arc;

use acr_core::comcheck::{AllowanceRequest, ComcheckClient, ComcheckError, FixtureStore, TransportMode};
use proptest::prelude::*;

fn fixtures_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/comcheck")
}

#[test]
fn checked_in_fixture_replays() {
    let store = FixtureStore::load_dir(&fixtures_dir()).unwrap();
    assert_eq!(store.len(), 1);
    let client = ComcheckClient::replay(common::catalog(), store);
    let req = AllowanceRequest::new(5381.9552085, "bank_financial_institution", "ashrae_90_1_2022").unwrap();
    assert_eq!(client.allowed_wattage_default(&req).unwrap(), 3019);
}

#[test]
fn replay_miss_is_an_error_not_a_guess() {
    let store = FixtureStore::load_dir(&fixtures_dir()).unwrap();
    let client = ComcheckClient::replay(common::catalog(), store);
    let req = AllowanceRequest::new(5381.955, "bank_financial_institution", "ashrae_90_1_2022").unwrap();
    assert!(matches!(client.allowed_wattage_default(&req), Err(ComcheckError::MissingFixture(h)) if h == req.canonical_hash()));
}

#[test]
fn unreachable_endpoint() {
    let client = ComcheckClient::live(
        common::catalog(),
        acr_core::comcheck::LiveConfig {
            endpoint: "http://127.0.0.1:9/allowance".into(),
            token: Some("t".into()),
            timeout: std::time::Duration::from_secs(2),
        },
    );
    let req = AllowanceRequest::new(100.0, "bank_financial_institution", "ashrae_90_1_2022").unwrap();
    assert_eq!(client.allowed_wattage_default(&req).unwrap_err().kind(), "EndpointUnreachable");
}

#[test]
fn negative_area_rejected_before_transport() {
    assert!(AllowanceRequest::new(-1.0, "bank_financial_institution", "ashrae_90_1_2022").is_err());
    assert!(AllowanceRequest::new(f64::NAN, "bank_financial_institution", "ashrae_90_1_2022").is_err());
}

#[test]
fn concurrent_lookups_and_recording() {
    let client = Arc::new(ComcheckClient::local(common::catalog()));
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let c = client.clone();
            std::thread::spawn(move || {
                for j in 0..50 {
                    let req = AllowanceRequest::new(f64::from(i * 100 + j), "bank_financial_institution", "ashrae_90_1_2022").unwrap();
                    let w = c.record_from_local(&req).unwrap();
                    assert_eq!(c.allowed_wattage(&req, TransportMode::Replay).unwrap(), w);
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    assert_eq!(client.fixture_count(), 400);
}

proptest! {
    #[test]
    fn saved_fixtures_replay_identically(areas in prop::collection::vec(0.0f64..1e5, 1..10)) {
        let dir = tempfile::tempdir().unwrap();
        let client = ComcheckClient::local(common::catalog());
        let reqs: Vec<_> = areas.iter().map(|&a| AllowanceRequest::new(a, "bank_financial_institution", "ashrae_90_1_2022").unwrap()).collect();
        let local: Vec<i64> = reqs.iter().map(|r| client.record_from_local(r).unwrap()).collect();
        client.store_snapshot().save_dir(dir.path()).unwrap();
        let replay = ComcheckClient::replay(common::catalog(), FixtureStore::load_dir(dir.path()).unwrap());
        let replayed: Vec<i64> = reqs.iter().map(|r| replay.allowed_wattage_default(r).unwrap()).collect();
        prop_assert_eq!(local, replayed);
    }
}
