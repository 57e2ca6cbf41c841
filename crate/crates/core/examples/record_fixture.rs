//! Records a local-mode allowance as a replay fixture:
//! `record_fixture <dir> <floor_area_ft2> <use_type> <code_version>`.
use std::path::Path;
use std::sync::Arc;

use acr_core::comcheck::{AllowanceRequest, ComcheckClient, FixtureStore};
use acr_core::rules::LpdCatalog;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [dir, area, use_type, code] = args.as_slice() else {
        eprintln!("usage: record_fixture <dir> <floor_area_ft2> <use_type> <code_version>");
        std::process::exit(2);
    };
    let dir = Path::new(dir);
    let store = if dir.exists() { FixtureStore::load_dir(dir).unwrap() } else { FixtureStore::new() };
    let client = ComcheckClient::replay(Arc::new(LpdCatalog::builtin()), store);
    let req = AllowanceRequest::new(area.parse().unwrap(), use_type.as_str(), code.as_str()).unwrap();
    let watts = client.record_from_local(&req).unwrap();
    client.store_snapshot().save_dir(dir).unwrap();
    println!("{} -> {watts} W", req.canonical_hash());
}
