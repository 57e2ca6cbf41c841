#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use acr_core::agent::ToolRegistry;
use acr_core::comcheck::ComcheckClient;
use acr_core::rules::LpdCatalog;
use acr_core::tools::{build_registry, ToolEnvironment};

pub const BANK_QUERY: &str =
    "What is the lighting power allowance for a 500-square-meter bank according to ASHRAE 90.1-2022?";
pub const BANK_ACTION: &str = "Thought: I need the allowance from the rules tool.\nAction: LightingAllowedWattage\nAction Input: area=500, area_unit=m2, use_type=bank_financial_institution, code_version=ashrae_90_1_2022";
pub const BANK_FINAL: &str = "Final Answer: 3019 W";

pub fn core_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

pub fn sample_corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/sample_provisions.json")
}

pub fn local_registry() -> ToolRegistry {
    let client = ComcheckClient::local(Arc::new(LpdCatalog::builtin()));
    build_registry(&ToolEnvironment::new(Arc::new(client)))
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn acr(args: &[&str]) -> (i32, String, String) {
    acr_with_stdin(args, "")
}

pub fn acr_with_stdin(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["acr"];
    argv.extend_from_slice(args);
    let mut input = std::io::Cursor::new(stdin.as_bytes().to_vec());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = acr_service::cli::run(argv, &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn write_script(dir: &std::path::Path, turns: &[&str]) -> PathBuf {
    let path = dir.join("script.json");
    std::fs::write(&path, serde_json::to_string(turns).unwrap()).unwrap();
    path
}
