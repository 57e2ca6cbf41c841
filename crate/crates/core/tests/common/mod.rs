#![allow(dead_code)]

use std::sync::Arc;

use acr_core::agent::ToolRegistry;
use acr_core::comcheck::ComcheckClient;
use acr_core::rules::LpdCatalog;
use acr_core::tools::{build_registry, ToolEnvironment};

pub const BANK_QUERY: &str =
    "What is the lighting power allowance for a 500-square-meter bank according to ASHRAE 90.1-2022?";

pub const BANK_ACTION: &str = "Thought: the allowance comes from the building area method.\n\
Action: LightingAllowedWattage\n\
Action Input: area=500, area_unit=m2, use_type=bank_financial_institution, code_version=ashrae_90_1_2022";

pub const BANK_FINAL: &str = "Final Answer: 3019 W";

/// Figure values from LLM-only and RAG answers that a deterministic path must
/// never produce.
pub const WRONG_ANSWERS: [i64; 4] = [5500, 7535, 7585, 5400];

pub fn catalog() -> Arc<LpdCatalog> {
    Arc::new(LpdCatalog::builtin())
}

pub fn local_env() -> ToolEnvironment {
    ToolEnvironment::new(Arc::new(ComcheckClient::local(catalog())))
}

pub fn local_registry() -> ToolRegistry {
    build_registry(&local_env())
}

pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
