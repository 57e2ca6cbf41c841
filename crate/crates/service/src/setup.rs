//! Shared construction of tool registries and generators from CLI flags and
//! environment variables.

use std::path::PathBuf;
use std::sync::Arc;

use acr_core::agent::ToolRegistry;
use acr_core::comcheck::ComcheckClient;
use acr_core::gbxml::parse_gbxml;
use acr_core::llm::{EchoLlm, LlmClient, OpenAiCompatClient, ScriptedLlm};
use acr_core::retrieval::{ingest_provisions, load_corpus, ProvisionIndex};
use acr_core::rules::{LpdCatalog, LpdTable};
use acr_core::tools::{build_registry, ToolEnvironment};
use clap::Args;

use crate::{read_file, ServiceError};

#[derive(Debug, Clone, Default, Args)]
pub struct ToolSources {
    /// gbXML model; enables the surface query tools.
    #[arg(long, value_name = "FILE")]
    pub gbxml: Option<PathBuf>,
    /// Provision corpus (JSON array); enables retrieve_provisions.
    #[arg(long, value_name = "FILE", env = "ACR_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Prebuilt index from `acr index`; used instead of --corpus.
    #[arg(long, value_name = "FILE", conflicts_with = "corpus")]
    pub index: Option<PathBuf>,
    /// Extra LPD table; replaces the built-in table for its code version.
    #[arg(long, value_name = "FILE", env = "ACR_LPD_TABLE")]
    pub lpd_table: Option<PathBuf>,
    /// Directory of recorded allowance responses for replay mode.
    #[arg(long, value_name = "DIR", env = "ACR_COMCHECK_FIXTURES")]
    pub comcheck_fixtures: Option<PathBuf>,
}

pub struct LoadedTools {
    pub registry: ToolRegistry,
    pub warnings: Vec<String>,
}

pub fn load_catalog(lpd_table: Option<&std::path::Path>) -> Result<LpdCatalog, ServiceError> {
    let mut catalog = LpdCatalog::builtin();
    if let Some(path) = lpd_table {
        let table = LpdTable::from_json(&read_file(path)?)?;
        catalog.insert(table);
    }
    Ok(catalog)
}

pub fn load_index(corpus: Option<&std::path::Path>, index: Option<&std::path::Path>) -> Result<Option<ProvisionIndex>, ServiceError> {
    if let Some(path) = index {
        let idx = serde_json::from_str(&read_file(path)?)
            .map_err(|e| ServiceError::new("CorpusFormat", format!("{}: {e}", path.display())))?;
        return Ok(Some(idx));
    }
    match corpus {
        Some(path) => Ok(Some(ingest_provisions(load_corpus(&read_file(path)?)?)?)),
        None => Ok(None),
    }
}

impl ToolSources {
    pub fn load(&self) -> Result<LoadedTools, ServiceError> {
        let catalog = Arc::new(load_catalog(self.lpd_table.as_deref())?);
        let client = ComcheckClient::from_env(catalog, self.comcheck_fixtures.as_deref())?;
        let mut env = ToolEnvironment::new(Arc::new(client));
        let mut warnings = Vec::new();
        if let Some(path) = &self.gbxml {
            let parsed = parse_gbxml(&read_file(path)?)?;
            warnings.extend(parsed.warnings);
            env = env.with_model(parsed.model);
        }
        if let Some(index) = load_index(self.corpus.as_deref(), self.index.as_deref())? {
            env = env.with_index(index);
        }
        Ok(LoadedTools { registry: build_registry(&env), warnings })
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GeneratorArgs {
    /// Scripted generator: a JSON array of assistant turns, replayed in order.
    #[arg(long, value_name = "FILE", conflicts_with = "echo")]
    pub script: Option<PathBuf>,
    /// Echo generator: repeats the last user message (for wiring tests).
    #[arg(long)]
    pub echo: bool,
    /// Sampling temperature for live generators.
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,
}

impl GeneratorArgs {
    /// Scripted, echo, or the OpenAI-compatible endpoint named by
    /// `LLM_ENDPOINT`; `GeneratorUnavailable` when none is configured.
    /// `cycle` makes a script loop instead of running out.
    pub fn build(&self, cycle: bool) -> Result<Arc<dyn LlmClient>, ServiceError> {
        if let Some(path) = &self.script {
            let turns: Vec<String> = serde_json::from_str(&read_file(path)?)
                .map_err(|e| ServiceError::new("ScriptFormat", format!("{}: expected a JSON array of strings: {e}", path.display())))?;
            return Ok(if cycle { Arc::new(ScriptedLlm::cycling(turns)) } else { Arc::new(ScriptedLlm::new(turns)) });
        }
        if self.echo {
            return Ok(Arc::new(EchoLlm));
        }
        OpenAiCompatClient::from_env()
            .map(|c| Arc::new(c) as Arc<dyn LlmClient>)
            .ok_or_else(|| {
                ServiceError::new(
                    "GeneratorUnavailable",
                    "no generator configured: pass --script or --echo, or set LLM_ENDPOINT",
                )
            })
    }

    pub fn params(&self) -> acr_core::llm::GenerationParams {
        acr_core::llm::GenerationParams { temperature: self.temperature, ..Default::default() }
    }
}
