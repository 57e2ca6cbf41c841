//! Generator latency and token benchmark: every prompt is sent `reps` times
//! and timed individually.

use std::time::Instant;

use acr_core::agent::TokenSource;
use acr_core::llm::{proxy_tokens, GenerationParams, LlmClient, Message};
use serde::{Deserialize, Serialize};

use crate::ServiceError;

pub trait Clock {
    /// Milliseconds since an arbitrary fixed origin.
    fn now_ms(&self) -> f64;
}

pub struct SystemClock(Instant);

impl SystemClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1000.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPrompt {
    pub id: String,
    pub text: String,
}

impl BenchPrompt {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self { id: id.into(), text: text.into() }
    }
}

pub fn default_prompts() -> Vec<BenchPrompt> {
    vec![
        BenchPrompt::new(
            "doorway_u_factor",
            "What is the minimum U-factor required for a doorway in Climate Zone 5 according to ASHRAE 90.1-2022?",
        ),
        BenchPrompt::new(
            "ifc_wall_entity",
            "Which IFC entity type is used to represent a building envelope wall for energy code compliance checks?",
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub model: String,
    pub prompt_id: String,
    pub repetition: usize,
    pub wall_time_ms: f64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub temperature: f64,
    pub token_source: TokenSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Statistics over the successful runs of one prompt; `None` when every run
/// failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSummary {
    pub prompt_id: String,
    pub runs: usize,
    pub errors: usize,
    pub mean_ms: Option<f64>,
    pub min_ms: Option<f64>,
    pub max_ms: Option<f64>,
    pub mean_prompt_tokens: Option<f64>,
    pub mean_completion_tokens: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<PromptSummary>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn summarize(prompt_id: &str, records: &[BenchRecord]) -> PromptSummary {
    let ok: Vec<&BenchRecord> = records.iter().filter(|r| r.prompt_id == prompt_id && r.error.is_none()).collect();
    let times: Vec<f64> = ok.iter().map(|r| r.wall_time_ms).collect();
    let ptoks: Vec<f64> = ok.iter().map(|r| r.prompt_tokens as f64).collect();
    let ctoks: Vec<f64> = ok.iter().map(|r| r.completion_tokens as f64).collect();
    PromptSummary {
        prompt_id: prompt_id.to_string(),
        runs: records.iter().filter(|r| r.prompt_id == prompt_id).count(),
        errors: records.iter().filter(|r| r.prompt_id == prompt_id && r.error.is_some()).count(),
        mean_ms: mean(&times),
        min_ms: times.iter().copied().reduce(f64::min),
        max_ms: times.iter().copied().reduce(f64::max),
        mean_prompt_tokens: mean(&ptoks),
        mean_completion_tokens: mean(&ctoks),
    }
}

/// Generator failures are recorded per run rather than aborting, except an
/// unconfigured generator, which fails the whole bench.
pub fn run_bench(
    prompts: &[BenchPrompt],
    llm: &dyn LlmClient,
    reps: usize,
    params: &GenerationParams,
    clock: &dyn Clock,
) -> Result<BenchReport, ServiceError> {
    if reps == 0 {
        return Err(ServiceError::new("InvalidInput", "repetitions must be at least 1"));
    }
    if prompts.is_empty() {
        return Err(ServiceError::new("InvalidInput", "at least one prompt is required"));
    }
    let model = llm.label();
    let mut records = Vec::with_capacity(prompts.len() * reps);
    for prompt in prompts {
        let messages = [Message::user(prompt.text.clone())];
        for rep in 0..reps {
            let start = clock.now_ms();
            let result = llm.generate(&messages, params);
            let wall_time_ms = (clock.now_ms() - start).max(0.0);
            let mut record = BenchRecord {
                model: model.clone(),
                prompt_id: prompt.id.clone(),
                repetition: rep,
                wall_time_ms,
                prompt_tokens: 0,
                completion_tokens: 0,
                temperature: params.temperature,
                token_source: TokenSource::WhitespaceProxy,
                error: None,
            };
            match result {
                Ok(g) => match (g.prompt_tokens, g.completion_tokens) {
                    (Some(p), Some(c)) => {
                        record.prompt_tokens = p;
                        record.completion_tokens = c;
                        record.token_source = TokenSource::Provider;
                    }
                    _ => {
                        record.prompt_tokens = proxy_tokens(&prompt.text);
                        record.completion_tokens = proxy_tokens(&g.text);
                    }
                },
                Err(acr_core::llm::LlmError::Unavailable(m)) => {
                    return Err(ServiceError::new("GeneratorUnavailable", m));
                }
                Err(e) => record.error = Some(e.to_string()),
            }
            records.push(record);
        }
    }
    let summary = prompts.iter().map(|p| summarize(&p.id, &records)).collect();
    Ok(BenchReport { records, summary })
}
