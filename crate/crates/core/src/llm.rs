//! Text generator abstraction shared by the agent and the RAG path.
//!
//! Scripted stubs replay fixed turns deterministically and are what the test
//! suites run against. [`OpenAiCompatClient`] talks to any chat-completions
//! style HTTP endpoint when one is configured.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_tokens: Option<u32>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self { temperature: 0.0, max_tokens: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generation {
    pub text: String,
    /// Provider-reported usage; `None` when the backend reports nothing.
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl Generation {
    pub fn text(text: impl Into<String>) -> Self {
        Self { text: text.into(), prompt_tokens: None, completion_tokens: None }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LlmError {
    #[error("GeneratorUnavailable: {0}")]
    Unavailable(String),
    #[error("script exhausted after {0} turns")]
    ScriptExhausted(usize),
    #[error("generator returned a malformed response: {0}")]
    MalformedResponse(String),
}

pub trait LlmClient: Send + Sync {
    fn generate(&self, messages: &[Message], params: &GenerationParams) -> Result<Generation, LlmError>;

    /// Short label for metrics and bench records.
    fn label(&self) -> String {
        "llm".into()
    }
}

/// Whitespace-token count used when a provider reports no usage.
pub fn proxy_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Replays scripted assistant turns in order.
#[derive(Debug)]
pub struct ScriptedLlm {
    turns: Vec<String>,
    cycle: bool,
    cursor: Mutex<usize>,
}

impl ScriptedLlm {
    pub fn new<I, S>(turns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { turns: turns.into_iter().map(Into::into).collect(), cycle: false, cursor: Mutex::new(0) }
    }

    /// Loops over the script forever instead of running out.
    pub fn cycling<I, S>(turns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { cycle: true, ..Self::new(turns) }
    }

    pub fn calls(&self) -> usize {
        *self.cursor.lock().unwrap()
    }
}

impl LlmClient for ScriptedLlm {
    fn generate(&self, _messages: &[Message], _params: &GenerationParams) -> Result<Generation, LlmError> {
        let mut cursor = self.cursor.lock().unwrap();
        let text = if self.cycle && !self.turns.is_empty() {
            self.turns[*cursor % self.turns.len()].clone()
        } else {
            self.turns.get(*cursor).cloned().ok_or(LlmError::ScriptExhausted(self.turns.len()))?
        };
        *cursor += 1;
        Ok(Generation::text(text))
    }

    fn label(&self) -> String {
        "scripted-stub".into()
    }
}

/// Returns the last user message verbatim.
#[derive(Debug, Default)]
pub struct EchoLlm;

impl LlmClient for EchoLlm {
    fn generate(&self, messages: &[Message], _params: &GenerationParams) -> Result<Generation, LlmError> {
        let last = messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.clone())
            .unwrap_or_default();
        Ok(Generation::text(last))
    }

    fn label(&self) -> String {
        "echo-stub".into()
    }
}

/// Always fails with [`LlmError::Unavailable`].
#[derive(Debug, Default)]
pub struct UnavailableLlm;

impl LlmClient for UnavailableLlm {
    fn generate(&self, _: &[Message], _: &GenerationParams) -> Result<Generation, LlmError> {
        Err(LlmError::Unavailable("no generator configured".into()))
    }

    fn label(&self) -> String {
        "unavailable".into()
    }
}

/// Client for an OpenAI-compatible `/chat/completions` endpoint.
#[derive(Debug, Clone)]
pub struct OpenAiCompatClient {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: std::time::Duration,
}

impl OpenAiCompatClient {
    /// Reads `LLM_ENDPOINT`, `LLM_API_KEY` and `LLM_MODEL`; `None` when no
    /// endpoint is set.
    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var("LLM_ENDPOINT").ok().filter(|s| !s.is_empty())?;
        Some(Self {
            endpoint,
            api_key: std::env::var("LLM_API_KEY").ok(),
            model: std::env::var("LLM_MODEL").unwrap_or_else(|_| "gpt-4o".into()),
            timeout: std::time::Duration::from_secs(120),
        })
    }
}

impl LlmClient for OpenAiCompatClient {
    fn generate(&self, messages: &[Message], params: &GenerationParams) -> Result<Generation, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| LlmError::Unavailable(e.to_string()))?;
        let mut body = serde_json::json!({
            "model": self.model,
            "messages": messages,
            "temperature": params.temperature,
        });
        if let Some(m) = params.max_tokens {
            body["max_tokens"] = m.into();
        }
        let mut req = client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| LlmError::Unavailable(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(LlmError::Unavailable(format!("HTTP {}", resp.status())));
        }
        let v: serde_json::Value = resp.json().map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
        let text = v["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| LlmError::MalformedResponse("missing choices[0].message.content".into()))?;
        Ok(Generation {
            text: text.to_string(),
            prompt_tokens: v["usage"]["prompt_tokens"].as_u64(),
            completion_tokens: v["usage"]["completion_tokens"].as_u64(),
        })
    }

    fn label(&self) -> String {
        self.model.clone()
    }
}
