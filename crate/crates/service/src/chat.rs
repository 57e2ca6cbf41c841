//! Multi-session compliance chat: each request runs one agent episode with
//! the session's earlier turns as context.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use acr_core::agent::{run_agent_with_history, AgentConfig, AgentError, RunMetrics, Step, StepRole, ToolRegistry};
use acr_core::llm::LlmClient;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    #[serde(default)]
    pub session_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub session_id: String,
    pub output: String,
    pub tools_used: Vec<String>,
    pub chain_log: Vec<Step>,
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatSession {
    pub session_id: String,
    pub history: Vec<Step>,
    pub created_at: DateTime<Utc>,
}

/// A failed chat turn and the HTTP status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatFailure {
    pub status: u16,
    pub error: ServiceError,
}

impl ChatFailure {
    fn new(status: u16, kind: &str, message: impl Into<String>) -> Self {
        Self { status, error: ServiceError::new(kind, message) }
    }
}

/// One journal line per completed turn.
#[derive(Debug, Serialize, Deserialize)]
struct JournalEntry {
    session_id: String,
    created_at: DateTime<Utc>,
    steps: Vec<Step>,
}

type SessionHandle = Arc<Mutex<ChatSession>>;

pub struct ChatService {
    registry: Arc<ToolRegistry>,
    generator: Result<Arc<dyn LlmClient>, ServiceError>,
    config: AgentConfig,
    sessions: Mutex<HashMap<String, SessionHandle>>,
    journal: Option<Mutex<File>>,
}

impl ChatService {
    /// `generator` may be an error; chat turns then fail with 503 while the
    /// health and tool endpoints keep working.
    pub fn new(registry: ToolRegistry, generator: Result<Arc<dyn LlmClient>, ServiceError>, config: AgentConfig) -> Self {
        Self { registry: Arc::new(registry), generator, config, sessions: Mutex::new(HashMap::new()), journal: None }
    }

    /// Replays an existing journal into memory, then appends to it.
    pub fn with_journal(mut self, path: &Path) -> Result<Self, ServiceError> {
        let io_err = |e: std::io::Error| ServiceError::new("JournalIo", format!("{}: {e}", path.display()));
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(io_err)?);
            let mut sessions = self.sessions.lock().unwrap();
            for (n, line) in reader.lines().enumerate() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: JournalEntry = serde_json::from_str(&line).map_err(|e| {
                    ServiceError::new("JournalFormat", format!("{} line {}: {e}", path.display(), n + 1))
                })?;
                let handle = sessions.entry(entry.session_id.clone()).or_insert_with(|| {
                    Arc::new(Mutex::new(ChatSession {
                        session_id: entry.session_id.clone(),
                        history: Vec::new(),
                        created_at: entry.created_at,
                    }))
                });
                handle.lock().unwrap().history.extend(entry.steps);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
        self.journal = Some(Mutex::new(file));
        Ok(self)
    }

    pub fn registry(&self) -> &ToolRegistry {
        &self.registry
    }

    pub fn generator_available(&self) -> bool {
        self.generator.is_ok()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn session(&self, id: &str) -> Option<ChatSession> {
        let handle = self.sessions.lock().unwrap().get(id).cloned()?;
        let s = handle.lock().unwrap().clone();
        Some(s)
    }

    fn session_for(&self, requested: Option<&str>) -> SessionHandle {
        let mut sessions = self.sessions.lock().unwrap();
        if let Some(h) = requested.and_then(|id| sessions.get(id)) {
            return h.clone();
        }
        // Unknown or absent ids get a fresh server-issued id.
        let id = loop {
            let candidate = uuid::Uuid::new_v4().to_string();
            if !sessions.contains_key(&candidate) {
                break candidate;
            }
        };
        let handle = Arc::new(Mutex::new(ChatSession { session_id: id.clone(), history: Vec::new(), created_at: Utc::now() }));
        sessions.insert(id, handle.clone());
        handle
    }

    /// Runs one turn. Blocking: call from a worker thread in async contexts.
    pub fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ChatFailure> {
        if request.message.trim().is_empty() {
            return Err(ChatFailure::new(400, "BadRequest", "message must not be empty"));
        }
        let llm = match &self.generator {
            Ok(llm) => llm.clone(),
            Err(e) => return Err(ChatFailure { status: 503, error: e.clone() }),
        };
        let handle = self.session_for(request.session_id.as_deref());
        // Held for the whole episode so turns within one session serialize.
        let mut session = handle.lock().unwrap();
        let run = run_agent_with_history(&self.registry, llm.as_ref(), &session.history, &request.message, &self.config)
            .map_err(|e| {
                let status = match &e {
                    AgentError::Generator { .. } if e.kind() == "GeneratorUnavailable" => 503,
                    _ => 500,
                };
                ChatFailure::new(status, e.kind(), e.to_string())
            })?;
        let chain_log: Vec<Step> = run.transcript.steps.iter().filter(|s| s.role != StepRole::System).cloned().collect();
        self.append_journal(&session, &chain_log)?;
        session.history.extend(chain_log.iter().cloned());
        Ok(ChatResponse {
            session_id: session.session_id.clone(),
            output: run.output,
            tools_used: run.tools_used,
            chain_log,
            metrics: run.transcript.metrics,
        })
    }

    fn append_journal(&self, session: &ChatSession, steps: &[Step]) -> Result<(), ChatFailure> {
        let Some(journal) = &self.journal else { return Ok(()) };
        let entry = JournalEntry { session_id: session.session_id.clone(), created_at: session.created_at, steps: steps.to_vec() };
        let mut line = serde_json::to_string(&entry).expect("journal entry serializes");
        line.push('\n');
        let mut file = journal.lock().unwrap();
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| ChatFailure::new(500, "JournalIo", e.to_string()))
    }
}

