use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::directive::{parse_directive, ParsedDirective};
use super::registry::{InvokeError, ToolRegistry};
use super::AgentError;
use crate::llm::{proxy_tokens, GenerationParams, LlmClient, Message};

/// The tool-caller system prompt, version 1.
pub const AGENT_SYSTEM_PROMPT: &str = include_str!("../../prompts/agent_system_v1.txt");
pub const DEFAULT_MAX_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRole {
    System,
    User,
    Assistant,
    Observation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub role: StepRole,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenSource {
    Provider,
    #[default]
    WhitespaceProxy,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMetrics {
    pub wall_time_ms: f64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    /// `whitespace_proxy` when any turn lacked provider usage data.
    pub token_source: TokenSource,
    pub llm_turns: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub steps: Vec<Step>,
    pub tools_used: Vec<String>,
    pub metrics: RunMetrics,
}

impl Transcript {
    fn push(&mut self, role: StepRole, text: impl Into<String>) {
        self.steps.push(Step { role, text: text.into() });
    }

    /// Every observation directly follows an assistant step that parses as an
    /// action.
    pub fn is_well_formed(&self) -> bool {
        self.steps.iter().enumerate().all(|(i, s)| {
            s.role != StepRole::Observation
                || (i > 0
                    && self.steps[i - 1].role == StepRole::Assistant
                    && matches!(parse_directive(&self.steps[i - 1].text), ParsedDirective::Action { .. }))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRun {
    pub input: String,
    pub output: String,
    pub tools_used: Vec<String>,
    pub transcript: Transcript,
}

#[derive(Debug, Clone)]
pub struct AgentConfig {
    pub max_steps: usize,
    pub params: GenerationParams,
    pub system_prompt: String,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            params: GenerationParams::default(),
            system_prompt: AGENT_SYSTEM_PROMPT.trim_end().to_string(),
        }
    }
}

fn tool_catalog(registry: &ToolRegistry) -> String {
    let mut out = String::from("Available tools:\n");
    for name in registry.names() {
        let spec = registry.get(name).unwrap();
        let fields: Vec<String> = spec
            .input_schema
            .iter()
            .map(|f| format!("{} ({:?}{})", f.name, f.kind, if f.required { "" } else { ", optional" }).to_lowercase())
            .collect();
        let _ = writeln!(out, "- {}: {} Input: {}", spec.name, spec.description, fields.join(", "));
    }
    out.push_str("Write Action Input as key=value pairs separated by commas, or a JSON object.");
    out
}

fn to_messages(steps: &[Step]) -> Vec<Message> {
    steps
        .iter()
        .map(|s| match s.role {
            StepRole::System => Message::system(s.text.clone()),
            StepRole::User => Message::user(s.text.clone()),
            StepRole::Assistant => Message::assistant(s.text.clone()),
            StepRole::Observation => Message::user(format!("Observation: {}", s.text)),
        })
        .collect()
}

pub fn run_agent(
    registry: &ToolRegistry,
    llm: &dyn LlmClient,
    query: &str,
    config: &AgentConfig,
) -> Result<AgentRun, AgentError> {
    run_agent_with_history(registry, llm, &[], query, config)
}

/// Runs one episode. `history` holds earlier non-system steps of the same
/// conversation and is replayed before the new query.
pub fn run_agent_with_history(
    registry: &ToolRegistry,
    llm: &dyn LlmClient,
    history: &[Step],
    query: &str,
    config: &AgentConfig,
) -> Result<AgentRun, AgentError> {
    if config.max_steps == 0 {
        return Err(AgentError::InvalidConfig("max_steps must be at least 1".into()));
    }
    let started = Instant::now();
    let mut t = Transcript::default();
    t.push(StepRole::System, config.system_prompt.clone());
    t.push(StepRole::System, tool_catalog(registry));
    let prefix_len = t.steps.len();
    t.steps.extend(history.iter().filter(|s| s.role != StepRole::System).cloned());
    let episode_start = t.steps.len();
    t.push(StepRole::User, query);

    let mut all_from_provider = true;
    let mut invalid_streak = 0;
    let finish = |mut t: Transcript, provider: bool| {
        t.metrics.wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;
        t.metrics.token_source = if provider { TokenSource::Provider } else { TokenSource::WhitespaceProxy };
        // Only this episode's steps are reported; the caller owns the history.
        let mut steps = t.steps[..prefix_len].to_vec();
        steps.extend_from_slice(&t.steps[episode_start..]);
        t.steps = steps;
        t
    };

    for _ in 0..config.max_steps {
        let messages = to_messages(&t.steps);
        let generation = match llm.generate(&messages, &config.params) {
            Ok(g) => g,
            Err(e) => {
                return Err(AgentError::Generator { error: e, transcript: Box::new(finish(t, all_from_provider)) })
            }
        };
        t.metrics.llm_turns += 1;
        match (generation.prompt_tokens, generation.completion_tokens) {
            (Some(p), Some(c)) => {
                t.metrics.prompt_tokens += p;
                t.metrics.completion_tokens += c;
            }
            _ => {
                all_from_provider = false;
                t.metrics.prompt_tokens += messages.iter().map(|m| proxy_tokens(&m.content)).sum::<u64>();
                t.metrics.completion_tokens += proxy_tokens(&generation.text);
            }
        }
        t.push(StepRole::Assistant, generation.text.clone());

        match parse_directive(&generation.text) {
            ParsedDirective::FinalAnswer { text } => {
                let tools_used = t.tools_used.clone();
                return Ok(AgentRun {
                    input: query.to_string(),
                    output: text,
                    tools_used,
                    transcript: finish(t, all_from_provider),
                });
            }
            ParsedDirective::Invalid { reason } => {
                invalid_streak += 1;
                if invalid_streak >= 2 {
                    return Err(AgentError::RepeatedInvalidDirective {
                        reason,
                        transcript: Box::new(finish(t, all_from_provider)),
                    });
                }
                t.push(
                    StepRole::User,
                    format!(
                        "Your last reply was not a valid directive ({reason}). Reply with either \
                         'Action:' and 'Action Input:' lines, or 'Final Answer:'."
                    ),
                );
            }
            ParsedDirective::Action { tool_name, input_text } => {
                invalid_streak = 0;
                let observation = observe(registry, &tool_name, &input_text, &mut t.tools_used);
                t.push(StepRole::Observation, observation);
            }
        }
    }
    Err(AgentError::MaxStepsExceeded {
        max_steps: config.max_steps,
        transcript: Box::new(finish(t, all_from_provider)),
    })
}

/// Runs the named tool and returns the text the model will see. Only text
/// produced by a handler, or a description of why none ran, is returned.
fn observe(registry: &ToolRegistry, tool_name: &str, input_text: &str, tools_used: &mut Vec<String>) -> String {
    let Some(spec) = registry.get(tool_name) else {
        let names: Vec<&str> = registry.names().collect();
        return format!("unknown tool '{tool_name}'. Available tools: {}", names.join(", "));
    };
    let args = match spec.parse_action_input(input_text) {
        Ok(a) => a,
        Err(e) => return format!("Error: invalid arguments for {tool_name}: {e}"),
    };
    match registry.invoke(tool_name, &args) {
        Ok(outcome) => {
            tools_used.push(tool_name.to_string());
            match outcome {
                Ok(out) => out.text,
                Err(fault) => format!("Error: {fault}"),
            }
        }
        Err(InvokeError::InvalidArguments(e)) => format!("Error: invalid arguments for {tool_name}: {e}"),
        Err(e @ InvokeError::UnknownTool(_)) => e.to_string(),
    }
}
