//! ReAct-style tool calling: the Action / Final Answer directive grammar, a
//! tool registry, and the episode loop.

mod directive;
mod registry;
mod runner;

pub use directive::{parse_directive, ParsedDirective};
pub use registry::{
    FieldKind, FieldSpec, InvokeError, SchemaViolation, ToolArgs, ToolDescriptor, ToolFault, ToolHandler,
    ToolOutcome, ToolOutput, ToolRegistry, ToolSpec,
};
pub use runner::{
    run_agent, run_agent_with_history, AgentConfig, AgentRun, RunMetrics, Step, StepRole, TokenSource, Transcript,
    AGENT_SYSTEM_PROMPT, DEFAULT_MAX_STEPS,
};

use crate::llm::LlmError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("DuplicateTool: a tool named '{0}' is already registered")]
    DuplicateTool(String),
    #[error("MaxStepsExceeded: no final answer within {max_steps} steps")]
    MaxStepsExceeded { max_steps: usize, transcript: Box<Transcript> },
    #[error("RepeatedInvalidDirective: two consecutive invalid replies (last: {reason})")]
    RepeatedInvalidDirective { reason: String, transcript: Box<Transcript> },
    #[error("{error}")]
    Generator { error: LlmError, transcript: Box<Transcript> },
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

impl AgentError {
    pub fn kind(&self) -> &'static str {
        match self {
            AgentError::DuplicateTool(_) => "DuplicateTool",
            AgentError::MaxStepsExceeded { .. } => "MaxStepsExceeded",
            AgentError::RepeatedInvalidDirective { .. } => "RepeatedInvalidDirective",
            AgentError::Generator { error: LlmError::Unavailable(_), .. } => "GeneratorUnavailable",
            AgentError::Generator { .. } => "GeneratorError",
            AgentError::InvalidConfig(_) => "InvalidConfig",
        }
    }

    pub fn transcript(&self) -> Option<&Transcript> {
        match self {
            AgentError::MaxStepsExceeded { transcript, .. }
            | AgentError::RepeatedInvalidDirective { transcript, .. }
            | AgentError::Generator { transcript, .. } => Some(transcript),
            _ => None,
        }
    }
}
