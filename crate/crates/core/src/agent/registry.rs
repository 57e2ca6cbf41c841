use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::AgentError;

pub type ToolArgs = Map<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    String,
    Number,
    Integer,
    Boolean,
}

impl FieldKind {
    fn json_type(self) -> &'static str {
        match self {
            FieldKind::String => "string",
            FieldKind::Number => "number",
            FieldKind::Integer => "integer",
            FieldKind::Boolean => "boolean",
        }
    }

    fn accepts(self, v: &Value) -> bool {
        match self {
            FieldKind::String => v.is_string(),
            FieldKind::Number => v.is_number(),
            FieldKind::Integer => v.is_i64() || v.is_u64(),
            FieldKind::Boolean => v.is_boolean(),
        }
    }

    /// Converts a text token into a value of this kind.
    fn coerce(self, text: &str) -> Option<Value> {
        let t = text.trim();
        match self {
            FieldKind::String => Some(Value::String(t.to_string())),
            FieldKind::Number => t.replace(',', "").parse::<f64>().ok().and_then(|f| serde_json::Number::from_f64(f).map(Value::Number)),
            FieldKind::Integer => t.replace(',', "").parse::<i64>().ok().map(Value::from),
            FieldKind::Boolean => match t.to_ascii_lowercase().as_str() {
                "true" | "yes" => Some(Value::Bool(true)),
                "false" | "no" => Some(Value::Bool(false)),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    pub kind: FieldKind,
    pub required: bool,
    pub description: String,
}

impl FieldSpec {
    pub fn required(name: &str, kind: FieldKind, description: &str) -> Self {
        Self { name: name.into(), kind, required: true, description: description.into() }
    }

    pub fn optional(name: &str, kind: FieldKind, description: &str) -> Self {
        Self { name: name.into(), kind, required: false, description: description.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolOutput {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structured: Option<Value>,
}

impl ToolOutput {
    pub fn text(text: impl Into<String>) -> Self {
        Self { text: text.into(), structured: None }
    }

    pub fn with_structured(text: impl Into<String>, structured: Value) -> Self {
        Self { text: text.into(), structured: Some(structured) }
    }
}

/// A tool-level failure. It is reported back to the caller as content, not as
/// a protocol or agent error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolFault {
    pub kind: String,
    pub message: String,
}

impl ToolFault {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Self { kind: kind.into(), message: message.into() }
    }
}

impl fmt::Display for ToolFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Error messages in this crate already lead with their kind.
        if self.message.starts_with(&self.kind) {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.kind, self.message)
        }
    }
}

pub type ToolOutcome = Result<ToolOutput, ToolFault>;
pub type ToolHandler = Arc<dyn Fn(&ToolArgs) -> ToolOutcome + Send + Sync>;

#[derive(Clone)]
pub struct ToolSpec {
    pub name: String,
    pub description: String,
    pub input_schema: Vec<FieldSpec>,
    pub handler: ToolHandler,
}

impl fmt::Debug for ToolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ToolSpec")
            .field("name", &self.name)
            .field("input_schema", &self.input_schema)
            .finish_non_exhaustive()
    }
}

/// MCP-shaped tool descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    #[serde(rename = "inputSchema")]
    pub input_schema: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaViolation {
    #[error("missing required field '{0}'")]
    Missing(String),
    #[error("field '{field}' must be of type {expected}")]
    WrongType { field: String, expected: &'static str },
    #[error("unexpected field '{0}'")]
    Unexpected(String),
    #[error("{0}")]
    Unparseable(String),
}

impl ToolSpec {
    pub fn new<F>(name: &str, description: &str, input_schema: Vec<FieldSpec>, handler: F) -> Self
    where
        F: Fn(&ToolArgs) -> ToolOutcome + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            description: description.into(),
            input_schema,
            handler: Arc::new(handler),
        }
    }

    pub fn descriptor(&self) -> ToolDescriptor {
        let mut properties = Map::new();
        for f in &self.input_schema {
            properties.insert(
                f.name.clone(),
                serde_json::json!({ "type": f.kind.json_type(), "description": f.description }),
            );
        }
        let required: Vec<Value> = self
            .input_schema
            .iter()
            .filter(|f| f.required)
            .map(|f| Value::String(f.name.clone()))
            .collect();
        ToolDescriptor {
            name: self.name.clone(),
            description: self.description.clone(),
            input_schema: serde_json::json!({
                "type": "object",
                "properties": properties,
                "required": required,
            }),
        }
    }

    pub fn validate(&self, args: &ToolArgs) -> Result<(), SchemaViolation> {
        for f in &self.input_schema {
            match args.get(&f.name) {
                None | Some(Value::Null) if f.required => return Err(SchemaViolation::Missing(f.name.clone())),
                None | Some(Value::Null) => {}
                Some(v) if !f.kind.accepts(v) => {
                    return Err(SchemaViolation::WrongType { field: f.name.clone(), expected: f.kind.json_type() })
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = args.keys().find(|k| !self.input_schema.iter().any(|f| &f.name == *k)) {
            return Err(SchemaViolation::Unexpected(extra.clone()));
        }
        Ok(())
    }

    /// Turns an agent's free-text `Action Input` into arguments.
    ///
    /// Accepted forms: a JSON object; `key=value` pairs separated by commas,
    /// semicolons or newlines; or, for tools with a single required field, the
    /// bare value. Text values are coerced to the declared field kinds.
    pub fn parse_action_input(&self, text: &str) -> Result<ToolArgs, SchemaViolation> {
        let t = text.trim();
        let mut args = if t.starts_with('{') {
            match serde_json::from_str::<Value>(t) {
                Ok(Value::Object(m)) => m,
                _ => return Err(SchemaViolation::Unparseable("Action Input is not a valid JSON object".into())),
            }
        } else if looks_like_pairs(t) {
            let mut m = Map::new();
            for part in t.split([',', ';', '\n']).map(str::trim).filter(|p| !p.is_empty()) {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| SchemaViolation::Unparseable(format!("expected key=value, got '{part}'")))?;
                m.insert(k.trim().to_string(), Value::String(unquote(v.trim()).to_string()));
            }
            m
        } else {
            let required: Vec<&FieldSpec> = self.input_schema.iter().filter(|f| f.required).collect();
            let target = match (required.as_slice(), self.input_schema.as_slice()) {
                ([only], _) => *only,
                ([], [only]) => only,
                _ => {
                    let names: Vec<&str> = self.input_schema.iter().map(|f| f.name.as_str()).collect();
                    return Err(SchemaViolation::Unparseable(format!(
                        "expected key=value pairs for fields: {}",
                        names.join(", ")
                    )));
                }
            };
            let mut m = Map::new();
            m.insert(target.name.clone(), Value::String(unquote(t).to_string()));
            m
        };
        for f in &self.input_schema {
            if let Some(Value::String(s)) = args.get(&f.name) {
                if f.kind != FieldKind::String {
                    let coerced = f.kind.coerce(s).ok_or_else(|| SchemaViolation::WrongType {
                        field: f.name.clone(),
                        expected: f.kind.json_type(),
                    })?;
                    args.insert(f.name.clone(), coerced);
                }
            }
        }
        Ok(args)
    }
}

fn looks_like_pairs(t: &str) -> bool {
    let head = t.split([',', ';', '\n']).next().unwrap_or("");
    match head.split_once('=') {
        Some((k, _)) => {
            let k = k.trim();
            !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        None => false,
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['"', '\'', '`'] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InvokeError {
    #[error("unknown tool '{0}'")]
    UnknownTool(String),
    #[error("invalid arguments: {0}")]
    InvalidArguments(#[from] SchemaViolation),
}

/// Named tools. Immutable once shared; cloning is cheap.
#[derive(Debug, Clone, Default)]
pub struct ToolRegistry {
    tools: BTreeMap<String, ToolSpec>,
}

impl ToolRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, spec: ToolSpec) -> Result<(), AgentError> {
        if self.tools.contains_key(&spec.name) {
            return Err(AgentError::DuplicateTool(spec.name));
        }
        self.tools.insert(spec.name.clone(), spec);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ToolSpec> {
        self.tools.get(name)
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tools.keys().map(String::as_str)
    }

    /// Descriptors sorted by name.
    pub fn descriptors(&self) -> Vec<ToolDescriptor> {
        self.tools.values().map(ToolSpec::descriptor).collect()
    }

    /// Validates `args` and runs the handler.
    pub fn invoke(&self, name: &str, args: &ToolArgs) -> Result<ToolOutcome, InvokeError> {
        let spec = self.get(name).ok_or_else(|| InvokeError::UnknownTool(name.to_string()))?;
        spec.validate(args)?;
        Ok((spec.handler)(args))
    }
}
