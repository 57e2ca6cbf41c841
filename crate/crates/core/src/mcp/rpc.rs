use serde::Serialize;
use serde_json::{json, Value};

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;
pub const INTERNAL_ERROR: i64 = -32603;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum RpcId {
    Number(i64),
    Text(String),
    Null,
}

impl RpcId {
    /// Integers and strings only; null, fractions and structures are rejected.
    pub fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => Some(RpcId::Text(s.clone())),
            Value::Number(n) => n.as_i64().map(RpcId::Number),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RpcError {
    pub code: i64,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl RpcError {
    pub fn new(code: i64, message: &str, data: Option<Value>) -> Self {
        Self { code, message: message.to_string(), data }
    }

    pub fn invalid_request(detail: &str) -> Self {
        Self::new(INVALID_REQUEST, "Invalid Request", Some(json!(detail)))
    }

    pub fn invalid_params(detail: &str) -> Self {
        Self::new(INVALID_PARAMS, "Invalid params", Some(json!(detail)))
    }
}

/// Exactly one of `result` or `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RpcResponse {
    pub jsonrpc: &'static str,
    pub id: RpcId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<RpcError>,
}

impl RpcResponse {
    pub fn result(id: RpcId, result: Value) -> Self {
        Self { jsonrpc: "2.0", id, result: Some(result), error: None }
    }

    pub fn error(id: RpcId, error: RpcError) -> Self {
        Self { jsonrpc: "2.0", id, result: None, error: Some(error) }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("response serializes")
    }
}
