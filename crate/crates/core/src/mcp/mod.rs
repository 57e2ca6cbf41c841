//! Model Context Protocol server over newline-delimited JSON-RPC 2.0.
//!
//! One message per line on the input stream, one response line per
//! id-bearing request on the output stream, in arrival order. Notifications
//! get no response. Nothing but protocol frames is ever written to the output;
//! diagnostics go through `log`. Handlers run on the request loop, so a slow
//! tool blocks the session.

mod rpc;

pub use rpc::{RpcError, RpcId, RpcResponse, INTERNAL_ERROR, INVALID_PARAMS, INVALID_REQUEST, METHOD_NOT_FOUND, PARSE_ERROR};

use std::io::{self, BufRead, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::{json, Map, Value};

use crate::agent::{InvokeError, ToolRegistry};

pub const SERVER_NAME: &str = "acr-mcp";
pub const DEFAULT_PROTOCOL_VERSION: &str = "2024-11-05";

pub struct McpServer {
    registry: ToolRegistry,
    initialized: bool,
}

impl McpServer {
    pub fn new(registry: ToolRegistry) -> Self {
        Self { registry, initialized: false }
    }

    pub fn registry(&self) -> &ToolRegistry {
        &self.registry
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }

    /// Reads until end of input. Blank lines are skipped.
    pub fn serve<R: BufRead, W: Write>(&mut self, input: R, mut output: W) -> io::Result<()> {
        for line in input.lines() {
            let line = line?;
            if let Some(resp) = self.handle_line(&line) {
                output.write_all(resp.as_bytes())?;
                output.write_all(b"\n")?;
                output.flush()?;
            }
        }
        log::debug!("input closed; MCP session ends");
        Ok(())
    }

    /// Handles one input line and returns the serialized response, if any.
    pub fn handle_line(&mut self, line: &str) -> Option<String> {
        if line.trim().is_empty() {
            return None;
        }
        self.handle_text(line).map(|r| r.to_line())
    }

    fn handle_text(&mut self, text: &str) -> Option<RpcResponse> {
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                log::warn!("unparseable message: {e}");
                return Some(RpcResponse::error(RpcId::Null, RpcError::new(PARSE_ERROR, "Parse error", None)));
            }
        };
        let Value::Object(msg) = value else {
            let detail = if value.is_array() { "batch requests are not supported" } else { "request must be an object" };
            return Some(RpcResponse::error(RpcId::Null, RpcError::invalid_request(detail)));
        };
        let id = match msg.get("id") {
            None => None,
            Some(raw) => match RpcId::from_value(raw) {
                Some(id) => Some(id),
                None => return Some(RpcResponse::error(RpcId::Null, RpcError::invalid_request("id must be a string or an integer"))),
            },
        };
        let reply_id = id.clone().unwrap_or(RpcId::Null);
        if msg.get("jsonrpc").and_then(Value::as_str) != Some("2.0") {
            return Some(RpcResponse::error(reply_id, RpcError::invalid_request("jsonrpc must be \"2.0\"")));
        }
        let Some(method) = msg.get("method").and_then(Value::as_str) else {
            return Some(RpcResponse::error(reply_id, RpcError::invalid_request("method must be a string")));
        };
        let params = msg.get("params").cloned().unwrap_or(Value::Null);
        let outcome = self.dispatch(method, &params, id.is_none());
        match id {
            // Notifications never get a reply, not even an error.
            None => {
                if let Err(e) = outcome {
                    log::debug!("notification {method} failed: {}", e.message);
                }
                None
            }
            Some(id) => Some(match outcome {
                Ok(result) => RpcResponse::result(id, result),
                Err(e) => RpcResponse::error(id, e),
            }),
        }
    }

    fn dispatch(&mut self, method: &str, params: &Value, notification: bool) -> Result<Value, RpcError> {
        match method {
            "initialize" => self.initialize(params),
            "ping" => Ok(json!({})),
            "notifications/initialized" | "notifications/cancelled" if notification => Ok(Value::Null),
            "tools/list" => {
                self.require_initialized()?;
                Ok(json!({ "tools": self.registry.descriptors() }))
            }
            "tools/call" => {
                self.require_initialized()?;
                self.call_tool(params)
            }
            other => Err(RpcError::new(METHOD_NOT_FOUND, "Method not found", Some(json!(other)))),
        }
    }

    fn require_initialized(&self) -> Result<(), RpcError> {
        if self.initialized {
            Ok(())
        } else {
            Err(RpcError::invalid_request("not initialized"))
        }
    }

    fn initialize(&mut self, params: &Value) -> Result<Value, RpcError> {
        if self.initialized {
            return Err(RpcError::invalid_request("already initialized"));
        }
        let protocol = params
            .get("protocolVersion")
            .and_then(Value::as_str)
            .unwrap_or(DEFAULT_PROTOCOL_VERSION);
        self.initialized = true;
        Ok(json!({
            "protocolVersion": protocol,
            "capabilities": { "tools": { "listChanged": false } },
            "serverInfo": { "name": SERVER_NAME, "version": env!("CARGO_PKG_VERSION") },
        }))
    }

    fn call_tool(&self, params: &Value) -> Result<Value, RpcError> {
        let name = params
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| RpcError::invalid_params("params.name must be a string"))?;
        let args = match params.get("arguments") {
            None | Some(Value::Null) => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(RpcError::invalid_params("params.arguments must be an object")),
        };
        let invoked = catch_unwind(AssertUnwindSafe(|| self.registry.invoke(name, &args)))
            .map_err(|_| RpcError::new(INTERNAL_ERROR, "Internal error", Some(json!(format!("tool '{name}' panicked")))))?;
        match invoked {
            Ok(Ok(out)) => Ok(tool_result(&out.text, false)),
            Ok(Err(fault)) => Ok(tool_result(&fault.to_string(), true)),
            Err(InvokeError::UnknownTool(_)) => {
                Err(RpcError::new(INVALID_PARAMS, &format!("Unknown tool: {name}"), Some(json!("unknown tool"))))
            }
            Err(InvokeError::InvalidArguments(v)) => Err(RpcError::invalid_params(&v.to_string())),
        }
    }
}

fn tool_result(text: &str, is_error: bool) -> Value {
    json!({ "content": [{ "type": "text", "text": text }], "isError": is_error })
}
