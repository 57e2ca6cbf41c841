//! Feeds a JSON-lines MCP session from stdin through a local-mode server.
use std::sync::Arc;

use acr_core::comcheck::ComcheckClient;
use acr_core::mcp::McpServer;
use acr_core::rules::LpdCatalog;
use acr_core::tools::{build_registry, ToolEnvironment};

fn main() -> std::io::Result<()> {
    let env = ToolEnvironment::new(Arc::new(ComcheckClient::local(Arc::new(LpdCatalog::builtin()))));
    McpServer::new(build_registry(&env)).serve(std::io::stdin().lock(), std::io::stdout().lock())
}
