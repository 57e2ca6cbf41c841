pub mod agent;
pub mod comcheck;
pub mod docparse;
pub mod gbxml;
pub mod llm;
pub mod mcp;
pub mod retrieval;
pub mod rules;
pub mod tools;
