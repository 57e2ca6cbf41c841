use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

static ACTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^[ \t]*action[ \t]*:").unwrap());
static ACTION_INPUT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?im)^[ \t]*action[ \t_]+input[ \t]*:").unwrap());
static FINAL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)final[ \t]+answer[ \t]*:").unwrap());

/// One assistant turn, classified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParsedDirective {
    Action { tool_name: String, input_text: String },
    FinalAnswer { text: String },
    Invalid { reason: String },
}

impl ParsedDirective {
    fn invalid(reason: &str) -> Self {
        ParsedDirective::Invalid { reason: reason.to_string() }
    }
}

fn strip_wrapping(s: &str) -> &str {
    let s = s.trim();
    for (open, close) in [("`", "`"), ("\"", "\""), ("'", "'")] {
        if s.len() >= 2 && s.starts_with(open) && s.ends_with(close) {
            return s[open.len()..s.len() - close.len()].trim();
        }
    }
    s
}

/// Classifies assistant text as an action, a final answer, or invalid.
///
/// Text before the first directive marker is free reasoning and ignored. A
/// turn holding both an `Action:` line and a `Final Answer:` marker is
/// invalid.
pub fn parse_directive(assistant_text: &str) -> ParsedDirective {
    let text = assistant_text.replace("\r\n", "\n");
    let action = ACTION.find(&text);
    let final_answer = FINAL.find(&text);

    match (action, final_answer) {
        (Some(_), Some(_)) => ParsedDirective::invalid("both action and final answer"),
        (None, None) => {
            if ACTION_INPUT.is_match(&text) {
                ParsedDirective::invalid("action input without action")
            } else {
                ParsedDirective::invalid("no directive")
            }
        }
        (None, Some(m)) => {
            let answer = text[m.end()..].trim();
            if answer.is_empty() {
                ParsedDirective::invalid("empty final answer")
            } else {
                ParsedDirective::FinalAnswer { text: answer.to_string() }
            }
        }
        (Some(a), None) => {
            let after = &text[a.end()..];
            let name_line = after.split('\n').next().unwrap_or("");
            let tool_name = strip_wrapping(name_line).to_string();
            if tool_name.is_empty() {
                return ParsedDirective::invalid("empty tool name");
            }
            if ACTION.find_iter(&text).count() > 1 {
                return ParsedDirective::invalid("more than one action");
            }
            let Some(input) = ACTION_INPUT.find_at(&text, a.end()) else {
                return ParsedDirective::invalid("action without action input");
            };
            ParsedDirective::Action {
                tool_name,
                input_text: strip_wrapping(&text[input.end()..]).to_string(),
            }
        }
    }
}
