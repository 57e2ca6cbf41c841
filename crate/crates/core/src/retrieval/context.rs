use std::fmt::Write as _;

use super::{ProvisionIndex, RetrievalError, RetrievalResult};
use crate::llm::proxy_tokens;

pub const DEFAULT_K: usize = 4;
/// Whitespace tokens.
pub const DEFAULT_BUDGET: usize = 2048;
pub const NO_PROVISIONS_MARKER: &str = "(no provisions found)";

const HEADER: &str = "Answer the question using only the building code provisions below. \
Cite the section label of every provision you rely on. \
If the provisions do not contain the answer, say so.";

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledContext {
    pub prompt: String,
    /// Provisions included in the prompt, in rank order.
    pub included_ids: Vec<String>,
}

fn block(label: &str, heading: &str, body: &str) -> String {
    if heading.is_empty() {
        format!("[{label}]\n{body}\n")
    } else {
        format!("[{label}] {heading}\n{body}\n")
    }
}

/// Builds the generator prompt: header, provisions in rank order, question.
///
/// `budget` bounds the whitespace-token count of the question plus the
/// included provision blocks; the fixed header is not counted. Provisions are
/// kept whole, and the first one that does not fit ends the list.
pub fn assemble_context(
    results: &[RetrievalResult],
    index: &ProvisionIndex,
    query: &str,
    budget: usize,
) -> Result<AssembledContext, RetrievalError> {
    let needed = proxy_tokens(query) as usize;
    if needed > budget {
        return Err(RetrievalError::BudgetTooSmall { needed, budget });
    }
    let mut used = needed;
    let mut blocks = Vec::new();
    let mut included_ids = Vec::new();
    for r in results {
        let Some(p) = index.provision(&r.provision_id) else { continue };
        let b = block(&p.section_label, &p.heading, &p.body);
        let cost = proxy_tokens(&b) as usize;
        if used + cost > budget {
            break;
        }
        used += cost;
        blocks.push(b);
        included_ids.push(p.id.clone());
    }

    let mut prompt = String::new();
    let _ = writeln!(prompt, "{HEADER}\n");
    let _ = writeln!(prompt, "=== Provisions ===");
    if blocks.is_empty() {
        let _ = writeln!(prompt, "{NO_PROVISIONS_MARKER}");
    } else {
        prompt.push_str(&blocks.join("\n"));
    }
    let _ = write!(prompt, "\n=== Question ===\n{}\n", query.trim());
    Ok(AssembledContext { prompt, included_ids })
}
