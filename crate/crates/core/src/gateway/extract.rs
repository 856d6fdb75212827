use alloc::string::String;
use alloc::vec::Vec;

use regex_automata::meta::Regex;
use regex_automata::{Anchored, Input};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no SPARQL query found in the response")]
pub struct NoQueryFound;

/// Every query in a response: the contents of all fenced code blocks, or
/// failing that, the text from the first query keyword on.
pub fn extract_queries(raw: &str) -> Vec<String> {
    let blocks = fenced_blocks(raw);
    if !blocks.is_empty() {
        return blocks;
    }
    bare_query(raw).into_iter().collect()
}

/// The query in a response: the first fenced block, or the bare query text.
pub fn extract_query(raw: &str) -> Result<String, NoQueryFound> {
    extract_queries(raw).into_iter().next().ok_or(NoQueryFound)
}

fn fenced_blocks(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = raw;
    while let Some(start) = rest.find("```") {
        let after = &rest[start + 3..];
        // The info string (e.g. `sparql`) runs to the end of the line.
        let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
        let body = &after[body_start..];
        let (content, next) = match body.find("```") {
            Some(end) => (&body[..end], &body[end + 3..]),
            None => (body, ""),
        };
        let content = content.trim();
        if !content.is_empty() {
            out.push(String::from(content));
        }
        rest = next;
    }
    out
}

fn bare_query(raw: &str) -> Option<String> {
    let keyword = Regex::new(r"(?i)\b(PREFIX|SELECT|ASK)\b").ok()?;
    let start = keyword.find(raw)?.start();
    let text = &raw[start..];
    let Some(close) = text.rfind('}') else {
        return Some(String::from(text.trim()));
    };
    let tail = &text[close + 1..];
    let modifiers = Regex::new(
        r"(?i)^(\s*(ORDER\s+BY(\s*(ASC|DESC)\s*\([^)]*\)|\s*\?\w+|\s*\([^)]*\))+|LIMIT\s+\d+|OFFSET\s+\d+))*",
    )
    .ok()?;
    let keep = modifiers
        .find(Input::new(tail).anchored(Anchored::Yes))
        .map_or(0, |m| m.end());
    Some(String::from(text[..close + 1 + keep].trim()))
}
