use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Version tag of the system instruction template; reports record it.
pub const TEMPLATE_VERSION: &str = "odp-sparql-v1";

const ROLE: &str = "You translate questions about an industrial ontology into SPARQL queries.";

const OUTPUT_RULES: &str = "\
Output exactly one SPARQL query in a fenced code block (```sparql ... ```).
If the question asks for two separate things, output one fenced block per part, in the order asked.
Do not add explanations inside the code blocks.";

const SUBSET_RULES: &str = "\
Use only this SPARQL subset: PREFIX declarations, SELECT [DISTINCT] with variables or a single \
(COUNT([DISTINCT] ?var|*) AS ?alias), ASK, triple patterns with ';' and ',' abbreviations, FILTER \
(comparisons, &&, ||, !, regex, str, lang, lcase, ucase, contains, strstarts, strends, bound, isIRI, \
isLiteral, isBlank), OPTIONAL, UNION, ORDER BY [ASC|DESC], LIMIT and OFFSET.
Not supported: property paths, subqueries, GROUP BY, HAVING, BIND, VALUES, MINUS, arithmetic, blank nodes in patterns.
Declare every prefix you use.
The ontology below is the schema only. Instance data is not shown: refer to individuals through \
their labels, names or data values mentioned in the question, never by guessing their IRIs.";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the question is empty")]
pub struct EmptyQuestion;

/// The previous attempt and why it was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairNote {
    pub previous_query: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PromptOptions {
    /// Prefix table offered to the model; usually the TBox prefixes.
    pub prefixes: BTreeMap<String, String>,
    pub repair: Option<RepairNote>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub template_version: String,
    pub system_instructions: String,
    pub tbox_text: String,
    pub question: String,
    pub repair: Option<RepairNote>,
}

impl PromptBundle {
    /// Chat messages as `(role, content)` pairs.
    pub fn messages(&self) -> Vec<(&'static str, String)> {
        let mut user = String::new();
        user.push_str("Ontology (Turtle):\n\n");
        user.push_str(&self.tbox_text);
        if !self.tbox_text.ends_with('\n') {
            user.push('\n');
        }
        user.push_str("\nQuestion: ");
        user.push_str(&self.question);
        user.push('\n');
        let mut messages = alloc::vec![("system", self.system_instructions.clone()), ("user", user)];
        if let Some(repair) = &self.repair {
            let mut fix = String::from("Your previous query was:\n```sparql\n");
            fix.push_str(repair.previous_query.trim_end());
            fix.push_str("\n```\nIt was rejected by the SPARQL parser: ");
            fix.push_str(&repair.error);
            fix.push_str("\nReturn a corrected query following the rules above.\n");
            messages.push(("user", fix));
        }
        messages
    }

    /// The exact byte stream handed to a provider.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (role, content) in self.messages() {
            let _ = write!(out, "### {role}\n{content}");
            if !content.ends_with('\n') {
                out.push('\n');
            }
        }
        out
    }

    pub fn hash(&self) -> String {
        prompt_hash(&self.render())
    }
}

/// Lower-case hex SHA-256 of the rendered prompt.
pub fn prompt_hash(rendered: &str) -> String {
    let digest = Sha256::digest(rendered.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

pub fn assemble_prompt(tbox_text: &str, question: &str, options: &PromptOptions) -> Result<PromptBundle, EmptyQuestion> {
    if question.trim().is_empty() {
        return Err(EmptyQuestion);
    }
    let mut system = String::new();
    system.push_str(ROLE);
    system.push_str("\n\n");
    system.push_str(OUTPUT_RULES);
    system.push_str("\n\n");
    system.push_str(SUBSET_RULES);
    system.push('\n');
    if !options.prefixes.is_empty() {
        system.push_str("\nPrefixes:\n");
        for (prefix, ns) in &options.prefixes {
            let _ = writeln!(system, "PREFIX {prefix}: <{ns}>");
        }
    }
    Ok(PromptBundle {
        template_version: String::from(TEMPLATE_VERSION),
        system_instructions: system,
        tbox_text: String::from(tbox_text),
        question: String::from(question),
        repair: options.repair.clone(),
    })
}
