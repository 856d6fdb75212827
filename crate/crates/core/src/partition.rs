//! TBox/ABox separation and comment handling for prompt rendering.
//!
//! The split is syntactic: a subject belongs to the schema when it is typed
//! as an OWL class or property, or when it is the subject of a
//! `rdfs:subClassOf`, `rdfs:domain` or `rdfs:range` statement. The ontology
//! header (subject typed `owl:Ontology`) also goes to the TBox, as do blank
//! nodes reachable from TBox triples. Everything else is ABox, so unclassified
//! data never ends up in a prompt.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::rdf::{serialize_turtle, Graph, Term, Triple};
use crate::vocab::{self, owl, rdf, rdfs};

const SCHEMA_TYPES: &[&str] = &[
    owl::CLASS,
    owl::OBJECT_PROPERTY,
    owl::DATATYPE_PROPERTY,
    owl::ANNOTATION_PROPERTY,
];

const SCHEMA_PREDICATES: &[&str] = &[rdfs::SUB_CLASS_OF, rdfs::DOMAIN, rdfs::RANGE];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CommentPolicy {
    Retain,
    Strip,
}

impl CommentPolicy {
    pub fn from_comments(with_comments: bool) -> Self {
        if with_comments {
            CommentPolicy::Retain
        } else {
            CommentPolicy::Strip
        }
    }

    pub fn keeps_comments(self) -> bool {
        self == CommentPolicy::Retain
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionDiagnostic {
    /// No schema entity found; the input looks like a data-only file.
    EmptyTBox,
}

#[derive(Debug, Clone)]
pub struct PartitionedOntology {
    pub tbox: Graph,
    pub abox: Graph,
    pub schema_entities: BTreeSet<String>,
    pub diagnostics: Vec<PartitionDiagnostic>,
}

impl PartitionedOntology {
    /// IRIs of ABox individuals: IRI subjects of ABox triples and IRI objects
    /// of non-typing ABox triples, minus schema entities and built-in
    /// vocabulary.
    pub fn individuals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.abox.iter() {
            if let Some(s) = t.subject().as_iri() {
                out.insert(s);
            }
            if t.predicate_iri() != rdf::TYPE {
                if let Some(o) = t.object().as_iri() {
                    out.insert(o);
                }
            }
        }
        out.into_iter()
            .filter(|iri| !self.schema_entities.contains(*iri) && !vocab::is_builtin(iri))
            .map(String::from)
            .collect()
    }

    /// Schema entities typed as a class.
    pub fn classes(&self) -> BTreeSet<&str> {
        self.typed_entities(&[owl::CLASS])
    }

    /// Schema entities typed as an object, datatype or annotation property.
    pub fn properties(&self) -> BTreeSet<&str> {
        self.typed_entities(&[owl::OBJECT_PROPERTY, owl::DATATYPE_PROPERTY, owl::ANNOTATION_PROPERTY])
    }

    fn typed_entities(&self, types: &[&str]) -> BTreeSet<&str> {
        self.tbox
            .iter()
            .filter(|t| t.predicate_iri() == rdf::TYPE)
            .filter(|t| t.object().as_iri().is_some_and(|o| types.contains(&o)))
            .filter_map(|t| t.subject().as_iri())
            .collect()
    }
}

pub fn partition(graph: &Graph) -> PartitionedOntology {
    let mut schema_entities = BTreeSet::new();
    let mut header = BTreeSet::new();
    for t in graph.iter() {
        let Some(subject) = t.subject().as_iri() else {
            continue;
        };
        let pred = t.predicate_iri();
        let typed_as = |types: &[&str]| pred == rdf::TYPE && t.object().as_iri().is_some_and(|o| types.contains(&o));
        if typed_as(SCHEMA_TYPES) || SCHEMA_PREDICATES.contains(&pred) {
            schema_entities.insert(String::from(subject));
        } else if typed_as(&[owl::ONTOLOGY]) {
            header.insert(String::from(subject));
        }
    }

    let is_root = |term: &Term| {
        term.as_iri()
            .is_some_and(|iri| schema_entities.contains(iri) || header.contains(iri))
    };

    // Blank nodes hanging off schema statements belong to the schema too.
    let mut reachable: BTreeSet<&Term> = BTreeSet::new();
    let mut frontier: Vec<&Term> = graph
        .iter()
        .filter(|t| is_root(t.subject()) && t.object().is_blank())
        .map(Triple::object)
        .collect();
    while let Some(node) = frontier.pop() {
        if !reachable.insert(node) {
            continue;
        }
        for t in graph.match_iter(crate::rdf::Pattern::new(Some(node), None, None)) {
            if t.object().is_blank() && !reachable.contains(t.object()) {
                frontier.push(t.object());
            }
        }
    }

    let mut tbox = Graph::new();
    let mut abox = Graph::new();
    for t in graph.iter() {
        if is_root(t.subject()) || reachable.contains(t.subject()) {
            tbox.insert(t.clone());
        } else {
            abox.insert(t.clone());
        }
    }
    tbox.set_prefixes(used_prefixes(&tbox, graph.prefixes()));
    abox.set_prefixes(graph.prefixes().clone());

    let mut diagnostics = Vec::new();
    if schema_entities.is_empty() {
        diagnostics.push(PartitionDiagnostic::EmptyTBox);
    }
    PartitionedOntology {
        tbox,
        abox,
        schema_entities,
        diagnostics,
    }
}

/// Prefix declarations whose namespace is used by at least one IRI (or
/// datatype IRI) in `graph`.
fn used_prefixes(graph: &Graph, prefixes: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    let mut iris: BTreeSet<&str> = BTreeSet::new();
    for term in graph.terms() {
        match term {
            Term::Iri(iri) => {
                iris.insert(iri);
            }
            Term::Literal(lit) => {
                iris.insert(lit.datatype());
            }
            Term::BlankNode(_) => {}
        }
    }
    prefixes
        .iter()
        .filter(|(_, ns)| iris.iter().any(|iri| iri.starts_with(ns.as_str())))
        .map(|(p, ns)| (p.clone(), ns.clone()))
        .collect()
}

pub fn apply_comment_policy(tbox: &Graph, policy: CommentPolicy) -> Graph {
    match policy {
        CommentPolicy::Retain => tbox.clone(),
        CommentPolicy::Strip => {
            let mut out: Graph = tbox
                .iter()
                .filter(|t| t.predicate_iri() != rdfs::COMMENT)
                .cloned()
                .collect();
            out.set_prefixes(tbox.prefixes().clone());
            out
        }
    }
}

/// Prompt-facing TBox text: the canonical Turtle rendering.
pub fn render_prompt_tbox(tbox: &Graph) -> String {
    serialize_turtle(tbox)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    fn g(body: &str) -> Graph {
        let mut doc = String::from(
            "@prefix ex: <http://ex.org/> . @prefix owl: <http://www.w3.org/2002/07/owl#> . \
             @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> . @prefix d: <http://data.org/> .\n",
        );
        doc.push_str(body);
        parse_turtle(&doc).unwrap().graph
    }

    #[test]
    fn single_class_goes_to_tbox() {
        let p = partition(&g("ex:C a owl:Class ."));
        assert_eq!((p.tbox.len(), p.abox.len()), (1, 0));
        assert!(p.diagnostics.is_empty());
    }

    #[test]
    fn data_only_file() {
        let p = partition(&g("d:i a ex:C ."));
        assert_eq!((p.tbox.len(), p.abox.len()), (0, 1));
        assert_eq!(p.diagnostics, [PartitionDiagnostic::EmptyTBox]);
        assert_eq!(p.individuals().into_iter().collect::<Vec<_>>(), ["http://data.org/i"]);
    }

    #[test]
    fn header_domain_range_and_blank_nodes() {
        let p = partition(&g(
            "<http://ex.org/onto> a owl:Ontology ; rdfs:label \"O\" .
             ex:p rdfs:domain ex:C ; rdfs:range ex:D .
             ex:C a owl:Class ; rdfs:subClassOf _:r . _:r ex:onProperty ex:p ; ex:next _:r2 . _:r2 ex:x 1 .
             d:i a ex:C ; ex:p d:j . d:j rdfs:label \"J\" .
             _:loose ex:p d:i .",
        ));
        assert_eq!(p.tbox.len(), 9);
        assert_eq!(p.abox.len(), 4);
        assert!(p.schema_entities.contains("http://ex.org/p"));
        assert!(!p.schema_entities.contains("http://ex.org/onto"));
        let individuals: Vec<_> = p.individuals().into_iter().collect();
        assert_eq!(individuals, ["http://data.org/i", "http://data.org/j"]);
        // data namespace is not declared in the prompt-facing TBox
        assert!(!p.tbox.prefixes().contains_key("d"));
        assert!(p.abox.prefixes().contains_key("d"));
    }

    #[test]
    fn comment_stripping() {
        let tbox = g("ex:A a owl:Class ; rdfs:comment \"a\" ; rdfs:label \"A\" .
                      ex:B a owl:Class ; rdfs:comment \"b\" .
                      ex:p a owl:ObjectProperty ; rdfs:comment \"p\" .");
        assert_eq!(apply_comment_policy(&tbox, CommentPolicy::Retain), tbox);
        let stripped = apply_comment_policy(&tbox, CommentPolicy::Strip);
        assert_eq!(stripped.len(), tbox.len() - 3);
        assert_eq!(apply_comment_policy(&stripped, CommentPolicy::Strip), stripped);
        let text = render_prompt_tbox(&stripped);
        assert!(!text.contains("rdfs:comment"));
        assert!(text.contains("rdfs:label"));
        assert_eq!(text, render_prompt_tbox(&stripped));
    }
}
