use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::term::Term;

/// An RDF triple. Ordering is the canonical (subject, predicate, object)
/// order used by the serializer and by pattern matching.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TripleError {
    #[error("literal in subject position: {0}")]
    LiteralSubject(Term),
    #[error("predicate must be an IRI: {0}")]
    NonIriPredicate(Term),
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TripleError> {
        if subject.is_literal() {
            return Err(TripleError::LiteralSubject(subject));
        }
        if !predicate.is_iri() {
            return Err(TripleError::NonIriPredicate(predicate));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn predicate_iri(&self) -> &str {
        self.predicate.as_iri().unwrap_or_default()
    }
}

impl core::fmt::Display for Triple {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple pattern: `None` is a wildcard.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pattern<'a> {
    pub subject: Option<&'a Term>,
    pub predicate: Option<&'a Term>,
    pub object: Option<&'a Term>,
}

impl<'a> Pattern<'a> {
    pub fn new(subject: Option<&'a Term>, predicate: Option<&'a Term>, object: Option<&'a Term>) -> Self {
        Pattern {
            subject,
            predicate,
            object,
        }
    }

    pub fn matches(&self, triple: &Triple) -> bool {
        self.subject.is_none_or(|s| s == triple.subject())
            && self.predicate.is_none_or(|p| p == triple.predicate())
            && self.object.is_none_or(|o| o == triple.object())
    }
}

/// In-memory RDF graph with set semantics and per-position indexes.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    by_subject: BTreeMap<Term, BTreeSet<Triple>>,
    by_predicate: BTreeMap<Term, BTreeSet<Triple>>,
    by_object: BTreeMap<Term, BTreeSet<Triple>>,
    prefixes: BTreeMap<String, String>,
}

impl PartialEq for Graph {
    /// Graphs compare by triple set; prefixes are presentation only.
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a triple; returns `false` if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        self.by_subject
            .entry(triple.subject.clone())
            .or_default()
            .insert(triple.clone());
        self.by_predicate
            .entry(triple.predicate.clone())
            .or_default()
            .insert(triple.clone());
        self.by_object
            .entry(triple.object.clone())
            .or_default()
            .insert(triple.clone());
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        if !self.triples.remove(triple) {
            return false;
        }
        for (index, key) in [
            (&mut self.by_subject, &triple.subject),
            (&mut self.by_predicate, &triple.predicate),
            (&mut self.by_object, &triple.object),
        ] {
            if let Some(set) = index.get_mut(key) {
                set.remove(triple);
                if set.is_empty() {
                    index.remove(key);
                }
            }
        }
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// All triples in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    pub fn set_prefix(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    pub fn set_prefixes(&mut self, prefixes: BTreeMap<String, String>) {
        self.prefixes = prefixes;
    }

    /// Triples matching every concrete position, in canonical order.
    pub fn match_pattern<'g>(&'g self, pattern: Pattern<'_>) -> Vec<&'g Triple> {
        self.match_iter(pattern).collect()
    }

    pub fn match_iter<'g, 'p>(&'g self, pattern: Pattern<'p>) -> impl Iterator<Item = &'g Triple> + use<'g, 'p> {
        self.smallest_index(pattern)
            .into_iter()
            .flat_map(|set| set.iter())
            .filter(move |t| pattern.matches(t))
    }

    /// Smallest candidate set among the bound positions; `None` when a bound
    /// term does not occur at all.
    fn smallest_index<'g>(&'g self, pattern: Pattern<'_>) -> Option<&'g BTreeSet<Triple>> {
        let mut best: Option<Option<&BTreeSet<Triple>>> = None;
        for (index, key) in [
            (&self.by_subject, pattern.subject),
            (&self.by_predicate, pattern.predicate),
            (&self.by_object, pattern.object),
        ] {
            let Some(key) = key else { continue };
            let found = index.get(key);
            let size = found.map_or(0, BTreeSet::len);
            let better = match best {
                None => true,
                Some(prev) => size < prev.map_or(0, BTreeSet::len),
            };
            if better {
                best = Some(found);
            }
        }
        match best {
            None => Some(&self.triples),
            Some(found) => found,
        }
    }

    /// Distinct terms appearing anywhere in the graph, in canonical order.
    pub fn terms(&self) -> BTreeSet<&Term> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            out.insert(&t.subject);
            out.insert(&t.predicate);
            out.insert(&t.object);
        }
        out
    }

    pub fn subjects(&self) -> impl Iterator<Item = &Term> {
        self.by_subject.keys()
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}
