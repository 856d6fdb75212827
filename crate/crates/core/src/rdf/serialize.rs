use alloc::string::String;
use core::fmt::Write;

use super::graph::{Graph, Triple};
use super::term::{write_escaped, Term};
use crate::vocab::{rdf, xsd};

/// Canonical Turtle rendering.
///
/// Prefix directives come first, sorted by prefix name. Subjects, predicates
/// within a subject and objects within a predicate follow the canonical term
/// order, so equal triple sets always produce identical bytes.
pub fn serialize_turtle(graph: &Graph) -> String {
    let mut out = String::new();
    for (prefix, ns) in graph.prefixes() {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    let mut triples = graph.iter().peekable();
    if triples.peek().is_some() && !graph.prefixes().is_empty() {
        out.push('\n');
    }
    let mut current: Option<&Triple> = None;
    for t in triples {
        match current {
            Some(prev) if prev.subject() == t.subject() && prev.predicate() == t.predicate() => {
                out.push_str(" ,\n        ");
            }
            Some(prev) if prev.subject() == t.subject() => {
                out.push_str(" ;\n    ");
                write_predicate(&mut out, graph, t.predicate());
                out.push(' ');
            }
            prev => {
                if prev.is_some() {
                    out.push_str(" .\n\n");
                }
                write_term(&mut out, graph, t.subject());
                out.push_str("\n    ");
                write_predicate(&mut out, graph, t.predicate());
                out.push(' ');
            }
        }
        write_term(&mut out, graph, t.object());
        current = Some(t);
    }
    if current.is_some() {
        out.push_str(" .\n");
    }
    out
}

fn write_predicate(out: &mut String, graph: &Graph, predicate: &Term) {
    if predicate.as_iri() == Some(rdf::TYPE) {
        out.push('a');
    } else {
        write_term(out, graph, predicate);
    }
}

fn write_term(out: &mut String, graph: &Graph, term: &Term) {
    match term {
        Term::Iri(iri) => write_iri(out, graph, iri),
        Term::BlankNode(label) => {
            let _ = write!(out, "_:{label}");
        }
        Term::Literal(lit) => {
            let lex = lit.lexical();
            let dt = lit.datatype();
            let bare = match dt {
                xsd::INTEGER => is_integer(lex),
                xsd::DECIMAL => is_decimal(lex),
                xsd::DOUBLE => is_double(lex),
                xsd::BOOLEAN => lex == "true" || lex == "false",
                _ => false,
            };
            if bare {
                out.push_str(lex);
                return;
            }
            out.push('"');
            let _ = write_escaped(out, lex);
            out.push('"');
            if let Some(lang) = lit.language() {
                let _ = write!(out, "@{lang}");
            } else if dt != xsd::STRING {
                out.push_str("^^");
                write_iri(out, graph, dt);
            }
        }
    }
}

/// Uses the longest matching namespace whose remainder is a safe local name;
/// ties go to the lexicographically smallest prefix.
fn write_iri(out: &mut String, graph: &Graph, iri: &str) {
    let best = graph
        .prefixes()
        .iter()
        .filter_map(|(prefix, ns)| {
            let local = iri.strip_prefix(ns.as_str())?;
            is_safe_local(local).then_some((ns.len(), prefix, local))
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(a.1)));
    match best {
        Some((_, prefix, local)) => {
            let _ = write!(out, "{prefix}:{local}");
        }
        None => {
            let _ = write!(out, "<{iri}>");
        }
    }
}

fn is_safe_local(local: &str) -> bool {
    let bytes = local.as_bytes();
    match (bytes.first(), bytes.last()) {
        (None, _) => true,
        (Some(first), Some(last)) => {
            (first.is_ascii_alphanumeric() || *first == b'_')
                && *last != b'.'
                && bytes
                    .iter()
                    .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
        }
        _ => false,
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_integer(lex: &str) -> bool {
    all_digits(strip_sign(lex))
}

fn is_decimal(lex: &str) -> bool {
    match strip_sign(lex).split_once('.') {
        Some((int, frac)) => (int.is_empty() || all_digits(int)) && all_digits(frac),
        None => false,
    }
}

fn is_double(lex: &str) -> bool {
    let Some((mantissa, exp)) = lex.split_once(['e', 'E']) else {
        return false;
    };
    (is_integer(mantissa) || is_decimal(mantissa)) && is_integer(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;
    use alloc::vec::Vec;

    #[test]
    fn empty_graph_renders_prefixes_only() {
        assert_eq!(serialize_turtle(&Graph::new()), "");
        let mut g = Graph::new();
        g.set_prefix("ex", "http://ex.org/");
        assert_eq!(serialize_turtle(&g), "@prefix ex: <http://ex.org/> .\n");
    }

    #[test]
    fn canonical_layout() {
        let src = r#"@prefix ex: <http://ex.org/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
ex:b ex:q "z" ; a ex:C .
ex:a ex:p ex:y , ex:x ; ex:n 3 , "4.0"^^xsd:decimal , "x y"^^xsd:integer .
"#;
        let g = parse_turtle(src).unwrap().graph;
        let expected = r#"@prefix ex: <http://ex.org/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

ex:a
    ex:n 3 ,
        4.0 ,
        "x y"^^xsd:integer ;
    ex:p ex:x ,
        ex:y .

ex:b
    ex:q "z" ;
    a ex:C .
"#;
        assert_eq!(serialize_turtle(&g), expected);
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p ex:b . ex:c ex:p ex:a . ex:a ex:q 1 .")
            .unwrap()
            .graph;
        let mut triples: Vec<_> = g.iter().cloned().collect();
        triples.reverse();
        let mut h: Graph = triples.into_iter().collect();
        h.set_prefixes(g.prefixes().clone());
        assert_eq!(serialize_turtle(&g), serialize_turtle(&h));
    }

    #[test]
    fn unsafe_locals_fall_back_to_full_iris() {
        let g = parse_turtle("@prefix ex: <http://ex.org/> . <http://ex.org/a/b> ex:p <http://ex.org/x.> .")
            .unwrap()
            .graph;
        let out = serialize_turtle(&g);
        assert!(out.contains("<http://ex.org/a/b>"));
        assert!(out.contains("<http://ex.org/x.>"));
        assert_eq!(parse_turtle(&out).unwrap().graph, g);
    }

    #[test]
    fn numeric_lexical_checks() {
        assert!(is_integer("-12") && !is_integer("1.0") && !is_integer("+"));
        assert!(is_decimal(".5") && is_decimal("-1.25") && !is_decimal("1."));
        assert!(is_double("1e3") && is_double("-1.5E-2") && !is_double("e3") && !is_double("1.e3"));
    }
}
