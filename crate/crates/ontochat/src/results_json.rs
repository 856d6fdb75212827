//! `application/sparql-results+json` encoding and decoding.

use ontochat_core::rdf::{Literal, Term};
use ontochat_core::sparql::ResultSet;
use ontochat_core::vocab::{rdf, xsd};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const MEDIA_TYPE: &str = "application/sparql-results+json";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed SPARQL results: {0}")]
pub struct MalformedResults(pub String);

fn malformed<T>(msg: impl Into<String>) -> Result<T, MalformedResults> {
    Err(MalformedResults(msg.into()))
}

pub fn encode(results: &ResultSet) -> Value {
    match results {
        ResultSet::Boolean(b) => json!({ "head": {}, "boolean": b }),
        ResultSet::Solutions { variables, rows } => {
            let bindings: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut binding = Map::new();
                    for (var, term) in variables.iter().zip(row) {
                        if let Some(term) = term {
                            binding.insert(var.clone(), encode_term(term));
                        }
                    }
                    Value::Object(binding)
                })
                .collect();
            json!({ "head": { "vars": variables }, "results": { "bindings": bindings } })
        }
    }
}

pub fn encode_term(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({ "type": "uri", "value": &**iri }),
        Term::BlankNode(label) => json!({ "type": "bnode", "value": &**label }),
        Term::Literal(lit) => {
            let mut obj = Map::new();
            obj.insert("type".into(), "literal".into());
            obj.insert("value".into(), lit.lexical().into());
            if let Some(lang) = lit.language() {
                obj.insert("xml:lang".into(), lang.into());
            } else if lit.datatype() != xsd::STRING {
                obj.insert("datatype".into(), lit.datatype().into());
            }
            Value::Object(obj)
        }
    }
}

pub fn decode(value: &Value) -> Result<ResultSet, MalformedResults> {
    let Some(obj) = value.as_object() else {
        return malformed("document is not a JSON object");
    };
    if let Some(b) = obj.get("boolean") {
        return match b {
            Value::Bool(b) => Ok(ResultSet::Boolean(*b)),
            _ => malformed("\"boolean\" is not a JSON boolean"),
        };
    }
    let vars = obj
        .get("head")
        .and_then(|h| h.get("vars"))
        .and_then(Value::as_array)
        .map_or_else(|| malformed("missing head.vars"), Ok)?;
    let variables = vars
        .iter()
        .map(|v| v.as_str().map(str::to_owned).map_or_else(|| malformed("non-string variable name"), Ok))
        .collect::<Result<Vec<_>, _>>()?;
    let bindings = obj
        .get("results")
        .and_then(|r| r.get("bindings"))
        .and_then(Value::as_array)
        .map_or_else(|| malformed("missing results.bindings"), Ok)?;
    let mut rows = Vec::with_capacity(bindings.len());
    for binding in bindings {
        let Some(binding) = binding.as_object() else {
            return malformed("binding is not a JSON object");
        };
        if let Some(unknown) = binding.keys().find(|k| !variables.contains(k)) {
            return malformed(format!("binding for undeclared variable {unknown}"));
        }
        let row = variables
            .iter()
            .map(|v| binding.get(v).map(decode_term).transpose())
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(ResultSet::Solutions { variables, rows })
}

pub fn decode_str(text: &str) -> Result<ResultSet, MalformedResults> {
    let value: Value = serde_json::from_str(text).map_err(|e| MalformedResults(e.to_string()))?;
    decode(&value)
}

fn decode_term(value: &Value) -> Result<Term, MalformedResults> {
    let field = |name: &str| value.get(name).and_then(Value::as_str);
    let Some(lexical) = field("value") else {
        return malformed("term without string \"value\"");
    };
    match field("type") {
        Some("uri") => Ok(Term::iri(lexical)),
        Some("bnode") => Ok(Term::blank(lexical)),
        Some("literal" | "typed-literal") => {
            let lit = match (field("xml:lang"), field("datatype")) {
                (Some(lang), _) => Literal::lang_string(lexical, lang),
                (None, Some(dt)) if dt != rdf::LANG_STRING => Literal::typed(lexical, dt),
                (None, Some(_)) => return malformed("rdf:langString literal without xml:lang"),
                (None, None) => Literal::simple(lexical),
            };
            Ok(Term::literal(lit))
        }
        Some(other) => malformed(format!("unknown term type {other:?}")),
        None => malformed("term without \"type\""),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultSet {
        ResultSet::Solutions {
            variables: vec!["x".into(), "v".into()],
            rows: vec![
                vec![Some(Term::iri("http://ex.org/a")), Some(Term::literal(Literal::integer(3)))],
                vec![Some(Term::blank("b0")), Some(Term::literal(Literal::lang_string("Hallo", "de")))],
                vec![Some(Term::iri("http://ex.org/c")), None],
                vec![None, Some(Term::literal(Literal::simple("plain")))],
            ],
        }
    }

    #[test]
    fn round_trip() {
        let rs = sample();
        assert_eq!(decode(&encode(&rs)).unwrap(), rs);
        assert_eq!(decode(&encode(&ResultSet::Boolean(false))).unwrap(), ResultSet::Boolean(false));
    }

    #[test]
    fn w3c_field_names() {
        let v = encode(&sample());
        assert_eq!(v["head"]["vars"], json!(["x", "v"]));
        assert_eq!(
            v["results"]["bindings"][0]["v"],
            json!({"type": "literal", "value": "3", "datatype": xsd::INTEGER})
        );
        assert_eq!(v["results"]["bindings"][1]["v"]["xml:lang"], "de");
        assert!(v["results"]["bindings"][2].get("v").is_none());
        assert!(v["results"]["bindings"][3]["v"].get("datatype").is_none());
        assert_eq!(encode(&ResultSet::Boolean(true))["boolean"], true);
    }

    #[test]
    fn rejects_malformed_documents() {
        for doc in [
            "[]",
            r#"{"head":{}}"#,
            r#"{"boolean":"yes"}"#,
            r#"{"head":{"vars":["x"]},"results":{"bindings":[{"y":{"type":"uri","value":"a"}}]}}"#,
            r#"{"head":{"vars":["x"]},"results":{"bindings":[{"x":{"type":"thing","value":"a"}}]}}"#,
            r#"{"head":{"vars":["x"]},"results":{"bindings":[{"x":{"type":"uri"}}]}}"#,
            "not json",
        ] {
            assert!(decode_str(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn accepts_legacy_typed_literal() {
        let doc = r#"{"head":{"vars":["n"]},"results":{"bindings":[{"n":{"type":"typed-literal","value":"4","datatype":"http://www.w3.org/2001/XMLSchema#integer"}}]}}"#;
        let rs = decode_str(doc).unwrap();
        assert_eq!(rs.rows()[0][0], Some(Term::literal(Literal::integer(4))));
    }
}
