#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::{Path, PathBuf};

use ontochat::core::bench::FixtureDiagnostic;
use ontochat::core::partition::partition;
use ontochat::core::rdf::{Literal, Term};
use ontochat::core::sparql::{evaluate, parse_query};
use ontochat::load::{load_graph, Benchmark, LoadError};
use support::{oracle, Slot, TestQuery};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const FPD: &str = "http://example.org/odp/vdi3682#";
const SYS: &str = "http://example.org/odp/vdi2206#";

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn select(query: &str, odp: &str) -> Vec<Vec<Option<Term>>> {
    let graph = load_graph(&fixtures().join(format!("{odp}.ttl"))).unwrap();
    let abox = partition(&graph).abox;
    let mut rows = evaluate(&parse_query(query).unwrap(), &abox).rows().to_vec();
    rows.sort();
    rows
}

fn iri(s: String) -> Slot {
    Slot::Const(Term::iri(s))
}

#[test]
fn shipped_fixtures_validate() {
    let bench = Benchmark::load(&fixtures().join("questions.json"), &fixtures()).unwrap();
    assert_eq!(bench.ontologies.len(), 3);
    for ontology in bench.ontologies.values() {
        let n = ontology.abox().len();
        assert!((15..=40).contains(&n), "{}: {n}", ontology.id);
    }
}

#[test]
fn technical_resource_count_matches_enumeration() {
    let graph = load_graph(&fixtures().join("vdi3682.ttl")).unwrap();
    let abox = partition(&graph).abox;
    let q = TestQuery {
        patterns: vec![[Slot::Var(0), iri(RDF_TYPE.into()), iri(format!("{FPD}TechnicalResource"))]],
        filter: None,
        projection: None,
        distinct: false,
    };
    let expected = oracle(&q, &abox).len();
    assert_eq!(expected, 4);
    let rows = select(
        "PREFIX fpd: <http://example.org/odp/vdi3682#> SELECT (COUNT(?r) AS ?n) WHERE { ?r a fpd:TechnicalResource }",
        "vdi3682",
    );
    assert_eq!(rows, [vec![Some(Term::Literal(Literal::integer(expected as i64)))]]);
}

#[test]
fn two_hop_gold_matches_enumeration() {
    let graph = load_graph(&fixtures().join("vdi2206.ttl")).unwrap();
    let abox = partition(&graph).abox;
    let q = TestQuery {
        patterns: vec![
            [Slot::Var(0), iri(format!("{SYS}isPartOf")), Slot::Var(1)],
            [Slot::Var(2), iri(format!("{SYS}includes")), Slot::Var(1)],
        ],
        filter: None,
        projection: Some(vec![0, 2]),
        distinct: false,
    };
    let mut expected = oracle(&q, &abox);
    expected.sort();
    assert!(!expected.is_empty());
    let rows = select(
        "PREFIX sys: <http://example.org/odp/vdi2206#> SELECT ?c ?y WHERE { ?c sys:isPartOf ?m . ?y sys:includes ?m }",
        "vdi2206",
    );
    assert_eq!(rows, expected);
}

fn with_edited_fixture(edit: impl FnOnce(String) -> String) -> (tempfile::TempDir, Result<Benchmark, LoadError>) {
    let dir = tempfile::tempdir().unwrap();
    for name in ["vdi3682.ttl", "dinen61360.ttl", "vdi2206.ttl"] {
        std::fs::copy(fixtures().join(name), dir.path().join(name)).unwrap();
    }
    let target = dir.path().join("vdi3682.ttl");
    let text = std::fs::read_to_string(&target).unwrap();
    std::fs::write(&target, edit(text)).unwrap();
    let result = Benchmark::load(&fixtures().join("questions.json"), Path::new(dir.path()));
    (dir, result)
}

#[test]
fn uncommented_class_is_named() {
    let (_dir, result) = with_edited_fixture(|text| {
        text.replace(
            "    rdfs:comment \"A device or machine that carries out a process operator.\" .",
            "    .",
        )
        .replace("rdfs:label \"Technical resource\" ;\n    .", "rdfs:label \"Technical resource\" .")
    });
    let Err(LoadError::FixtureInvalid(diagnostics)) = result else {
        panic!("fixture accepted");
    };
    assert!(diagnostics.iter().any(|(_, d)| matches!(
        d,
        FixtureDiagnostic::CommentCount { iri, count: 0 } if iri == &format!("{FPD}TechnicalResource")
    )));
}

#[test]
fn tied_rank_values_are_rejected() {
    let (_dir, result) = with_edited_fixture(|text| {
        ["120", "45", "300"]
            .iter()
            .fold(text, |t, d| t.replace(&format!("fpd:hasDuration {d}"), "fpd:hasDuration 60"))
    });
    let Err(LoadError::FixtureInvalid(diagnostics)) = result else {
        panic!("fixture accepted");
    };
    assert!(diagnostics
        .iter()
        .any(|(_, d)| matches!(d, FixtureDiagnostic::NonDiscriminativeRank { record_id, .. } if record_id.starts_with("vdi3682-rank"))));
}
