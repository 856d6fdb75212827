//! Regenerates `fixtures/cassettes/reference.json`: a replay cassette whose
//! responses reproduce the reference correctness pattern per cell.
//!
//! cargo run -p ontochat --example reference_cassette [fixtures-dir]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Mutex;

use ontochat::core::bench::FailureKind;
use ontochat::core::gateway::{CassetteEntry, CompletionRequest, FnProvider, ProviderError, DEFAULT_MAX_ATTEMPTS};
use ontochat::core::pipeline::run_question;
use ontochat::load::Benchmark;

const FPD: &str = "PREFIX fpd: <http://example.org/odp/vdi3682#>\nPREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n";
const DE: &str = "PREFIX de: <http://example.org/odp/dinen61360#>\n";
const SYS: &str = "PREFIX sys: <http://example.org/odp/vdi2206#>\nPREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n";

enum Plan {
    Wrong(Vec<String>),
    /// Unparseable first answer, gold after the repair prompt.
    Repair(&'static str),
    /// A malformed answer on every attempt.
    Fail([&'static str; 3]),
}

fn plans() -> BTreeMap<(&'static str, bool), Plan> {
    let q = |prefix: &str, body: &str| format!("{prefix}{body}");
    let mixing = q(FPD, "SELECT ?step WHERE { ?p rdfs:label \"Mixing\" ; fpd:isComposedOf ?step }");
    let pressure = q(DE, "SELECT ?v WHERE { ?e de:name \"Pressure\" ; de:value ?v }");
    let line_modules = q(SYS, "SELECT ?m WHERE { ?line rdfs:label \"BottlingLine\" ; sys:includes ?m }");
    let consists = q(SYS, "SELECT ?c ?s WHERE { ?m sys:consistsOf ?c . ?s sys:includes ?m }");
    let all_sensors = q(SYS, "SELECT ?s WHERE { ?s a sys:Sensor }");
    let all_units = q(DE, "SELECT ?u WHERE { ?t de:unitOfMeasure ?u }");
    BTreeMap::from([
        (("vdi2206-twohop-scq", false), Plan::Wrong(vec![consists.clone()])),
        (
            ("vdi3682-simple-nscq", false),
            Plan::Wrong(vec![q(FPD, "SELECT ?step WHERE { ?step a fpd:ProcessOperator }")]),
        ),
        (
            ("vdi3682-string-nscq", false),
            Plan::Wrong(vec![q(FPD, "SELECT ?r WHERE { ?r a fpd:TechnicalResource ; rdfs:label \"Pump\" }")]),
        ),
        (("dinen61360-twohop-nscq", false), Plan::Wrong(vec![all_units.clone()])),
        (
            ("vdi2206-simple-nscq", false),
            Plan::Wrong(vec![q(SYS, "SELECT ?m WHERE { ?m a sys:Module }")]),
        ),
        (("vdi2206-twohop-nscq", false), Plan::Wrong(vec![consists.clone()])),
        (
            ("vdi3682-twointent-scq", false),
            Plan::Wrong(vec![
                mixing.clone(),
                q(FPD, "SELECT ?step ?r WHERE { ?p rdfs:label \"Mixing\" ; fpd:isComposedOf ?step . ?r fpd:isAssignedTo ?step }"),
            ]),
        ),
        (
            ("vdi3682-twointent-nscq", false),
            Plan::Fail([
                "```sparql\nSELECT ?step ?machine WHERE { ?p fpd:isComposedOf ?step . ?step fpd:isAssignedTo ?machine }\n```",
                "```sparql\nPREFIX fpd: <http://example.org/odp/vdi3682#>\nSELECT ?step WHERE { ?p fpd:isComposedOf+ ?step }\n```\n\n```sparql\nPREFIX fpd: <http://example.org/odp/vdi3682#>\nSELECT ?machine WHERE { ?step fpd:isAssignedTo ?machine }\n```",
                "The ontology does not describe procedures or machines, so I cannot write this query.",
            ]),
        ),
        (("dinen61360-twointent-nscq", false), Plan::Wrong(vec![pressure.clone(), all_units])),
        (("vdi2206-twointent-nscq", false), Plan::Wrong(vec![line_modules.clone(), all_sensors.clone()])),
        (
            ("dinen61360-count-nscq", false),
            Plan::Repair("```sparql\nSELECT (COUNT(?e) AS ?n) WHERE { ?e a de:DataElement }\n```"),
        ),
        (
            ("vdi3682-string-nscq", true),
            Plan::Wrong(vec![q(FPD, "SELECT ?r WHERE { ?r a fpd:TechnicalResource ; rdfs:label \"Pump\" }")]),
        ),
        (("vdi2206-twohop-nscq", true), Plan::Wrong(vec![consists])),
        (("vdi2206-twointent-nscq", true), Plan::Wrong(vec![line_modules, all_sensors])),
    ])
}

fn fenced(queries: &[String]) -> String {
    let blocks: Vec<String> = queries.iter().map(|q| format!("```sparql\n{q}\n```")).collect();
    format!("Here is the SPARQL query for your question:\n\n{}\n", blocks.join("\n\n"))
}

fn main() {
    let fixtures = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    let bench = Benchmark::load(&fixtures.join("questions.json"), &fixtures).expect("fixtures load");
    let plans = plans();
    let mut cassette = Vec::new();
    let mut used = 0;
    for (i, condition) in bench.matrix.runs() {
        let record = &bench.matrix.corpus[i];
        let plan = plans.get(&(record.id.as_str(), condition.comments));
        used += usize::from(plan.is_some());
        let recorded = Mutex::new(Vec::new());
        let provider = FnProvider(|request: &CompletionRequest<'_>| {
            let text = match (plan, request.attempt) {
                (Some(Plan::Wrong(queries)), _) => fenced(queries),
                (Some(Plan::Repair(bad)), 1) => (*bad).to_string(),
                (Some(Plan::Fail(bad)), n) => bad[n - 1].to_string(),
                _ => fenced(&record.gold_queries),
            };
            recorded.lock().unwrap().push(CassetteEntry {
                prompt_hash: request.prompt_hash.to_string(),
                response_text: text.clone(),
            });
            Ok::<_, ProviderError>(text)
        });
        let ontology = &bench.ontologies[&record.odp];
        let outcome = run_question(ontology, record, &bench.matrix.gold[i], condition, &provider, DEFAULT_MAX_ATTEMPTS);
        let expected = match plan {
            None | Some(Plan::Repair(_)) => None,
            Some(Plan::Wrong(_)) => Some(FailureKind::WrongAnswer),
            Some(Plan::Fail(_)) => Some(FailureKind::TranslationFailed),
        };
        assert_eq!(outcome.failure_kind, expected, "{} {:?}", record.id, condition);
        cassette.extend(recorded.into_inner().unwrap());
    }
    assert_eq!(used, plans.len(), "every planned run exists in the corpus");
    let path = fixtures.join("cassettes/reference.json");
    let mut text = serde_json::to_string_pretty(&cassette).expect("JSON");
    text.push('\n');
    std::fs::write(&path, text).expect("write cassette");
    eprintln!("wrote {} entries to {}", cassette.len(), path.display());
}
