//! Reading ontologies, the question corpus and the fixture set from disk.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use ontochat_core::bench::{validate_corpus, validate_fixture, CorpusInvalid, ExperimentMatrix, FixtureDiagnostic, Odp, QuestionRecord};
use ontochat_core::pipeline::PreparedOntology;
use ontochat_core::rdf::{parse_turtle, Graph, TurtleError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Turtle {
        path: PathBuf,
        #[source]
        source: TurtleError,
    },
    #[error("{path}: invalid corpus JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    CorpusInvalid(#[from] CorpusInvalid),
    #[error("fixture validation failed: {}", .0.iter().map(|(o, d)| format!("{}: {d}", o.id())).collect::<Vec<_>>().join("; "))]
    FixtureInvalid(Vec<(Odp, FixtureDiagnostic)>),
}

impl LoadError {
    pub fn is_io(&self) -> bool {
        matches!(self, LoadError::Io { .. })
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_graph(path: &Path) -> Result<Graph, LoadError> {
    let text = read(path)?;
    parse_turtle(&text).map(|p| p.graph).map_err(|source| LoadError::Turtle {
        path: path.to_path_buf(),
        source,
    })
}

/// Every `*.ttl` file in `dir`, keyed by file stem.
pub fn load_registry(dir: &Path) -> Result<BTreeMap<String, PreparedOntology>, LoadError> {
    let entries = fs::read_dir(dir).map_err(|source| LoadError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "ttl"))
        .collect();
    paths.sort();
    let mut registry = BTreeMap::new();
    for path in paths {
        let Some(id) = path.file_stem().map(|s| s.to_string_lossy().into_owned()) else {
            continue;
        };
        let graph = load_graph(&path)?;
        registry.insert(id.clone(), PreparedOntology::new(id, graph));
    }
    Ok(registry)
}

pub fn read_corpus(path: &Path) -> Result<Vec<QuestionRecord>, LoadError> {
    serde_json::from_str(&read(path)?).map_err(|source| LoadError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// The fixture ontologies and the validated corpus.
pub struct Benchmark {
    pub matrix: ExperimentMatrix,
    pub ontologies: BTreeMap<Odp, PreparedOntology>,
}

impl Benchmark {
    pub fn load(corpus: &Path, fixtures: &Path) -> Result<Self, LoadError> {
        let mut ontologies = BTreeMap::new();
        for odp in Odp::ALL {
            let graph = load_graph(&fixtures.join(odp.fixture_file()))?;
            ontologies.insert(odp, PreparedOntology::new(odp.id(), graph));
        }
        let vocabulary: BTreeMap<Odp, BTreeSet<String>> =
            ontologies.iter().map(|(odp, o)| (*odp, o.vocabulary())).collect();
        let matrix = validate_corpus(read_corpus(corpus)?, &vocabulary)?;

        let pairs: Vec<_> = matrix.corpus.iter().zip(&matrix.gold).map(|(r, g)| (r, g.as_slice())).collect();
        let mut diagnostics = Vec::new();
        for (odp, ontology) in &ontologies {
            for d in validate_fixture(*odp, &ontology.graph, &pairs) {
                diagnostics.push((*odp, d));
            }
        }
        if !diagnostics.is_empty() {
            return Err(LoadError::FixtureInvalid(diagnostics));
        }
        Ok(Benchmark { matrix, ontologies })
    }
}
