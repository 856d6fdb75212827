//! Query-generation benchmark: corpus validation, scoring, aggregation and
//! report rendering.

mod corpus;
mod fixtures;
mod report;
mod score;

pub use corpus::{
    validate_corpus, Category, Condition, CorpusInvalid, CorpusViolation, ExperimentMatrix, Odp, Phrasing, QuestionRecord,
};
pub use fixtures::{validate_fixture, FixtureDiagnostic};
pub use report::{aggregate, percent, render_csv, render_markdown, Cell, Cluster, RunOutcome, RunReport};
pub use score::{score_run, FailureKind, Score};
