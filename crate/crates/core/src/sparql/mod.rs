//! SPARQL subset: parsing, in-memory evaluation and result comparison.

mod ast;
mod compare;
mod eval;
mod lexer;
mod parser;
mod results;

pub use ast::*;
pub use compare::results_equal;
pub use eval::{evaluate, order_terms};
pub use parser::parse_query;
pub use results::ResultSet;

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: expected {expected}, found {found}")]
    QuerySyntaxError {
        /// Byte offset into the query text.
        position: usize,
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("unsupported SPARQL feature: {name}")]
    UnsupportedSparqlFeature { name: String },
}
