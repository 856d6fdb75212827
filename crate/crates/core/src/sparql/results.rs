use alloc::string::String;
use alloc::vec::Vec;

use crate::rdf::Term;

/// Outcome of a query: a boolean for ASK, a solution table for SELECT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResultSet {
    Boolean(bool),
    Solutions {
        variables: Vec<String>,
        /// One entry per variable; `None` is unbound.
        rows: Vec<Vec<Option<Term>>>,
    },
}

impl ResultSet {
    pub fn as_boolean(&self) -> Option<bool> {
        match self {
            ResultSet::Boolean(b) => Some(*b),
            ResultSet::Solutions { .. } => None,
        }
    }

    pub fn variables(&self) -> &[String] {
        match self {
            ResultSet::Boolean(_) => &[],
            ResultSet::Solutions { variables, .. } => variables,
        }
    }

    pub fn rows(&self) -> &[Vec<Option<Term>>] {
        match self {
            ResultSet::Boolean(_) => &[],
            ResultSet::Solutions { rows, .. } => rows,
        }
    }

    /// A SELECT result without rows.
    pub fn is_empty_solutions(&self) -> bool {
        matches!(self, ResultSet::Solutions { rows, .. } if rows.is_empty())
    }
}
