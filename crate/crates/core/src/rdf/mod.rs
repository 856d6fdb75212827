//! RDF data model, Turtle subset parsing, canonical serialization and
//! indexed triple-pattern matching.

mod graph;
mod serialize;
mod term;
mod turtle;

pub use graph::{Graph, Pattern, Triple, TripleError};
pub use serialize::serialize_turtle;
pub use term::{Literal, Term};
pub use turtle::{parse_turtle, Diagnostic, ParsedTurtle, TurtleError};
pub(crate) use turtle::is_absolute_iri;
