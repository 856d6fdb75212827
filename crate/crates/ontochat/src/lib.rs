//! Std side of the ontology chat pipeline: file formats, the SPARQL
//! protocol client, LLM providers, the benchmark runner and the chat API.

pub mod chat;
pub mod config;
pub mod experiment;
pub mod http_chat;
pub mod load;
pub mod remote;
pub mod results_json;
pub mod server;

pub use ontochat_core as core;
