#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod rdf;
pub mod vocab;
pub mod partition;
pub mod sparql;
pub mod gateway;
pub mod bench;
pub mod pipeline;
