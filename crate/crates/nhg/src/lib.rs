//! Standard-library companion to `nhg-core`: the hypergraph text format,
//! metadata sidecars, a threaded partitioner, verification checks and the
//! `nhg` command line.

pub mod checks;
pub mod cli;
pub mod format;
pub mod meta;
pub mod parallel;

pub use format::{parse_hypergraph, read_hypergraph, to_text, write_hypergraph, FormatError};
pub use parallel::Threaded;
