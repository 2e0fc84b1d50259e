//! Atom 1.0 wire format: parsing and serialization between XML documents and
//! the in-memory model, with foreign markup preserved.
//!
//! Serialization is canonical: children are emitted in a fixed order and
//! namespace prefixes are assigned deterministically, so equal models produce
//! byte-identical documents. Timestamps pass through verbatim after
//! validation; the serializer never reformats them.

mod read;
pub(crate) mod tree;
mod write;

pub use read::{parse_entry, parse_entry_draft, parse_feed};
pub use write::{serialize_entry, serialize_feed};

use crate::atom::Violation;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum XmlError {
    #[error("malformed XML at byte {offset}: {message}")]
    Malformed { offset: u64, message: String },
    #[error("schema error: required element {element:?} is missing")]
    MissingElement { element: &'static str },
    #[error("schema error: expected root element {expected:?}, found {found:?}")]
    WrongRoot {
        expected: &'static str,
        found: String,
    },
    #[error("document violates model invariants: {}", format_violations(.violations))]
    InvalidDocument { violations: Vec<Violation> },
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
