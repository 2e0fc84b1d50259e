//! Semantic Atom blog toolkit.
//!
//! The pieces, bottom up:
//!
//! * [`atom`] — typed model of Atom entry/feed documents with the
//!   semantic-annotation extension and validation.
//! * [`xml`] — canonical parser/serializer between Atom XML and the model,
//!   preserving foreign markup.
//! * [`taxonomy`] — 8-digit hierarchical categorization codes, scheme
//!   loading, term validation, subsumption.
//! * [`ontology`] — structural OWL documents, Jaccard similarity over
//!   superclass closures, derived blog-family ontologies, and the persistent
//!   annotation registry.
//! * [`store`] — file-backed, crash-safe collection store for entries and
//!   media resources.
//! * [`retrieval`] — category and similarity queries plus HTML aggregation
//!   pages.
//! * [`service`] — the AtomPub-style HTTP facade tying it all together.

pub mod atom;
pub mod config;
pub mod fsio;
pub mod html;
pub mod ontology;
pub mod retrieval;
pub mod service;
pub mod store;
pub mod taxonomy;
pub mod xml;

pub use atom::{AtomEntry, AtomFeed, SemanticsExtension};
pub use ontology::{OntologyDoc, Registry};
pub use store::BlogStore;
pub use taxonomy::{TaxonomyCode, TaxonomyScheme};
