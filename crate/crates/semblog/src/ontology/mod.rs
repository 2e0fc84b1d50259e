//! Structural OWL subset and the annotation registry.
//!
//! Ontology documents are treated as metadata, not as input to a reasoner:
//! the model keeps class IRIs, subclass edges and object properties, nothing
//! more. Semantic similarity between two documents is the Jaccard index of
//! their superclass-closed class sets.

mod rdfxml;
mod registry;

pub use rdfxml::{parse_ontology, serialize_ontology, OWL_NS, RDFS_NS, RDF_NS};
pub use registry::{iri_file_key, AnnotationRecord, Registry, RegistryError};

use std::collections::{BTreeMap, BTreeSet};

use crate::atom::AtomFeed;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OntologyError {
    #[error("subclass edge references undeclared class {0:?}")]
    UndeclaredClass(String),
    #[error("subclass relation contains a cycle through {0:?}")]
    SubclassCycle(String),
    #[error("{0}")]
    Xml(#[from] crate::xml::XmlError),
    #[error("expected an rdf:RDF envelope, found {0:?}")]
    NotRdf(String),
}

/// A structural OWL document: its IRI, declared classes, subclass edges
/// (subclass, superclass) and object properties (property, domain, range).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OntologyDoc {
    pub iri: String,
    pub classes: BTreeSet<String>,
    pub subclass_edges: BTreeSet<(String, String)>,
    pub object_properties: BTreeSet<(String, String, String)>,
}

impl OntologyDoc {
    pub fn new(iri: impl Into<String>) -> Self {
        OntologyDoc {
            iri: iri.into(),
            ..Default::default()
        }
    }

    /// Checks the structural invariants: edge endpoints must be declared
    /// classes and the subclass relation must be acyclic.
    pub fn validate(&self) -> Result<(), OntologyError> {
        for (sub, sup) in &self.subclass_edges {
            for end in [sub, sup] {
                if !self.classes.contains(end) {
                    return Err(OntologyError::UndeclaredClass(end.clone()));
                }
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), OntologyError> {
        let mut up: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (sub, sup) in &self.subclass_edges {
            up.entry(sub).or_default().push(sup);
        }
        // iterative DFS with three colors
        let mut state: BTreeMap<&str, u8> = BTreeMap::new();
        for start in up.keys().copied().collect::<Vec<_>>() {
            if state.get(start).copied().unwrap_or(0) != 0 {
                continue;
            }
            let mut stack = vec![(start, false)];
            while let Some((node, done)) = stack.pop() {
                if done {
                    state.insert(node, 2);
                    continue;
                }
                match state.get(node).copied().unwrap_or(0) {
                    1 => return Err(OntologyError::SubclassCycle(node.to_string())),
                    2 => continue,
                    _ => {}
                }
                state.insert(node, 1);
                stack.push((node, true));
                if let Some(parents) = up.get(node) {
                    for parent in parents {
                        match state.get(parent).copied().unwrap_or(0) {
                            1 => return Err(OntologyError::SubclassCycle(parent.to_string())),
                            2 => {}
                            _ => stack.push((parent, false)),
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// All declared classes plus every IRI reachable upward along subclass
    /// edges. For documents satisfying the declared-endpoint invariant this
    /// equals the class set; reachability is still walked so hand-built
    /// documents behave sensibly.
    pub fn superclass_closure(&self) -> BTreeSet<String> {
        let mut up: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (sub, sup) in &self.subclass_edges {
            up.entry(sub).or_default().push(sup);
        }
        let mut closure: BTreeSet<String> = self.classes.clone();
        let mut queue: Vec<&str> = self.classes.iter().map(String::as_str).collect();
        while let Some(node) = queue.pop() {
            if let Some(parents) = up.get(node) {
                for parent in parents {
                    if closure.insert(parent.to_string()) {
                        queue.push(parent);
                    }
                }
            }
        }
        closure
    }
}

/// Jaccard index of the two superclass closures; 0 when both are empty.
pub fn similarity(a: &OntologyDoc, b: &OntologyDoc) -> f64 {
    let ca = a.superclass_closure();
    let cb = b.superclass_closure();
    let union = ca.union(&cb).count();
    if union == 0 {
        return 0.0;
    }
    let intersection = ca.intersection(&cb).count();
    intersection as f64 / union as f64
}

/// Suffix appended to feed/entry ids when minting class IRIs.
pub const CLASS_FRAGMENT: &str = "#class";

/// Local name of the minted entry→topic property.
pub const POSTED_ON_FRAGMENT: &str = "#postedOn";

/// Derives the blog-family ontology of a feed: the blog topic becomes one
/// class, every entry becomes a subclass of it, and each entry class is
/// related to the topic class by a `postedOn` object property.
pub fn derive_blog_ontology(feed: &AtomFeed) -> OntologyDoc {
    let mut doc = OntologyDoc::new(feed.id.clone());
    let topic_class = format!("{}{}", feed.id, CLASS_FRAGMENT);
    let posted_on = format!("{}{}", feed.id, POSTED_ON_FRAGMENT);
    doc.classes.insert(topic_class.clone());
    for entry in &feed.entries {
        let entry_class = format!("{}{}", entry.id, CLASS_FRAGMENT);
        doc.classes.insert(entry_class.clone());
        doc.subclass_edges
            .insert((entry_class.clone(), topic_class.clone()));
        doc.object_properties
            .insert((posted_on.clone(), entry_class, topic_class.clone()));
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{new_entry, AtomContent, TextConstruct};

    fn camera_doc() -> OntologyDoc {
        let mut doc = OntologyDoc::new("http://example.org/camera.owl");
        for class in ["Camera", "DigitalCamera", "Sensor"] {
            doc.classes
                .insert(format!("http://example.org/vocab#{class}"));
        }
        doc.subclass_edges.insert((
            "http://example.org/vocab#DigitalCamera".into(),
            "http://example.org/vocab#Camera".into(),
        ));
        doc.object_properties.insert((
            "http://example.org/vocab#hasSensor".into(),
            "http://example.org/vocab#DigitalCamera".into(),
            "http://example.org/vocab#Sensor".into(),
        ));
        doc
    }

    fn doc_with(iri: &str, classes: &[&str], edges: &[(&str, &str)]) -> OntologyDoc {
        let mut doc = OntologyDoc::new(iri);
        doc.classes = classes.iter().map(|s| s.to_string()).collect();
        doc.subclass_edges = edges
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        doc
    }

    #[test]
    fn closure_of_camera_doc_is_all_classes() {
        let expected: BTreeSet<String> = ["Camera", "DigitalCamera", "Sensor"]
            .iter()
            .map(|c| format!("http://example.org/vocab#{c}"))
            .collect();
        assert_eq!(camera_doc().superclass_closure(), expected);
    }

    #[test]
    fn closure_walks_chains() {
        let doc = doc_with("urn:o:1", &["A", "B", "C"], &[("A", "B"), ("B", "C")]);
        let expected: BTreeSet<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        assert_eq!(doc.superclass_closure(), expected);
        assert!(doc.validate().is_ok());
    }

    #[test]
    fn empty_doc_has_empty_closure() {
        let doc = OntologyDoc::new("urn:o:empty");
        assert!(doc.superclass_closure().is_empty());
    }

    #[test]
    fn validate_rejects_cycles_and_undeclared() {
        let cyclic = doc_with("urn:o:c", &["A", "B"], &[("A", "B"), ("B", "A")]);
        assert!(matches!(
            cyclic.validate(),
            Err(OntologyError::SubclassCycle(_))
        ));
        let dangling = doc_with("urn:o:d", &["A"], &[("A", "B")]);
        assert!(matches!(
            dangling.validate(),
            Err(OntologyError::UndeclaredClass(_))
        ));
        let self_loop = doc_with("urn:o:s", &["A"], &[("A", "A")]);
        assert!(matches!(
            self_loop.validate(),
            Err(OntologyError::SubclassCycle(_))
        ));
    }

    #[test]
    fn similarity_identity_disjoint_and_partial() {
        let camera = camera_doc();
        assert_eq!(similarity(&camera, &camera), 1.0);

        let disjoint = doc_with("urn:o:x", &["X", "Y", "Z"], &[]);
        let other = doc_with("urn:o:p", &["P", "Q"], &[]);
        assert_eq!(similarity(&disjoint, &other), 0.0);

        // closures {Camera, DigitalCamera, Sensor} vs {Camera, FilmCamera}:
        // one shared class out of four total
        let film = doc_with(
            "urn:o:f",
            &[
                "http://example.org/vocab#Camera",
                "http://example.org/vocab#FilmCamera",
            ],
            &[(
                "http://example.org/vocab#FilmCamera",
                "http://example.org/vocab#Camera",
            )],
        );
        assert_eq!(similarity(&camera, &film), 0.25);
        assert_eq!(similarity(&film, &camera), 0.25);
    }

    #[test]
    fn similarity_of_empty_docs_is_zero() {
        let a = OntologyDoc::new("urn:o:a");
        let b = OntologyDoc::new("urn:o:b");
        assert_eq!(similarity(&a, &b), 0.0);
    }

    fn feed_of(n: usize) -> AtomFeed {
        let entries = (0..n)
            .map(|i| {
                let mut e = new_entry("t", AtomContent::inline_text("x"), vec![]).unwrap();
                e.id = format!("urn:uuid:entry-{i}");
                e
            })
            .collect();
        AtomFeed {
            id: "http://example.org/blog".into(),
            title: TextConstruct::plain("blog"),
            updated: crate::atom::now_rfc3339(),
            categories: vec![],
            links: vec![],
            entries,
        }
    }

    #[test]
    fn derive_counts_classes_and_edges() {
        let doc = derive_blog_ontology(&feed_of(3));
        assert_eq!(doc.classes.len(), 4);
        assert_eq!(doc.subclass_edges.len(), 3);
        assert_eq!(doc.object_properties.len(), 3);
        assert!(doc.validate().is_ok());
        assert!(doc.classes.contains("http://example.org/blog#class"));
    }

    #[test]
    fn derive_empty_feed_is_topic_only() {
        let doc = derive_blog_ontology(&feed_of(0));
        assert_eq!(doc.classes.len(), 1);
        assert!(doc.subclass_edges.is_empty());
        assert!(doc.object_properties.is_empty());
    }

    #[test]
    fn derive_maps_entry_ids_injectively() {
        let doc = derive_blog_ontology(&feed_of(5));
        // 5 distinct entry ids plus the topic
        assert_eq!(doc.classes.len(), 6);
    }
}
