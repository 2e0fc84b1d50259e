//! RDF/XML reader and writer for the structural OWL subset.
//!
//! The reader recognizes `owl:Class` declarations (with nested
//! `rdfs:subClassOf rdf:resource` assertions) and `owl:ObjectProperty`
//! declarations carrying both an `rdfs:domain` and an `rdfs:range`. Every
//! other construct in the envelope is ignored without error.

use std::io::Cursor;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::writer::Writer;

use crate::xml::tree::{parse_tree, XmlNode};

use super::{OntologyDoc, OntologyError};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";

/// Parses an RDF/XML document into the structural model, validating the
/// subclass graph (declared endpoints, no cycles).
pub fn parse_ontology(bytes: &[u8], iri: &str) -> Result<OntologyDoc, OntologyError> {
    let root = parse_tree(bytes)?;
    if root.ns != RDF_NS || root.local != "RDF" {
        return Err(OntologyError::NotRdf(if root.ns.is_empty() {
            root.local.clone()
        } else {
            format!("{{{}}}{}", root.ns, root.local)
        }));
    }
    let mut doc = OntologyDoc::new(iri);
    collect(&root, &mut doc);
    doc.validate()?;
    Ok(doc)
}

fn collect(node: &XmlNode, doc: &mut OntologyDoc) {
    for child in node.children() {
        if child.ns == OWL_NS && child.local == "Class" {
            if let Some(about) = rdf_about(child) {
                doc.classes.insert(about.to_string());
                for sub in child.children_named(RDFS_NS, "subClassOf") {
                    if let Some(resource) = rdf_resource(sub) {
                        doc.subclass_edges
                            .insert((about.to_string(), resource.to_string()));
                    }
                }
            }
            continue;
        }
        if child.ns == OWL_NS && child.local == "ObjectProperty" {
            if let Some(about) = rdf_about(child) {
                let domain = child
                    .children_named(RDFS_NS, "domain")
                    .find_map(rdf_resource);
                let range = child
                    .children_named(RDFS_NS, "range")
                    .find_map(rdf_resource);
                if let (Some(domain), Some(range)) = (domain, range) {
                    doc.object_properties.insert((
                        about.to_string(),
                        domain.to_string(),
                        range.to_string(),
                    ));
                }
            }
            continue;
        }
        // unknown constructs may still nest recognized ones
        collect(child, doc);
    }
}

fn rdf_about(node: &XmlNode) -> Option<&str> {
    node.attrs
        .iter()
        .find(|a| a.ns.as_deref() == Some(RDF_NS) && a.local == "about")
        .map(|a| a.value.as_str())
}

fn rdf_resource(node: &XmlNode) -> Option<&str> {
    node.attrs
        .iter()
        .find(|a| a.ns.as_deref() == Some(RDF_NS) && a.local == "resource")
        .map(|a| a.value.as_str())
}

/// Renders the structural model back to RDF/XML. `parse_ontology` of the
/// output reproduces the document's class, edge and property sets.
pub fn serialize_ontology(doc: &OntologyDoc) -> Vec<u8> {
    let mut writer = Writer::new_with_indent(Cursor::new(Vec::new()), b' ', 2);
    writer
        .write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("in-memory write");
    let mut root = BytesStart::new("rdf:RDF");
    root.push_attribute(("xmlns:rdf", RDF_NS));
    root.push_attribute(("xmlns:rdfs", RDFS_NS));
    root.push_attribute(("xmlns:owl", OWL_NS));
    writer
        .write_event(Event::Start(root))
        .expect("in-memory write");
    for class in &doc.classes {
        let mut el = BytesStart::new("owl:Class");
        el.push_attribute(("rdf:about", class.as_str()));
        let supers: Vec<&str> = doc
            .subclass_edges
            .iter()
            .filter(|(sub, _)| sub == class)
            .map(|(_, sup)| sup.as_str())
            .collect();
        if supers.is_empty() {
            writer
                .write_event(Event::Empty(el))
                .expect("in-memory write");
        } else {
            writer
                .write_event(Event::Start(el))
                .expect("in-memory write");
            for sup in supers {
                let mut edge = BytesStart::new("rdfs:subClassOf");
                edge.push_attribute(("rdf:resource", sup));
                writer
                    .write_event(Event::Empty(edge))
                    .expect("in-memory write");
            }
            writer
                .write_event(Event::End(BytesEnd::new("owl:Class")))
                .expect("in-memory write");
        }
    }
    for (property, domain, range) in &doc.object_properties {
        let mut el = BytesStart::new("owl:ObjectProperty");
        el.push_attribute(("rdf:about", property.as_str()));
        writer
            .write_event(Event::Start(el))
            .expect("in-memory write");
        let mut d = BytesStart::new("rdfs:domain");
        d.push_attribute(("rdf:resource", domain.as_str()));
        writer
            .write_event(Event::Empty(d))
            .expect("in-memory write");
        let mut r = BytesStart::new("rdfs:range");
        r.push_attribute(("rdf:resource", range.as_str()));
        writer
            .write_event(Event::Empty(r))
            .expect("in-memory write");
        writer
            .write_event(Event::End(BytesEnd::new("owl:ObjectProperty")))
            .expect("in-memory write");
    }
    writer
        .write_event(Event::End(BytesEnd::new("rdf:RDF")))
        .expect("in-memory write");
    writer.into_inner().into_inner()
}
