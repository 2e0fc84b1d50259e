//! Mapping from parsed XML trees onto the Atom model.

use crate::atom::{
    AtomCategory, AtomContent, AtomEntry, AtomFeed, AtomLink, AtomPerson, ContentKind,
    ExtensionElement, TextConstruct, TextKind, ATOM_NS,
};

use super::tree::{parse_tree, XmlNode};
use super::write::items_to_markup;
use super::XmlError;

/// Parses an Atom entry document. `id`, `title` and `updated` are required;
/// elements in non-Atom namespaces are captured as extension elements.
pub fn parse_entry(bytes: &[u8]) -> Result<AtomEntry, XmlError> {
    let root = parse_tree(bytes)?;
    expect_root(&root, "entry")?;
    entry_from_node(&root, true)
}

/// Like [`parse_entry`] but tolerates a missing `id` or `updated`, leaving
/// the field empty for the store to assign. Used for documents POSTed by
/// clients that rely on server-assigned ids.
pub fn parse_entry_draft(bytes: &[u8]) -> Result<AtomEntry, XmlError> {
    let root = parse_tree(bytes)?;
    expect_root(&root, "entry")?;
    entry_from_node(&root, false)
}

/// Parses an Atom feed document, entries included.
pub fn parse_feed(bytes: &[u8]) -> Result<AtomFeed, XmlError> {
    let root = parse_tree(bytes)?;
    expect_root(&root, "feed")?;
    let id = required_trimmed(&root, "id")?;
    let title = required_text_construct(&root, "title")?;
    let updated = required_trimmed(&root, "updated")?;
    let categories = root
        .children_named(ATOM_NS, "category")
        .map(category_from_node)
        .collect();
    let links = root
        .children_named(ATOM_NS, "link")
        .map(link_from_node)
        .collect();
    let entries = root
        .children_named(ATOM_NS, "entry")
        .map(|node| entry_from_node(node, true))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AtomFeed {
        id,
        title,
        updated,
        categories,
        links,
        entries,
    })
}

fn expect_root(root: &XmlNode, expected: &'static str) -> Result<(), XmlError> {
    if root.ns == ATOM_NS && root.local == expected {
        Ok(())
    } else {
        Err(XmlError::WrongRoot {
            expected,
            found: if root.ns.is_empty() {
                root.local.clone()
            } else {
                format!("{{{}}}{}", root.ns, root.local)
            },
        })
    }
}

fn entry_from_node(node: &XmlNode, strict: bool) -> Result<AtomEntry, XmlError> {
    let id = match node.child(ATOM_NS, "id") {
        Some(n) => n.trimmed_text(),
        None if strict => return Err(XmlError::MissingElement { element: "id" }),
        None => String::new(),
    };
    let title = required_text_construct(node, "title")?;
    let updated = match node.child(ATOM_NS, "updated") {
        Some(n) => n.trimmed_text(),
        None if strict => return Err(XmlError::MissingElement { element: "updated" }),
        None => String::new(),
    };
    let published = node.child(ATOM_NS, "published").map(|n| n.trimmed_text());
    let authors = node
        .children_named(ATOM_NS, "author")
        .map(person_from_node)
        .collect();
    let contributors = node
        .children_named(ATOM_NS, "contributor")
        .map(person_from_node)
        .collect();
    let categories = node
        .children_named(ATOM_NS, "category")
        .map(category_from_node)
        .collect();
    let links = node
        .children_named(ATOM_NS, "link")
        .map(link_from_node)
        .collect();
    let content = node.child(ATOM_NS, "content").map(content_from_node);
    let summary = node.child(ATOM_NS, "summary").map(text_construct_from_node);
    let rights = node.child(ATOM_NS, "rights").map(text_construct_from_node);
    let extensions = node
        .children()
        .filter(|c| c.ns != ATOM_NS)
        .map(extension_from_node)
        .collect();
    Ok(AtomEntry {
        id,
        title,
        updated,
        published,
        authors,
        contributors,
        categories,
        links,
        content,
        summary,
        rights,
        extensions,
    })
}

fn required_trimmed(node: &XmlNode, element: &'static str) -> Result<String, XmlError> {
    node.child(ATOM_NS, element)
        .map(|n| n.trimmed_text())
        .ok_or(XmlError::MissingElement { element })
}

fn required_text_construct(
    node: &XmlNode,
    element: &'static str,
) -> Result<TextConstruct, XmlError> {
    node.child(ATOM_NS, element)
        .map(text_construct_from_node)
        .ok_or(XmlError::MissingElement { element })
}

fn text_construct_from_node(node: &XmlNode) -> TextConstruct {
    match node.attr("type") {
        Some("html") => TextConstruct {
            kind: TextKind::Html,
            value: node.text_content(),
        },
        Some("xhtml") => TextConstruct {
            kind: TextKind::Xhtml,
            value: inner_markup(node),
        },
        _ => TextConstruct {
            kind: TextKind::Text,
            value: node.text_content(),
        },
    }
}

/// Serialized inner markup for xhtml pass-through, interleaving preserved.
fn inner_markup(node: &XmlNode) -> String {
    if node.children().next().is_none() {
        node.text_content()
    } else {
        items_to_markup(&node.items)
    }
}

fn person_from_node(node: &XmlNode) -> AtomPerson {
    AtomPerson {
        name: node
            .child(ATOM_NS, "name")
            .map(|n| n.trimmed_text())
            .unwrap_or_default(),
        uri: node.child(ATOM_NS, "uri").map(|n| n.trimmed_text()),
        email: node.child(ATOM_NS, "email").map(|n| n.trimmed_text()),
    }
}

fn category_from_node(node: &XmlNode) -> AtomCategory {
    AtomCategory {
        term: node.attr("term").unwrap_or_default().to_string(),
        scheme: node.attr("scheme").map(str::to_string),
        label: node.attr("label").map(str::to_string),
    }
}

fn link_from_node(node: &XmlNode) -> AtomLink {
    AtomLink {
        href: node.attr("href").unwrap_or_default().to_string(),
        rel: node.attr("rel").map(str::to_string),
        media_type: node.attr("type").map(str::to_string),
    }
}

fn content_from_node(node: &XmlNode) -> AtomContent {
    let media_attr = node.attr("type").map(str::to_string);
    if let Some(src) = node.attr("src") {
        // out-of-line; stray inline text is kept so validation can flag it
        let text = node.text_content();
        return AtomContent {
            kind: ContentKind::OutOfLine,
            media_type: media_attr,
            src: Some(src.to_string()),
            body: if text.trim().is_empty() {
                None
            } else {
                Some(text)
            },
        };
    }
    match media_attr.as_deref() {
        None | Some("text") => AtomContent {
            kind: ContentKind::InlineText,
            media_type: None,
            src: None,
            body: Some(node.text_content()),
        },
        Some("html") => AtomContent {
            kind: ContentKind::InlineHtml,
            media_type: None,
            src: None,
            body: Some(node.text_content()),
        },
        Some("xhtml") => AtomContent {
            kind: ContentKind::InlineXhtml,
            media_type: None,
            src: None,
            body: Some(inner_markup(node)),
        },
        Some(_) => AtomContent {
            kind: ContentKind::InlineText,
            media_type: media_attr,
            src: None,
            body: Some(node.text_content()),
        },
    }
}

/// Extension elements flatten mixed content into concatenated text plus the
/// child list; namespaced attributes keep Clark-notation keys
/// (`{namespace}local`).
fn extension_from_node(node: &XmlNode) -> ExtensionElement {
    let mut ext = ExtensionElement::new(node.ns.clone(), node.local.clone());
    for attr in &node.attrs {
        let key = match &attr.ns {
            Some(ns) => format!("{{{ns}}}{}", attr.local),
            None => attr.local.clone(),
        };
        ext.attributes.insert(key, attr.value.clone());
    }
    let text = node.text_content();
    ext.text = if text.trim().is_empty() {
        None
    } else {
        Some(text)
    };
    ext.children = node.children().map(extension_from_node).collect();
    ext
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{validate_entry, DEFAULT_EXTENSION_NS};

    const SAMPLE: &str = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/camera_entry.xml"
    );

    fn sample_bytes() -> Vec<u8> {
        std::fs::read(SAMPLE).unwrap()
    }

    #[test]
    fn parses_annotated_sample_entry() {
        let entry = parse_entry(&sample_bytes()).unwrap();
        assert_eq!(entry.id, "urn:uuid:988EF5C55CDEA24EDE1251744888912");
        assert_eq!(entry.updated, "2009-08-31T18:55:12.569Z");
        assert_eq!(entry.title.value, "Specifications");
        assert_eq!(entry.title.kind, TextKind::Text);
        assert_eq!(entry.authors.len(), 1);
        assert_eq!(entry.authors[0].name, "S. A. Khuba");
        assert_eq!(entry.contributors[0].name, "Shri. S. A. Khuba");
        assert_eq!(entry.categories.len(), 1);
        let cat = &entry.categories[0];
        assert_eq!(cat.term, "45121504");
        assert_eq!(
            cat.scheme.as_deref(),
            Some("http://www.unspsc.org/UNv1111201")
        );
        assert_eq!(cat.label.as_deref(), Some("Digital Camera"));
        let sem = entry.semantics(DEFAULT_EXTENSION_NS).unwrap();
        assert_eq!(
            sem.ontology_iri,
            "http://www.daman.nic.in/khuba/ontology/camera.owl"
        );
        assert_eq!(sem.availability.as_str(), "OfflineAtURL");
        let body = entry.content.as_ref().unwrap().body.as_deref().unwrap();
        assert!(body.contains("Pixels 12.3 million Effective"));
        assert!(body.contains("Weight is Approx. 840 g"));
        assert!(entry
            .summary
            .as_ref()
            .unwrap()
            .value
            .contains("Nikon D300S"));
        assert!(validate_entry(&entry).is_empty());
    }

    #[test]
    fn parses_minimal_entry() {
        let doc = br#"<?xml version="1.0"?>
<entry xmlns="http://www.w3.org/2005/Atom">
  <id>urn:uuid:0</id><title>t</title><updated>2020-01-01T00:00:00Z</updated>
</entry>"#;
        let entry = parse_entry(doc).unwrap();
        assert_eq!(entry.id, "urn:uuid:0");
        assert!(entry.authors.is_empty());
        assert!(entry.content.is_none());
        assert!(entry.extensions.is_empty());
    }

    #[test]
    fn missing_id_is_schema_error() {
        let doc = String::from_utf8(sample_bytes())
            .unwrap()
            .replace("<id>urn:uuid:988EF5C55CDEA24EDE1251744888912</id>", "");
        let err = parse_entry(doc.as_bytes()).unwrap_err();
        assert_eq!(err, XmlError::MissingElement { element: "id" });
        // draft parsing tolerates it
        let draft = parse_entry_draft(doc.as_bytes()).unwrap();
        assert!(draft.id.is_empty());
    }

    #[test]
    fn missing_title_and_updated_are_schema_errors() {
        let base = String::from_utf8(sample_bytes()).unwrap();
        let no_title = base.replace(r#"<title type="text">Specifications</title>"#, "");
        assert_eq!(
            parse_entry(no_title.as_bytes()).unwrap_err(),
            XmlError::MissingElement { element: "title" }
        );
        let no_updated = base.replace("<updated>2009-08-31T18:55:12.569Z</updated>", "");
        assert_eq!(
            parse_entry(no_updated.as_bytes()).unwrap_err(),
            XmlError::MissingElement { element: "updated" }
        );
    }

    #[test]
    fn wrong_root_is_schema_error() {
        let err = parse_entry(br#"<feed xmlns="http://www.w3.org/2005/Atom"/>"#).unwrap_err();
        assert!(matches!(
            err,
            XmlError::WrongRoot {
                expected: "entry",
                ..
            }
        ));
        let err = parse_entry(br#"<entry xmlns="urn:other"/>"#).unwrap_err();
        assert!(matches!(err, XmlError::WrongRoot { .. }));
    }

    #[test]
    fn malformed_input_reports_offset() {
        let err = parse_entry(b"<entry><id>x</unrelated>").unwrap_err();
        match err {
            XmlError::Malformed { offset, .. } => assert!(offset > 0),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn feed_wrapping_sample_entry() {
        let entry = String::from_utf8(sample_bytes()).unwrap();
        let inner = entry
            .replace(r#"<?xml version="1.0" encoding="UTF-8"?>"#, "")
            .replace(r#"<entry xmlns="http://www.w3.org/2005/Atom""#, "<entry ");
        let doc = format!(
            r#"<?xml version="1.0"?>
<feed xmlns="http://www.w3.org/2005/Atom" xmlns:svnit="{ext}">
  <id>http://example.org/feed</id><title>blog</title>
  <updated>2020-01-01T00:00:00Z</updated>
  {inner}
</feed>"#,
            ext = DEFAULT_EXTENSION_NS,
        );
        let feed = parse_feed(doc.as_bytes()).unwrap();
        assert_eq!(feed.entries.len(), 1);
        assert_eq!(
            feed.entries[0].id,
            "urn:uuid:988EF5C55CDEA24EDE1251744888912"
        );
    }

    #[test]
    fn empty_feed_parses() {
        let doc = br#"<feed xmlns="http://www.w3.org/2005/Atom">
  <id>http://example.org/feed</id><title>blog</title>
  <updated>2020-01-01T00:00:00Z</updated>
</feed>"#;
        let feed = parse_feed(doc).unwrap();
        assert!(feed.entries.is_empty());
        assert_eq!(feed.id, "http://example.org/feed");
    }
}
