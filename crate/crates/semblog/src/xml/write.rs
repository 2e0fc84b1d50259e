//! Canonical serializer from the Atom model back to XML bytes.

use std::collections::BTreeMap;
use std::io::Cursor;

use quick_xml::escape::escape;
use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::writer::Writer;

use crate::atom::{
    has_errors, validate_entry, validate_feed, AtomCategory, AtomContent, AtomEntry, AtomFeed,
    AtomLink, AtomPerson, ContentKind, ExtensionElement, TextConstruct, TextKind, ATOM_NS,
};

use super::tree::{XmlItem, XmlNode, XML_NS};
use super::XmlError;

type Sink = Writer<Cursor<Vec<u8>>>;

/// Serializes a valid entry as a standalone Atom document. Entries with
/// error-severity violations are refused.
pub fn serialize_entry(entry: &AtomEntry) -> Result<Vec<u8>, XmlError> {
    let violations = validate_entry(entry);
    if has_errors(&violations) {
        return Err(XmlError::InvalidDocument { violations });
    }
    let prefixes = assign_prefixes(entry.extensions.iter());
    let mut writer = Writer::new(Cursor::new(Vec::new()));
    write_decl(&mut writer);
    write_entry_element(&mut writer, entry, &prefixes, true);
    Ok(writer.into_inner().into_inner())
}

/// Serializes a valid feed, entries included, with all extension namespaces
/// declared once on the root element.
pub fn serialize_feed(feed: &AtomFeed) -> Result<Vec<u8>, XmlError> {
    let violations = validate_feed(feed);
    if has_errors(&violations) {
        return Err(XmlError::InvalidDocument { violations });
    }
    let prefixes = assign_prefixes(feed.entries.iter().flat_map(|e| e.extensions.iter()));
    let mut writer = Writer::new(Cursor::new(Vec::new()));
    write_decl(&mut writer);
    let mut root = BytesStart::new("feed");
    root.push_attribute(("xmlns", ATOM_NS));
    for (ns, prefix) in &prefixes {
        root.push_attribute((format!("xmlns:{prefix}").as_str(), ns.as_str()));
    }
    writer
        .write_event(Event::Start(root))
        .expect("in-memory write");
    write_simple(&mut writer, "id", &feed.id);
    write_text_construct(&mut writer, "title", &feed.title);
    write_simple(&mut writer, "updated", &feed.updated);
    for category in &feed.categories {
        write_category(&mut writer, category);
    }
    for link in &feed.links {
        write_link(&mut writer, link);
    }
    for entry in &feed.entries {
        write_entry_element(&mut writer, entry, &prefixes, false);
    }
    writer
        .write_event(Event::End(BytesEnd::new("feed")))
        .expect("in-memory write");
    Ok(writer.into_inner().into_inner())
}

fn write_decl(writer: &mut Sink) {
    writer
        .write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("in-memory write");
}

/// Deterministic prefix table: extension namespaces in sorted order become
/// `ns1`, `ns2`, ... The reserved `xml` namespace is never declared.
fn assign_prefixes<'a>(
    extensions: impl Iterator<Item = &'a ExtensionElement>,
) -> BTreeMap<String, String> {
    let mut namespaces = std::collections::BTreeSet::new();
    for ext in extensions {
        collect_namespaces(ext, &mut namespaces);
    }
    namespaces
        .into_iter()
        .enumerate()
        .map(|(i, ns)| (ns, format!("ns{}", i + 1)))
        .collect()
}

fn collect_namespaces(ext: &ExtensionElement, out: &mut std::collections::BTreeSet<String>) {
    if !ext.namespace_iri.is_empty() {
        out.insert(ext.namespace_iri.clone());
    }
    for key in ext.attributes.keys() {
        if let Some((ns, _)) = parse_clark(key) {
            if ns != XML_NS {
                out.insert(ns.to_string());
            }
        }
    }
    for child in &ext.children {
        collect_namespaces(child, out);
    }
}

fn parse_clark(key: &str) -> Option<(&str, &str)> {
    let rest = key.strip_prefix('{')?;
    rest.split_once('}')
}

fn write_entry_element(
    writer: &mut Sink,
    entry: &AtomEntry,
    prefixes: &BTreeMap<String, String>,
    standalone: bool,
) {
    let mut start = BytesStart::new("entry");
    if standalone {
        start.push_attribute(("xmlns", ATOM_NS));
        for (ns, prefix) in prefixes {
            start.push_attribute((format!("xmlns:{prefix}").as_str(), ns.as_str()));
        }
    }
    writer
        .write_event(Event::Start(start))
        .expect("in-memory write");
    write_simple(writer, "id", &entry.id);
    write_text_construct(writer, "title", &entry.title);
    write_simple(writer, "updated", &entry.updated);
    if let Some(published) = &entry.published {
        write_simple(writer, "published", published);
    }
    for person in &entry.authors {
        write_person(writer, "author", person);
    }
    for person in &entry.contributors {
        write_person(writer, "contributor", person);
    }
    for category in &entry.categories {
        write_category(writer, category);
    }
    for link in &entry.links {
        write_link(writer, link);
    }
    if let Some(content) = &entry.content {
        write_content(writer, content);
    }
    if let Some(summary) = &entry.summary {
        write_text_construct(writer, "summary", summary);
    }
    if let Some(rights) = &entry.rights {
        write_text_construct(writer, "rights", rights);
    }
    for ext in &entry.extensions {
        write_extension(writer, ext, prefixes);
    }
    writer
        .write_event(Event::End(BytesEnd::new("entry")))
        .expect("in-memory write");
}

fn write_simple(writer: &mut Sink, name: &str, text: &str) {
    writer
        .write_event(Event::Start(BytesStart::new(name)))
        .expect("in-memory write");
    if !text.is_empty() {
        writer
            .write_event(Event::Text(BytesText::new(text)))
            .expect("in-memory write");
    }
    writer
        .write_event(Event::End(BytesEnd::new(name)))
        .expect("in-memory write");
}

fn write_text_construct(writer: &mut Sink, name: &str, tc: &TextConstruct) {
    let mut start = BytesStart::new(name);
    start.push_attribute(("type", tc.kind.as_str()));
    writer
        .write_event(Event::Start(start))
        .expect("in-memory write");
    match tc.kind {
        TextKind::Xhtml => {
            // pass-through markup, written verbatim
            writer
                .write_event(Event::Text(BytesText::from_escaped(tc.value.as_str())))
                .expect("in-memory write");
        }
        _ => {
            if !tc.value.is_empty() {
                writer
                    .write_event(Event::Text(BytesText::new(&tc.value)))
                    .expect("in-memory write");
            }
        }
    }
    writer
        .write_event(Event::End(BytesEnd::new(name)))
        .expect("in-memory write");
}

fn write_person(writer: &mut Sink, name: &str, person: &AtomPerson) {
    writer
        .write_event(Event::Start(BytesStart::new(name)))
        .expect("in-memory write");
    write_simple(writer, "name", &person.name);
    if let Some(uri) = &person.uri {
        write_simple(writer, "uri", uri);
    }
    if let Some(email) = &person.email {
        write_simple(writer, "email", email);
    }
    writer
        .write_event(Event::End(BytesEnd::new(name)))
        .expect("in-memory write");
}

fn write_category(writer: &mut Sink, category: &AtomCategory) {
    let mut el = BytesStart::new("category");
    el.push_attribute(("term", category.term.as_str()));
    if let Some(scheme) = &category.scheme {
        el.push_attribute(("scheme", scheme.as_str()));
    }
    if let Some(label) = &category.label {
        el.push_attribute(("label", label.as_str()));
    }
    writer
        .write_event(Event::Empty(el))
        .expect("in-memory write");
}

fn write_link(writer: &mut Sink, link: &AtomLink) {
    let mut el = BytesStart::new("link");
    el.push_attribute(("href", link.href.as_str()));
    if let Some(rel) = &link.rel {
        el.push_attribute(("rel", rel.as_str()));
    }
    if let Some(media_type) = &link.media_type {
        el.push_attribute(("type", media_type.as_str()));
    }
    writer
        .write_event(Event::Empty(el))
        .expect("in-memory write");
}

fn write_content(writer: &mut Sink, content: &AtomContent) {
    let mut el = BytesStart::new("content");
    match content.kind {
        ContentKind::InlineText => {
            el.push_attribute(("type", content.media_type.as_deref().unwrap_or("text")));
        }
        ContentKind::InlineHtml => el.push_attribute(("type", "html")),
        ContentKind::InlineXhtml => el.push_attribute(("type", "xhtml")),
        ContentKind::OutOfLine => {
            if let Some(media_type) = &content.media_type {
                el.push_attribute(("type", media_type.as_str()));
            }
        }
    }
    if let Some(src) = &content.src {
        el.push_attribute(("src", src.as_str()));
    }
    match &content.body {
        Some(body) if content.kind == ContentKind::InlineXhtml => {
            writer
                .write_event(Event::Start(el))
                .expect("in-memory write");
            writer
                .write_event(Event::Text(BytesText::from_escaped(body.as_str())))
                .expect("in-memory write");
            writer
                .write_event(Event::End(BytesEnd::new("content")))
                .expect("in-memory write");
        }
        Some(body) => {
            writer
                .write_event(Event::Start(el))
                .expect("in-memory write");
            if !body.is_empty() {
                writer
                    .write_event(Event::Text(BytesText::new(body)))
                    .expect("in-memory write");
            }
            writer
                .write_event(Event::End(BytesEnd::new("content")))
                .expect("in-memory write");
        }
        None => {
            writer
                .write_event(Event::Empty(el))
                .expect("in-memory write");
        }
    }
}

fn write_extension(writer: &mut Sink, ext: &ExtensionElement, prefixes: &BTreeMap<String, String>) {
    let qname = qualified_name(&ext.namespace_iri, &ext.local_name, prefixes);
    let mut el = BytesStart::new(qname.as_str());
    for (key, value) in &ext.attributes {
        match parse_clark(key) {
            Some((ns, local)) if ns == XML_NS => {
                el.push_attribute((format!("xml:{local}").as_str(), value.as_str()));
            }
            Some((ns, local)) => {
                let name = qualified_name(ns, local, prefixes);
                el.push_attribute((name.as_str(), value.as_str()));
            }
            None => el.push_attribute((key.as_str(), value.as_str())),
        }
    }
    if ext.text.is_none() && ext.children.is_empty() {
        writer
            .write_event(Event::Empty(el))
            .expect("in-memory write");
        return;
    }
    writer
        .write_event(Event::Start(el))
        .expect("in-memory write");
    if let Some(text) = &ext.text {
        writer
            .write_event(Event::Text(BytesText::new(text)))
            .expect("in-memory write");
    }
    for child in &ext.children {
        write_extension(writer, child, prefixes);
    }
    writer
        .write_event(Event::End(BytesEnd::new(qname.as_str())))
        .expect("in-memory write");
}

fn qualified_name(ns: &str, local: &str, prefixes: &BTreeMap<String, String>) -> String {
    match prefixes.get(ns) {
        Some(prefix) => format!("{prefix}:{local}"),
        None => local.to_string(),
    }
}

/// Standalone markup rendering for xhtml pass-through subtrees, interleaving
/// preserved. Elements use default-namespace declarations that child elements
/// inherit.
pub(super) fn items_to_markup(items: &[XmlItem]) -> String {
    let mut out = String::new();
    for item in items {
        markup_item(&mut out, item, None);
    }
    out
}

fn markup_item(out: &mut String, item: &XmlItem, parent_ns: Option<&str>) {
    match item {
        XmlItem::Text(text) => out.push_str(&escape(text)),
        XmlItem::Element(node) => markup_node(out, node, parent_ns),
    }
}

fn markup_node(out: &mut String, node: &XmlNode, parent_ns: Option<&str>) {
    out.push('<');
    out.push_str(&node.local);
    if parent_ns != Some(node.ns.as_str()) {
        out.push_str(&format!(" xmlns=\"{}\"", escape(&node.ns)));
    }
    let mut inline_prefix = 0;
    for attr in &node.attrs {
        match attr.ns.as_deref() {
            None => out.push_str(&format!(" {}=\"{}\"", attr.local, escape(&attr.value))),
            Some(XML_NS) => {
                out.push_str(&format!(" xml:{}=\"{}\"", attr.local, escape(&attr.value)))
            }
            Some(ns) => {
                inline_prefix += 1;
                out.push_str(&format!(
                    " xmlns:a{n}=\"{}\" a{n}:{}=\"{}\"",
                    escape(ns),
                    attr.local,
                    escape(&attr.value),
                    n = inline_prefix,
                ));
            }
        }
    }
    if node.items.is_empty() {
        out.push_str("/>");
        return;
    }
    out.push('>');
    for item in &node.items {
        markup_item(out, item, Some(&node.ns));
    }
    out.push_str(&format!("</{}>", node.local));
}
