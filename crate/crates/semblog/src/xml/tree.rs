//! Generic namespace-aware XML tree, the shared substrate for the Atom and
//! RDF/XML readers. Built event-by-event so arbitrary input yields either a
//! tree or a structured error, never a panic. Character data and child
//! elements stay interleaved in document order, so markup captured for
//! pass-through reproduces faithfully.

use quick_xml::events::Event;
use quick_xml::name::ResolveResult;
use quick_xml::reader::NsReader;
use quick_xml::XmlVersion;

use super::XmlError;

/// Nesting depth beyond which input is rejected instead of recursed into.
const MAX_DEPTH: usize = 128;

/// XML namespace reserved for `xml:*` attributes.
pub const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

#[derive(Debug, Clone, PartialEq)]
pub enum XmlItem {
    Text(String),
    Element(XmlNode),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct XmlNode {
    pub ns: String,
    pub local: String,
    pub attrs: Vec<XmlAttr>,
    /// Direct content in document order.
    pub items: Vec<XmlItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XmlAttr {
    pub ns: Option<String>,
    pub local: String,
    pub value: String,
}

impl XmlNode {
    pub fn attr(&self, local: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|a| a.ns.is_none() && a.local == local)
            .map(|a| a.value.as_str())
    }

    pub fn children(&self) -> impl Iterator<Item = &XmlNode> {
        self.items.iter().filter_map(|item| match item {
            XmlItem::Element(node) => Some(node),
            XmlItem::Text(_) => None,
        })
    }

    pub fn child(&self, ns: &str, local: &str) -> Option<&XmlNode> {
        self.children().find(|c| c.ns == ns && c.local == local)
    }

    pub fn children_named<'a>(
        &'a self,
        ns: &'a str,
        local: &'a str,
    ) -> impl Iterator<Item = &'a XmlNode> {
        self.children()
            .filter(move |c| c.ns == ns && c.local == local)
    }

    /// Concatenated character data directly inside the element.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            if let XmlItem::Text(s) = item {
                out.push_str(s);
            }
        }
        out
    }

    pub fn trimmed_text(&self) -> String {
        self.text_content().trim().to_string()
    }

    fn push_text(&mut self, s: &str) {
        if let Some(XmlItem::Text(last)) = self.items.last_mut() {
            last.push_str(s);
        } else {
            self.items.push(XmlItem::Text(s.to_string()));
        }
    }

    fn push_char(&mut self, c: char) {
        if let Some(XmlItem::Text(last)) = self.items.last_mut() {
            last.push(c);
        } else {
            self.items.push(XmlItem::Text(c.to_string()));
        }
    }
}

/// Parses a complete document into its root element tree.
pub fn parse_tree(bytes: &[u8]) -> Result<XmlNode, XmlError> {
    let mut reader = NsReader::from_reader(bytes);
    let config = reader.config_mut();
    config.trim_text(false);
    let mut buf = Vec::new();
    let mut stack: Vec<XmlNode> = Vec::new();
    let mut root: Option<XmlNode> = None;

    loop {
        let offset = reader.buffer_position();
        let (elem_ns, event) = match reader.read_resolved_event_into(&mut buf) {
            Ok((resolve, event)) => {
                // detach the namespace from the reader borrow right away
                let ns = match resolve {
                    ResolveResult::Bound(ns) => {
                        Ok(String::from_utf8_lossy(ns.as_ref()).into_owned())
                    }
                    ResolveResult::Unbound => Ok(String::new()),
                    ResolveResult::Unknown(prefix) => Err(format!(
                        "undeclared namespace prefix {:?}",
                        String::from_utf8_lossy(&prefix)
                    )),
                };
                (ns, event)
            }
            Err(e) => {
                return Err(XmlError::Malformed {
                    offset: reader.buffer_position(),
                    message: e.to_string(),
                })
            }
        };
        match event {
            Event::Start(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err(XmlError::Malformed {
                        offset,
                        message: "content after document element".into(),
                    });
                }
                if stack.len() >= MAX_DEPTH {
                    return Err(XmlError::Malformed {
                        offset,
                        message: format!("element nesting deeper than {MAX_DEPTH}"),
                    });
                }
                let ns = elem_ns.map_err(|message| XmlError::Malformed { offset, message })?;
                let node = open_node(&reader, ns, &start, offset)?;
                stack.push(node);
            }
            Event::Empty(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err(XmlError::Malformed {
                        offset,
                        message: "content after document element".into(),
                    });
                }
                let ns = elem_ns.map_err(|message| XmlError::Malformed { offset, message })?;
                let node = open_node(&reader, ns, &start, offset)?;
                attach(&mut stack, &mut root, node);
            }
            Event::End(_) => {
                // quick-xml has already verified the tag matches its opener
                let node = stack.pop().ok_or(XmlError::Malformed {
                    offset,
                    message: "unexpected closing tag".into(),
                })?;
                attach(&mut stack, &mut root, node);
            }
            Event::Text(text) => {
                if let Some(top) = stack.last_mut() {
                    let s = text.xml_content(XmlVersion::Explicit1_0).map_err(|e| {
                        XmlError::Malformed {
                            offset,
                            message: e.to_string(),
                        }
                    })?;
                    top.push_text(&s);
                }
            }
            Event::CData(cdata) => {
                if let Some(top) = stack.last_mut() {
                    let s =
                        std::str::from_utf8(cdata.as_ref()).map_err(|e| XmlError::Malformed {
                            offset,
                            message: e.to_string(),
                        })?;
                    top.push_text(s);
                }
            }
            Event::GeneralRef(general) => {
                let Some(top) = stack.last_mut() else {
                    continue;
                };
                if let Some(c) = general
                    .resolve_char_ref()
                    .map_err(|e| XmlError::Malformed {
                        offset,
                        message: e.to_string(),
                    })?
                {
                    top.push_char(c);
                    continue;
                }
                match general.as_ref() {
                    b"amp" => top.push_char('&'),
                    b"lt" => top.push_char('<'),
                    b"gt" => top.push_char('>'),
                    b"apos" => top.push_char('\''),
                    b"quot" => top.push_char('"'),
                    other => {
                        return Err(XmlError::Malformed {
                            offset,
                            message: format!(
                                "undefined entity reference &{};",
                                String::from_utf8_lossy(other)
                            ),
                        })
                    }
                }
            }
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
        buf.clear();
    }

    if !stack.is_empty() {
        return Err(XmlError::Malformed {
            offset: reader.buffer_position(),
            message: "unexpected end of document inside element".into(),
        });
    }
    root.ok_or(XmlError::Malformed {
        offset: 0,
        message: "no document element".into(),
    })
}

fn open_node(
    reader: &NsReader<&[u8]>,
    ns: String,
    start: &quick_xml::events::BytesStart<'_>,
    offset: u64,
) -> Result<XmlNode, XmlError> {
    let local = String::from_utf8_lossy(start.local_name().as_ref()).into_owned();
    let mut node = XmlNode {
        ns,
        local,
        ..Default::default()
    };
    for attr in start.attributes() {
        let attr = attr.map_err(|e| XmlError::Malformed {
            offset,
            message: e.to_string(),
        })?;
        if attr.key.as_namespace_binding().is_some() {
            continue; // xmlns declarations are resolved, not data
        }
        let (attr_ns, attr_local) = reader.resolver().resolve_attribute(attr.key);
        let ns = match attr_ns {
            ResolveResult::Bound(ns) => Some(String::from_utf8_lossy(ns.as_ref()).into_owned()),
            ResolveResult::Unbound => None,
            ResolveResult::Unknown(prefix) => {
                return Err(XmlError::Malformed {
                    offset,
                    message: format!(
                        "undeclared namespace prefix {:?}",
                        String::from_utf8_lossy(&prefix)
                    ),
                })
            }
        };
        let value = attr
            .normalized_value(XmlVersion::Explicit1_0)
            .map_err(|e| XmlError::Malformed {
                offset,
                message: e.to_string(),
            })?
            .into_owned();
        node.attrs.push(XmlAttr {
            ns,
            local: String::from_utf8_lossy(attr_local.as_ref()).into_owned(),
            value,
        });
    }
    Ok(node)
}

fn attach(stack: &mut [XmlNode], root: &mut Option<XmlNode>, node: XmlNode) {
    match stack.last_mut() {
        Some(parent) => parent.items.push(XmlItem::Element(node)),
        None => {
            if root.is_none() {
                *root = Some(node);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_namespaced_tree() {
        let tree = parse_tree(
            br#"<e xmlns="urn:a" xmlns:x="urn:b"><x:c k="v" x:q="w">hi &amp; bye</x:c></e>"#,
        )
        .unwrap();
        assert_eq!(tree.ns, "urn:a");
        assert_eq!(tree.local, "e");
        let child = tree.children().next().unwrap();
        assert_eq!(child.ns, "urn:b");
        assert_eq!(child.local, "c");
        assert_eq!(child.text_content(), "hi & bye");
        assert_eq!(child.attr("k"), Some("v"));
        assert_eq!(
            child
                .attrs
                .iter()
                .find(|a| a.ns.is_some())
                .map(|a| a.local.as_str()),
            Some("q")
        );
    }

    #[test]
    fn preserves_mixed_content_order() {
        let tree = parse_tree(b"<a>one<b/>two</a>").unwrap();
        assert_eq!(tree.items.len(), 3);
        assert!(matches!(&tree.items[0], XmlItem::Text(s) if s == "one"));
        assert!(matches!(&tree.items[1], XmlItem::Element(n) if n.local == "b"));
        assert!(matches!(&tree.items[2], XmlItem::Text(s) if s == "two"));
    }

    #[test]
    fn rejects_unclosed_element() {
        let err = parse_tree(b"<a><b></a>").unwrap_err();
        assert!(matches!(err, XmlError::Malformed { .. }));
    }

    #[test]
    fn rejects_undefined_entity() {
        let err = parse_tree(b"<a>&nope;</a>").unwrap_err();
        assert!(matches!(err, XmlError::Malformed { .. }));
    }

    #[test]
    fn rejects_excessive_nesting() {
        let mut doc = String::new();
        for _ in 0..200 {
            doc.push_str("<a>");
        }
        for _ in 0..200 {
            doc.push_str("</a>");
        }
        let err = parse_tree(doc.as_bytes()).unwrap_err();
        assert!(matches!(err, XmlError::Malformed { .. }));
    }

    #[test]
    fn char_refs_resolve() {
        let tree = parse_tree(b"<a>&#48;&#x41;</a>").unwrap();
        assert_eq!(tree.text_content(), "0A");
    }
}
