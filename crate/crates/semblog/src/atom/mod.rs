//! In-memory model of Atom entry and feed documents.
//!
//! Covers the RFC 4287 subset used by the blog service (id, title, updated,
//! authors, contributors, categories, links, content, summary, rights) plus
//! arbitrary foreign-namespace extension elements. The semantic-annotation
//! extension (`<ns:Semantics available="OfflineAtURL">ontology-iri</ns:Semantics>`)
//! is a distinguished view over the generic extension list, so unknown foreign
//! markup and the annotation element travel through one mechanism.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};

/// The Atom 1.0 XML namespace.
pub const ATOM_NS: &str = "http://www.w3.org/2005/Atom";

/// Default namespace for the semantic-annotation extension element.
/// Deployments normally mint their own and pass it through configuration.
pub const DEFAULT_EXTENSION_NS: &str = "http://www.svnit.ac.in/coed/mtech/research/2009/khuba/";

/// Local name of the annotation extension element.
pub const SEMANTICS_LOCAL_NAME: &str = "Semantics";

/// The one availability mode with defined behavior: the annotating ontology
/// document is retrievable offline at the IRI given as element text.
pub const OFFLINE_AT_URL: &str = "OfflineAtURL";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("title must not be empty")]
    EmptyTitle,
    #[error("category term must not be empty")]
    EmptyCategoryTerm,
    #[error("not an absolute IRI: {0:?}")]
    NotAbsoluteIri(String),
}

/// Media type tag of an Atom text construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextKind {
    Text,
    Html,
    Xhtml,
}

impl TextKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TextKind::Text => "text",
            TextKind::Html => "html",
            TextKind::Xhtml => "xhtml",
        }
    }
}

/// An Atom text construct (title, summary, rights).
///
/// `xhtml` values are carried as the serialized inner markup and passed
/// through without interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct TextConstruct {
    pub kind: TextKind,
    pub value: String,
}

impl TextConstruct {
    pub fn plain(value: impl Into<String>) -> Self {
        TextConstruct {
            kind: TextKind::Text,
            value: value.into(),
        }
    }
}

/// An Atom person construct (author, contributor).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPerson {
    pub name: String,
    pub uri: Option<String>,
    pub email: Option<String>,
}

impl AtomPerson {
    pub fn named(name: impl Into<String>) -> Self {
        AtomPerson {
            name: name.into(),
            uri: None,
            email: None,
        }
    }
}

/// An `atom:category` element: machine term, identifying scheme IRI, and
/// human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomCategory {
    pub term: String,
    pub scheme: Option<String>,
    pub label: Option<String>,
}

impl AtomCategory {
    pub fn new(term: impl Into<String>) -> Self {
        AtomCategory {
            term: term.into(),
            scheme: None,
            label: None,
        }
    }

    pub fn with_scheme(mut self, scheme: impl Into<String>) -> Self {
        self.scheme = Some(scheme.into());
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// An `atom:link` element.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomLink {
    pub href: String,
    pub rel: Option<String>,
    pub media_type: Option<String>,
}

impl AtomLink {
    pub fn new(href: impl Into<String>) -> Self {
        AtomLink {
            href: href.into(),
            rel: None,
            media_type: None,
        }
    }

    pub fn with_rel(mut self, rel: impl Into<String>) -> Self {
        self.rel = Some(rel.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentKind {
    InlineText,
    InlineHtml,
    InlineXhtml,
    OutOfLine,
}

/// The `atom:content` element. Inline content carries a body; out-of-line
/// content carries only a `src` IRI pointing at the stored media resource.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomContent {
    pub kind: ContentKind,
    pub media_type: Option<String>,
    pub src: Option<String>,
    pub body: Option<String>,
}

impl AtomContent {
    pub fn inline_text(body: impl Into<String>) -> Self {
        AtomContent {
            kind: ContentKind::InlineText,
            media_type: None,
            src: None,
            body: Some(body.into()),
        }
    }

    pub fn inline_html(body: impl Into<String>) -> Self {
        AtomContent {
            kind: ContentKind::InlineHtml,
            media_type: None,
            src: None,
            body: Some(body.into()),
        }
    }

    pub fn out_of_line(media_type: impl Into<String>, src: impl Into<String>) -> Self {
        AtomContent {
            kind: ContentKind::OutOfLine,
            media_type: Some(media_type.into()),
            src: Some(src.into()),
            body: None,
        }
    }
}

/// A foreign-markup element preserved verbatim through parse and serialize.
///
/// Attribute keys use Clark notation (`{namespace}local`) when the attribute
/// itself is namespace-qualified, plain local names otherwise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtensionElement {
    pub namespace_iri: String,
    pub local_name: String,
    pub attributes: BTreeMap<String, String>,
    pub text: Option<String>,
    pub children: Vec<ExtensionElement>,
}

impl ExtensionElement {
    pub fn new(namespace_iri: impl Into<String>, local_name: impl Into<String>) -> Self {
        ExtensionElement {
            namespace_iri: namespace_iri.into(),
            local_name: local_name.into(),
            ..Default::default()
        }
    }
}

/// Availability mode of an annotating ontology. Only `OfflineAtURL` is
/// interpreted; other values are preserved verbatim and flagged as warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Availability {
    OfflineAtUrl,
    Other(String),
}

impl Availability {
    pub fn from_attr(value: &str) -> Self {
        if value == OFFLINE_AT_URL {
            Availability::OfflineAtUrl
        } else {
            Availability::Other(value.to_string())
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Availability::OfflineAtUrl => OFFLINE_AT_URL,
            Availability::Other(s) => s,
        }
    }
}

/// The semantic-annotation extension: binds an entry's content to the IRI of
/// the ontology document that models it.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticsExtension {
    pub availability: Availability,
    pub ontology_iri: String,
}

impl SemanticsExtension {
    pub fn offline_at_url(ontology_iri: impl Into<String>) -> Result<Self, ModelError> {
        let iri = ontology_iri.into();
        if !is_absolute_iri(&iri) {
            return Err(ModelError::NotAbsoluteIri(iri));
        }
        Ok(SemanticsExtension {
            availability: Availability::OfflineAtUrl,
            ontology_iri: iri,
        })
    }

    /// Renders into the generic extension shape used for storage and XML.
    pub fn to_extension(&self, namespace_iri: &str) -> ExtensionElement {
        let mut ext = ExtensionElement::new(namespace_iri, SEMANTICS_LOCAL_NAME);
        ext.attributes.insert(
            "available".to_string(),
            self.availability.as_str().to_string(),
        );
        ext.text = Some(self.ontology_iri.clone());
        ext
    }

    /// Reads the annotation back out of a generic extension element, trimming
    /// surrounding whitespace from the IRI text. Returns `None` when the
    /// element is not named `Semantics`.
    pub fn from_extension(ext: &ExtensionElement) -> Option<Self> {
        if ext.local_name != SEMANTICS_LOCAL_NAME {
            return None;
        }
        let availability = ext
            .attributes
            .get("available")
            .map(|v| Availability::from_attr(v))
            .unwrap_or(Availability::Other(String::new()));
        let ontology_iri = ext.text.as_deref().unwrap_or("").trim().to_string();
        Some(SemanticsExtension {
            availability,
            ontology_iri,
        })
    }
}

/// An Atom entry document.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomEntry {
    pub id: String,
    pub title: TextConstruct,
    pub updated: String,
    pub published: Option<String>,
    pub authors: Vec<AtomPerson>,
    pub contributors: Vec<AtomPerson>,
    pub categories: Vec<AtomCategory>,
    pub links: Vec<AtomLink>,
    pub content: Option<AtomContent>,
    pub summary: Option<TextConstruct>,
    pub rights: Option<TextConstruct>,
    pub extensions: Vec<ExtensionElement>,
}

/// An Atom feed document wrapping entries.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFeed {
    pub id: String,
    pub title: TextConstruct,
    pub updated: String,
    pub categories: Vec<AtomCategory>,
    pub links: Vec<AtomLink>,
    pub entries: Vec<AtomEntry>,
}

/// Creates a new entry with a freshly minted `urn:uuid` id and `updated`
/// set to the current instant.
pub fn new_entry(
    title: &str,
    content: AtomContent,
    authors: Vec<AtomPerson>,
) -> Result<AtomEntry, ModelError> {
    if title.is_empty() {
        return Err(ModelError::EmptyTitle);
    }
    Ok(AtomEntry {
        id: mint_entry_id(),
        title: TextConstruct::plain(title),
        updated: now_rfc3339(),
        published: None,
        authors,
        contributors: Vec::new(),
        categories: Vec::new(),
        links: Vec::new(),
        content: Some(content),
        summary: None,
        rights: None,
        extensions: Vec::new(),
    })
}

/// Mints a globally unique entry id in the `urn:uuid` scheme.
pub fn mint_entry_id() -> String {
    format!("urn:uuid:{}", uuid::Uuid::new_v4())
}

impl AtomEntry {
    /// Appends a category. Re-attaching a category with the same
    /// (term, scheme) pair replaces the existing one instead of duplicating;
    /// label differences alone do not create a second category.
    pub fn attach_category(&mut self, category: AtomCategory) -> Result<(), ModelError> {
        if category.term.is_empty() {
            return Err(ModelError::EmptyCategoryTerm);
        }
        if let Some(scheme) = &category.scheme {
            if !is_absolute_iri(scheme) {
                return Err(ModelError::NotAbsoluteIri(scheme.clone()));
            }
        }
        match self
            .categories
            .iter_mut()
            .find(|c| c.term == category.term && c.scheme == category.scheme)
        {
            Some(existing) => *existing = category,
            None => self.categories.push(category),
        }
        Ok(())
    }

    /// Attaches the semantic annotation in the given extension namespace,
    /// replacing any annotation already present in that namespace.
    pub fn attach_semantics(
        &mut self,
        sem: SemanticsExtension,
        namespace_iri: &str,
    ) -> Result<(), ModelError> {
        if !is_absolute_iri(&sem.ontology_iri) {
            return Err(ModelError::NotAbsoluteIri(sem.ontology_iri));
        }
        let ext = sem.to_extension(namespace_iri);
        self.extensions.retain(|e| {
            !(e.namespace_iri == namespace_iri && e.local_name == SEMANTICS_LOCAL_NAME)
        });
        self.extensions.push(ext);
        Ok(())
    }

    /// The semantic annotation carried in the given extension namespace,
    /// if any.
    pub fn semantics(&self, namespace_iri: &str) -> Option<SemanticsExtension> {
        self.extensions
            .iter()
            .find(|e| e.namespace_iri == namespace_iri && e.local_name == SEMANTICS_LOCAL_NAME)
            .and_then(SemanticsExtension::from_extension)
    }
}

/// Severity of a validation finding. Only `Error` makes a document invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    fn error(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}: {}", self.field, self.message)
    }
}

/// True when the list contains at least one `Error`-severity finding.
pub fn has_errors(violations: &[Violation]) -> bool {
    violations.iter().any(|v| v.severity == Severity::Error)
}

/// Checks every model invariant of an entry. An empty result means the entry
/// is valid; warnings (currently only unrecognized availability modes) do not
/// make it invalid.
pub fn validate_entry(entry: &AtomEntry) -> Vec<Violation> {
    let mut out = Vec::new();
    if entry.id.is_empty() {
        out.push(Violation::error(
            "id",
            "id is required and must be non-empty",
        ));
    } else if !is_absolute_iri(&entry.id) {
        out.push(Violation::error(
            "id",
            format!("id {:?} is not an absolute IRI", entry.id),
        ));
    }
    if entry.title.value.is_empty() {
        out.push(Violation::error(
            "title",
            "title is required and must be non-empty",
        ));
    }
    if entry.updated.is_empty() {
        out.push(Violation::error("updated", "updated is required"));
    } else if !is_rfc3339(&entry.updated) {
        out.push(Violation::error(
            "updated",
            format!(
                "updated {:?} is not a valid RFC 3339 instant",
                entry.updated
            ),
        ));
    }
    if let Some(published) = &entry.published {
        if !is_rfc3339(published) {
            out.push(Violation::error(
                "published",
                format!("published {:?} is not a valid RFC 3339 instant", published),
            ));
        }
    }
    for (i, person) in entry.authors.iter().enumerate() {
        if person.name.is_empty() {
            out.push(Violation::error(
                format!("authors[{i}].name"),
                "person name must be non-empty",
            ));
        }
    }
    for (i, person) in entry.contributors.iter().enumerate() {
        if person.name.is_empty() {
            out.push(Violation::error(
                format!("contributors[{i}].name"),
                "person name must be non-empty",
            ));
        }
    }
    for (i, category) in entry.categories.iter().enumerate() {
        if category.term.is_empty() {
            out.push(Violation::error(
                format!("categories[{i}].term"),
                "term must be non-empty",
            ));
        }
        if let Some(scheme) = &category.scheme {
            if !is_absolute_iri(scheme) {
                out.push(Violation::error(
                    format!("categories[{i}].scheme"),
                    format!("scheme {scheme:?} is not an absolute IRI"),
                ));
            }
        }
    }
    for (i, link) in entry.links.iter().enumerate() {
        if link.href.is_empty() {
            out.push(Violation::error(
                format!("links[{i}].href"),
                "href must be non-empty",
            ));
        }
    }
    if let Some(content) = &entry.content {
        validate_content(content, &mut out);
    }
    for (i, ext) in entry.extensions.iter().enumerate() {
        if ext.namespace_iri.is_empty() || ext.local_name.is_empty() {
            out.push(Violation::error(
                format!("extensions[{i}]"),
                "extension namespace and local name must be non-empty",
            ));
            continue;
        }
        if let Some(sem) = SemanticsExtension::from_extension(ext) {
            if !is_absolute_iri(&sem.ontology_iri) {
                out.push(Violation::error(
                    format!("extensions[{i}]"),
                    format!(
                        "annotation ontology IRI {:?} is not an absolute IRI",
                        sem.ontology_iri
                    ),
                ));
            }
            if let Availability::Other(mode) = &sem.availability {
                out.push(Violation::warning(
                    format!("extensions[{i}]"),
                    format!("unrecognized availability mode {mode:?} preserved verbatim"),
                ));
            }
        }
    }
    out
}

fn validate_content(content: &AtomContent, out: &mut Vec<Violation>) {
    match (content.body.is_some(), content.src.is_some()) {
        (true, true) => out.push(Violation::error(
            "content",
            "content carries both an inline body and a src; exactly one is allowed",
        )),
        (false, false) => out.push(Violation::error(
            "content",
            "content carries neither an inline body nor a src",
        )),
        _ => {}
    }
    match content.kind {
        ContentKind::OutOfLine => {
            if content.src.is_none() {
                out.push(Violation::error(
                    "content",
                    "out-of-line content requires src",
                ));
            }
        }
        _ => {
            if content.src.is_some() {
                out.push(Violation::error(
                    "content",
                    "inline content must not carry src",
                ));
            }
        }
    }
    if let Some(src) = &content.src {
        if !is_absolute_iri(src) {
            out.push(Violation::error(
                "content.src",
                format!("src {src:?} is not an absolute IRI"),
            ));
        }
    }
}

/// Feed-level validation: the entry rules plus id uniqueness across entries.
pub fn validate_feed(feed: &AtomFeed) -> Vec<Violation> {
    let mut out = Vec::new();
    if feed.id.is_empty() {
        out.push(Violation::error(
            "id",
            "feed id is required and must be non-empty",
        ));
    } else if !is_absolute_iri(&feed.id) {
        out.push(Violation::error(
            "id",
            format!("feed id {:?} is not an absolute IRI", feed.id),
        ));
    }
    if feed.title.value.is_empty() {
        out.push(Violation::error(
            "title",
            "feed title is required and must be non-empty",
        ));
    }
    if feed.updated.is_empty() || !is_rfc3339(&feed.updated) {
        out.push(Violation::error(
            "updated",
            format!(
                "feed updated {:?} is not a valid RFC 3339 instant",
                feed.updated
            ),
        ));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (i, entry) in feed.entries.iter().enumerate() {
        if !seen.insert(entry.id.as_str()) {
            out.push(Violation::error(
                format!("entries[{i}].id"),
                format!("duplicate entry id {:?} within feed", entry.id),
            ));
        }
        for v in validate_entry(entry) {
            out.push(Violation {
                field: format!("entries[{i}].{}", v.field),
                severity: v.severity,
                message: v.message,
            });
        }
    }
    out
}

/// Minimal absolute-IRI check: a non-empty RFC 3987 scheme followed by `:`
/// and at least one more character, with no whitespace or control characters
/// anywhere. Comparison elsewhere is exact string equality; no normalization
/// is performed.
pub fn is_absolute_iri(s: &str) -> bool {
    if s.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return false;
    }
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    if scheme.is_empty() || rest.is_empty() {
        return false;
    }
    let mut chars = scheme.chars();
    let first = chars.next().unwrap();
    if !first.is_ascii_alphabetic() {
        return false;
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// True when the string parses as an RFC 3339 instant.
pub fn is_rfc3339(s: &str) -> bool {
    DateTime::parse_from_rfc3339(s).is_ok()
}

/// Current instant as an RFC 3339 string with millisecond precision and a
/// `Z` offset.
pub fn now_rfc3339() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_entry() -> AtomEntry {
        new_entry(
            "Specifications",
            AtomContent::inline_text("1) Pixels 12.3 million Effective"),
            vec![AtomPerson::named("S. A. Khuba")],
        )
        .unwrap()
    }

    #[test]
    fn new_entry_fills_required_fields() {
        let entry = sample_entry();
        assert!(entry.id.starts_with("urn:uuid:"));
        assert!(is_absolute_iri(&entry.id));
        assert!(is_rfc3339(&entry.updated));
        assert_eq!(entry.title.value, "Specifications");
        assert_eq!(entry.authors.len(), 1);
        assert!(entry.categories.is_empty());
        assert!(entry.extensions.is_empty());
        assert!(validate_entry(&entry).is_empty());
    }

    #[test]
    fn new_entry_allows_empty_authors() {
        let entry = new_entry("t", AtomContent::inline_text(""), vec![]).unwrap();
        assert!(entry.authors.is_empty());
        assert!(validate_entry(&entry).is_empty());
    }

    #[test]
    fn new_entry_rejects_empty_title() {
        let err = new_entry("", AtomContent::inline_text("x"), vec![]).unwrap_err();
        assert_eq!(err, ModelError::EmptyTitle);
    }

    #[test]
    fn entry_ids_unique_across_many_calls() {
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100_000 {
            assert!(seen.insert(mint_entry_id()));
        }
    }

    #[test]
    fn attach_category_collapses_term_scheme_duplicates() {
        let mut entry = sample_entry();
        let cat = AtomCategory::new("45121504")
            .with_scheme("http://www.unspsc.org/UNv1111201")
            .with_label("Digital Camera");
        entry.attach_category(cat.clone()).unwrap();
        assert_eq!(entry.categories, vec![cat.clone()]);
        entry.attach_category(cat.clone()).unwrap();
        assert_eq!(entry.categories.len(), 1);
        // label difference alone still collapses
        entry
            .attach_category(
                AtomCategory::new("45121504")
                    .with_scheme("http://www.unspsc.org/UNv1111201")
                    .with_label("Camera, Digital"),
            )
            .unwrap();
        assert_eq!(entry.categories.len(), 1);
        assert_eq!(
            entry.categories[0].label.as_deref(),
            Some("Camera, Digital")
        );
    }

    #[test]
    fn attach_category_distinct_terms_accumulate() {
        let mut entry = sample_entry();
        entry
            .attach_category(AtomCategory::new("45121504"))
            .unwrap();
        entry
            .attach_category(AtomCategory::new("45121500"))
            .unwrap();
        assert_eq!(entry.categories.len(), 2);
    }

    #[test]
    fn attach_category_rejects_empty_term() {
        let mut entry = sample_entry();
        let err = entry.attach_category(AtomCategory::new("")).unwrap_err();
        assert_eq!(err, ModelError::EmptyCategoryTerm);
    }

    #[test]
    fn attach_semantics_replaces_existing() {
        let mut entry = sample_entry();
        let iri = "http://www.daman.nic.in/khuba/ontology/camera.owl";
        let sem = SemanticsExtension::offline_at_url(iri).unwrap();
        entry
            .attach_semantics(sem.clone(), DEFAULT_EXTENSION_NS)
            .unwrap();
        entry
            .attach_semantics(sem.clone(), DEFAULT_EXTENSION_NS)
            .unwrap();
        assert_eq!(entry.extensions.len(), 1);
        assert_eq!(entry.extensions[0].text.as_deref(), Some(iri));
        assert_eq!(entry.semantics(DEFAULT_EXTENSION_NS), Some(sem));
    }

    #[test]
    fn attach_semantics_rejects_relative_iri() {
        assert!(SemanticsExtension::offline_at_url("not a uri").is_err());
        assert!(SemanticsExtension::offline_at_url("relative/path").is_err());
        let mut entry = sample_entry();
        let sem = SemanticsExtension {
            availability: Availability::OfflineAtUrl,
            ontology_iri: "no-scheme".to_string(),
        };
        assert!(entry.attach_semantics(sem, DEFAULT_EXTENSION_NS).is_err());
    }

    #[test]
    fn validate_flags_blank_id() {
        let mut entry = sample_entry();
        entry.id.clear();
        let violations = validate_entry(&entry);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "id");
        assert_eq!(violations[0].severity, Severity::Error);
    }

    #[test]
    fn validate_flags_out_of_line_content_with_body() {
        let mut entry = sample_entry();
        entry.content = Some(AtomContent {
            kind: ContentKind::OutOfLine,
            media_type: Some("image/png".to_string()),
            src: Some("http://example.org/media/1".to_string()),
            body: Some("stray".to_string()),
        });
        let violations = validate_entry(&entry);
        assert!(violations.iter().any(|v| v.field == "content"));
        assert!(has_errors(&violations));
    }

    #[test]
    fn unknown_availability_mode_is_warning_only() {
        let mut entry = sample_entry();
        let mut ext = ExtensionElement::new(DEFAULT_EXTENSION_NS, SEMANTICS_LOCAL_NAME);
        ext.attributes
            .insert("available".into(), "MirroredAtCDN".into());
        ext.text = Some("http://example.org/onto.owl".into());
        entry.extensions.push(ext);
        let violations = validate_entry(&entry);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].severity, Severity::Warning);
        assert!(!has_errors(&violations));
        let sem = entry.semantics(DEFAULT_EXTENSION_NS).unwrap();
        assert_eq!(sem.availability.as_str(), "MirroredAtCDN");
    }

    #[test]
    fn validate_feed_catches_duplicate_entry_ids() {
        let a = sample_entry();
        let mut b = sample_entry();
        b.id = a.id.clone();
        let feed = AtomFeed {
            id: "http://example.org/feed".into(),
            title: TextConstruct::plain("f"),
            updated: now_rfc3339(),
            categories: vec![],
            links: vec![],
            entries: vec![a, b],
        };
        let violations = validate_feed(&feed);
        assert!(violations.iter().any(|v| v.field == "entries[1].id"));
    }

    #[test]
    fn absolute_iri_check() {
        assert!(is_absolute_iri("urn:uuid:988EF5C55CDEA24EDE1251744888912"));
        assert!(is_absolute_iri("http://www.unspsc.org/UNv1111201"));
        assert!(!is_absolute_iri(""));
        assert!(!is_absolute_iri("not a uri"));
        assert!(!is_absolute_iri("no-colon"));
        assert!(!is_absolute_iri(":leading"));
        assert!(!is_absolute_iri("1http://x"));
        assert!(!is_absolute_iri("urn:"));
    }
}
