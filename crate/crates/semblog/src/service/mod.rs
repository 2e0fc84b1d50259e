//! AtomPub-style HTTP facade over the store, taxonomy, registry and
//! retrieval engine.
//!
//! Routes:
//!   GET    /service                    service document
//!   GET    /{coll}                     paged collection feed
//!   POST   /{coll}                     create member (entry or media)
//!   GET    /{coll}/categories          categories document (bound scheme)
//!   GET    /{coll}/{member}            read member entry
//!   PUT    /{coll}/{member}            replace entry, requires If-Match
//!   DELETE /{coll}/{member}            delete member
//!   GET    /{coll}/{member}/media      media resource bytes
//!   GET    /search                     retrieval (HTML page or Atom feed)

mod server;

pub use server::{bind, local_addr, run, spawn_ephemeral};

use std::io::Cursor;
use std::path::PathBuf;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::writer::Writer;

use crate::atom::{now_rfc3339, AtomFeed, AtomLink, Availability, ExtensionElement, TextConstruct};
use crate::ontology::{iri_file_key, parse_ontology, AnnotationRecord, Registry, RegistryError};
use crate::retrieval::{
    build_aggregation_page, query_by_category, query_by_semantics, RankedResult, ResultBasis,
    RetrievalError, SemanticAnchor,
};
use crate::store::{BlogStore, CollectionMeta, MemberInput, MemberResource, StoreError};
use crate::taxonomy::{validate_term, SchemeError, TaxonomyScheme, TermValidation};
use crate::xml::{parse_entry_draft, serialize_entry, serialize_feed, XmlError};

pub const APP_NS: &str = "http://www.w3.org/2007/app";
pub const ENTRY_MEDIA_TYPE: &str = "application/atom+xml;type=entry";
pub const FEED_MEDIA_TYPE: &str = "application/atom+xml;type=feed";
pub const SERVICE_MEDIA_TYPE: &str = "application/atomsvc+xml";
pub const CATEGORIES_MEDIA_TYPE: &str = "application/atomcat+xml";
pub const HTML_MEDIA_TYPE: &str = "text/html; charset=utf-8";

/// Local name of the per-result score extension on search feeds.
pub const SCORE_LOCAL_NAME: &str = "Score";

const DEFAULT_PAGE_SIZE: usize = 20;
const MAX_PAGE_SIZE: usize = 100;
const DEFAULT_SEARCH_LIMIT: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("store error: {0}")]
    Store(#[from] StoreError),
    #[error("registry error: {0}")]
    Registry(#[from] RegistryError),
    #[error("taxonomy error: {0}")]
    Scheme(#[from] SchemeError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bind error: {0}")]
    Bind(String),
}

/// Service configuration, already resolved to concrete values.
pub struct ServiceConfig {
    pub root: PathBuf,
    pub base_url: String,
    pub taxonomy: Option<PathBuf>,
    pub ontology_cache: Option<PathBuf>,
    pub extension_ns: String,
    pub collections: Vec<(String, String)>,
}

impl ServiceConfig {
    pub fn build(self) -> Result<ServiceState, ServiceError> {
        let store = BlogStore::open(&self.root, &self.base_url)?;
        for (name, title) in &self.collections {
            store.ensure_collection(name, CollectionMeta::titled(title.clone()))?;
        }
        let registry = Registry::open(self.root.join(".registry"))?;
        let scheme = match &self.taxonomy {
            Some(path) => Some(TaxonomyScheme::load(path)?),
            None => None,
        };
        let ontology_cache = self
            .ontology_cache
            .unwrap_or_else(|| self.root.join(".ontology-cache"));
        std::fs::create_dir_all(&ontology_cache)?;
        Ok(ServiceState {
            store,
            registry,
            scheme,
            extension_ns: self.extension_ns,
            ontology_cache,
            base_url: self.base_url,
        })
    }
}

pub struct ServiceState {
    pub store: BlogStore,
    pub registry: Registry,
    pub scheme: Option<TaxonomyScheme>,
    pub extension_ns: String,
    pub ontology_cache: PathBuf,
    pub base_url: String,
}

#[derive(Debug, Clone)]
pub struct HttpRequest {
    pub method: String,
    /// Path plus optional query string, e.g. `/blog/abc?page_size=2`.
    pub target: String,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpRequest {
    pub fn new(method: &str, target: &str) -> Self {
        HttpRequest {
            method: method.to_string(),
            target: target.to_string(),
            headers: Vec::new(),
            body: Vec::new(),
        }
    }

    pub fn with_header(mut self, name: &str, value: &str) -> Self {
        self.headers.push((name.to_string(), value.to_string()));
        self
    }

    pub fn with_body(mut self, body: impl Into<Vec<u8>>) -> Self {
        self.body = body.into();
        self
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    fn empty(status: u16) -> Self {
        HttpResponse {
            status,
            headers: Vec::new(),
            body: Vec::new(),
        }
    }

    fn text(status: u16, message: impl Into<String>) -> Self {
        let mut message = message.into();
        if !message.ends_with('\n') {
            message.push('\n');
        }
        HttpResponse {
            status,
            headers: vec![("Content-Type".into(), "text/plain; charset=utf-8".into())],
            body: message.into_bytes(),
        }
    }

    fn document(status: u16, media_type: &str, body: Vec<u8>) -> Self {
        HttpResponse {
            status,
            headers: vec![("Content-Type".into(), media_type.to_string())],
            body,
        }
    }

    fn with_header(mut self, name: &str, value: impl Into<String>) -> Self {
        self.headers.push((name.to_string(), value.into()));
        self
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

/// Routes one request. Pure over the service state: all side effects go
/// through the store and registry.
pub fn handle_request(state: &ServiceState, req: &HttpRequest) -> HttpResponse {
    let (path, query) = match req.target.split_once('?') {
        Some((p, q)) => (p, q),
        None => (req.target.as_str(), ""),
    };
    let segments: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
    match (req.method.as_str(), segments.as_slice()) {
        ("GET", ["service"]) => service_document(state),
        ("GET", ["search"]) => search(state, query, req),
        ("GET", [coll, "categories"]) => categories_document(state, coll),
        ("GET", [coll]) => collection_feed(state, coll, query),
        ("POST", [coll]) => create_member(state, coll, req),
        ("GET", [coll, slug]) => read_member(state, coll, slug),
        ("PUT", [coll, slug]) => update_member(state, coll, slug, req),
        ("DELETE", [coll, slug]) => delete_member(state, coll, slug),
        ("GET", [coll, slug, "media"]) => read_media(state, coll, slug),
        _ => HttpResponse::text(404, "no such route"),
    }
}

fn store_error_response(err: StoreError) -> HttpResponse {
    let message = err.to_string();
    match err {
        StoreError::UnknownCollection(_) | StoreError::NotFound => HttpResponse::text(404, message),
        StoreError::EtagMismatch { .. } => HttpResponse::text(412, message),
        StoreError::UnacceptedMediaType(_) => HttpResponse::text(415, message),
        StoreError::DuplicateMemberId(_) => HttpResponse::text(409, message),
        StoreError::InvalidEntry(_)
        | StoreError::InvalidPageToken(_)
        | StoreError::InvalidPageSize
        | StoreError::IdMismatch { .. }
        | StoreError::Xml(_) => HttpResponse::text(400, message),
        StoreError::Io(_)
        | StoreError::DuplicateCollection(_)
        | StoreError::InvalidCollectionName(_) => HttpResponse::text(500, message),
    }
}

fn query_params(query: &str) -> Vec<(String, String)> {
    url::form_urlencoded::parse(query.as_bytes())
        .map(|(k, v)| (k.into_owned(), v.into_owned()))
        .collect()
}

fn param<'a>(params: &'a [(String, String)], name: &str) -> Option<&'a str> {
    params
        .iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| v.as_str())
}

// --- protocol documents ---------------------------------------------------

fn service_document(state: &ServiceState) -> HttpResponse {
    let mut writer = Writer::new(Cursor::new(Vec::new()));
    writer
        .write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("in-memory write");
    let mut root = BytesStart::new("service");
    root.push_attribute(("xmlns", APP_NS));
    root.push_attribute(("xmlns:atom", crate::atom::ATOM_NS));
    writer
        .write_event(Event::Start(root))
        .expect("in-memory write");
    writer
        .write_event(Event::Start(BytesStart::new("workspace")))
        .expect("in-memory write");
    write_atom_title(&mut writer, "Semantic Atom Blog");
    for name in state.store.collection_names() {
        let meta = match state.store.collection_meta(&name) {
            Ok(meta) => meta,
            Err(_) => continue,
        };
        let mut collection = BytesStart::new("collection");
        collection.push_attribute(("href", format!("{}/{}", state.base_url, name).as_str()));
        writer
            .write_event(Event::Start(collection))
            .expect("in-memory write");
        write_atom_title(&mut writer, &meta.title);
        write_text_element(&mut writer, "accept", ENTRY_MEDIA_TYPE);
        for media_type in &meta.accepted_media_types {
            write_text_element(&mut writer, "accept", media_type);
        }
        if state.scheme.is_some() {
            let mut categories = BytesStart::new("categories");
            categories.push_attribute((
                "href",
                format!("{}/{}/categories", state.base_url, name).as_str(),
            ));
            writer
                .write_event(Event::Empty(categories))
                .expect("in-memory write");
        }
        writer
            .write_event(Event::End(BytesEnd::new("collection")))
            .expect("in-memory write");
    }
    writer
        .write_event(Event::End(BytesEnd::new("workspace")))
        .expect("in-memory write");
    writer
        .write_event(Event::End(BytesEnd::new("service")))
        .expect("in-memory write");
    HttpResponse::document(200, SERVICE_MEDIA_TYPE, writer.into_inner().into_inner())
}

fn write_atom_title(writer: &mut Writer<Cursor<Vec<u8>>>, title: &str) {
    writer
        .write_event(Event::Start(BytesStart::new("atom:title")))
        .expect("in-memory write");
    writer
        .write_event(Event::Text(quick_xml::events::BytesText::new(title)))
        .expect("in-memory write");
    writer
        .write_event(Event::End(BytesEnd::new("atom:title")))
        .expect("in-memory write");
}

fn write_text_element(writer: &mut Writer<Cursor<Vec<u8>>>, name: &str, text: &str) {
    writer
        .write_event(Event::Start(BytesStart::new(name)))
        .expect("in-memory write");
    writer
        .write_event(Event::Text(quick_xml::events::BytesText::new(text)))
        .expect("in-memory write");
    writer
        .write_event(Event::End(BytesEnd::new(name)))
        .expect("in-memory write");
}

fn categories_document(state: &ServiceState, coll: &str) -> HttpResponse {
    if state.store.collection_meta(coll).is_err() {
        return HttpResponse::text(404, format!("unknown collection {coll:?}"));
    }
    let Some(scheme) = &state.scheme else {
        return HttpResponse::text(404, "no categorization scheme bound");
    };
    let mut writer = Writer::new(Cursor::new(Vec::new()));
    writer
        .write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("in-memory write");
    let mut root = BytesStart::new("app:categories");
    root.push_attribute(("xmlns:app", APP_NS));
    root.push_attribute(("xmlns:atom", crate::atom::ATOM_NS));
    root.push_attribute(("fixed", "yes"));
    root.push_attribute(("scheme", scheme.scheme_iri()));
    writer
        .write_event(Event::Start(root))
        .expect("in-memory write");
    for (code, label) in scheme.iter() {
        let mut category = BytesStart::new("atom:category");
        category.push_attribute(("term", code.to_string().as_str()));
        category.push_attribute(("label", label));
        writer
            .write_event(Event::Empty(category))
            .expect("in-memory write");
    }
    writer
        .write_event(Event::End(BytesEnd::new("app:categories")))
        .expect("in-memory write");
    HttpResponse::document(200, CATEGORIES_MEDIA_TYPE, writer.into_inner().into_inner())
}

// --- collection and member routes ------------------------------------------

fn collection_feed(state: &ServiceState, coll: &str, query: &str) -> HttpResponse {
    let params = query_params(query);
    let page_size = match param(&params, "page_size") {
        None => DEFAULT_PAGE_SIZE,
        Some(raw) => match raw.parse::<usize>() {
            Ok(n) if (1..=MAX_PAGE_SIZE).contains(&n) => n,
            _ => return HttpResponse::text(400, format!("invalid page_size {raw:?}")),
        },
    };
    let page_token = param(&params, "page_token");
    let (mut feed, next) = match state.store.list_feed(coll, page_size, page_token) {
        Ok(result) => result,
        Err(e) => return store_error_response(e),
    };
    feed.links
        .push(AtomLink::new(format!("{}/{}", state.base_url, coll)).with_rel("self"));
    if let Some(next) = &next {
        feed.links.push(
            AtomLink::new(format!(
                "{}/{}?page_size={}&page_token={}",
                state.base_url, coll, page_size, next
            ))
            .with_rel("next"),
        );
    }
    match serialize_feed(&feed) {
        Ok(bytes) => HttpResponse::document(200, FEED_MEDIA_TYPE, bytes),
        Err(e) => HttpResponse::text(500, e.to_string()),
    }
}

fn is_atom_media_type(content_type: &str) -> bool {
    let bare = content_type.split(';').next().unwrap_or("").trim();
    matches!(
        bare,
        "application/atom+xml" | "application/xml" | "text/xml"
    )
}

/// Strict/lax category rule: on a collection bound to a scheme, categories
/// claiming that scheme must carry a known, well-formed term (409 otherwise);
/// everything else passes with a warning header.
fn check_categories(
    state: &ServiceState,
    entry: &crate::atom::AtomEntry,
) -> Result<Vec<String>, HttpResponse> {
    let mut warnings = Vec::new();
    match &state.scheme {
        Some(scheme) => {
            for category in &entry.categories {
                if category.scheme.as_deref() == Some(scheme.scheme_iri()) {
                    match validate_term(category, scheme) {
                        TermValidation::Ok { scheme_label: None } => {}
                        TermValidation::Ok {
                            scheme_label: Some(label),
                        } => warnings.push(format!(
                            "category {} label differs from scheme label {label:?}",
                            category.term
                        )),
                        TermValidation::UnknownTerm(term) => {
                            return Err(HttpResponse::text(
                                409,
                                format!(
                                    "category term {term:?} is not defined by the bound scheme"
                                ),
                            ))
                        }
                        TermValidation::Malformed(e) => {
                            return Err(HttpResponse::text(
                                409,
                                format!("category term {:?} is malformed: {e}", category.term),
                            ))
                        }
                        TermValidation::SchemeMismatch { .. } => unreachable!("scheme checked"),
                    }
                } else {
                    warnings.push(format!(
                        "category {:?} not validated: scheme differs from the bound scheme",
                        category.term
                    ));
                }
            }
        }
        None => {
            if !entry.categories.is_empty() {
                warnings.push("categories not validated: no scheme bound".to_string());
            }
        }
    }
    Ok(warnings)
}

fn attach_warnings(mut response: HttpResponse, warnings: &[String]) -> HttpResponse {
    for warning in warnings {
        let sanitized = warning.replace('"', "'");
        response = response.with_header("Warning", format!("199 - \"{sanitized}\""));
    }
    response
}

fn create_member(state: &ServiceState, coll: &str, req: &HttpRequest) -> HttpResponse {
    let content_type = req
        .header("Content-Type")
        .unwrap_or("application/octet-stream");
    if is_atom_media_type(content_type) {
        let entry = match parse_entry_draft(&req.body) {
            Ok(entry) => entry,
            Err(e) => return HttpResponse::text(400, e.to_string()),
        };
        let warnings = match check_categories(state, &entry) {
            Ok(warnings) => warnings,
            Err(response) => return response,
        };
        let member = match state.store.create_member(coll, MemberInput::Entry(entry)) {
            Ok(member) => member,
            Err(e) => return store_error_response(e),
        };
        publish_hook(state, &member);
        attach_warnings(member_response(state, 201, coll, &member, true), &warnings)
    } else {
        let member = match state.store.create_member(
            coll,
            MemberInput::Media {
                media_type: content_type.to_string(),
                bytes: req.body.clone(),
            },
        ) {
            Ok(member) => member,
            Err(e) => return store_error_response(e),
        };
        member_response(state, 201, coll, &member, true)
    }
}

fn member_response(
    state: &ServiceState,
    status: u16,
    coll: &str,
    member: &MemberResource,
    with_location: bool,
) -> HttpResponse {
    let bytes = match serialize_entry(&member.entry) {
        Ok(bytes) => bytes,
        Err(e) => return HttpResponse::text(500, e.to_string()),
    };
    let mut response = HttpResponse::document(status, ENTRY_MEDIA_TYPE, bytes)
        .with_header("ETag", format!("\"{}\"", member.etag));
    if with_location {
        response = response.with_header("Location", state.store.member_url(coll, &member.entry.id));
    }
    response
}

fn read_member(state: &ServiceState, coll: &str, slug: &str) -> HttpResponse {
    match state.store.read_member_by_slug(coll, slug) {
        Ok(member) => member_response(state, 200, coll, &member, false),
        Err(e) => store_error_response(e),
    }
}

fn read_media(state: &ServiceState, coll: &str, slug: &str) -> HttpResponse {
    match state.store.read_member_by_slug(coll, slug) {
        Ok(member) => match member.media {
            Some((media_type, bytes)) => HttpResponse::document(200, &media_type, bytes),
            None => HttpResponse::text(404, "member has no media resource"),
        },
        Err(e) => store_error_response(e),
    }
}

fn update_member(state: &ServiceState, coll: &str, slug: &str, req: &HttpRequest) -> HttpResponse {
    let Some(if_match) = req.header("If-Match") else {
        return HttpResponse::text(400, "PUT requires an If-Match header");
    };
    let expected_etag = if_match.trim().trim_start_matches("W/").trim_matches('"');
    let entry = match parse_entry_draft(&req.body) {
        Ok(entry) => entry,
        Err(e) => return HttpResponse::text(400, e.to_string()),
    };
    let warnings = match check_categories(state, &entry) {
        Ok(warnings) => warnings,
        Err(response) => return response,
    };
    let member = match state
        .store
        .update_member_by_slug(coll, slug, entry, expected_etag)
    {
        Ok(member) => member,
        Err(e) => return store_error_response(e),
    };
    publish_hook(state, &member);
    attach_warnings(member_response(state, 200, coll, &member, false), &warnings)
}

fn delete_member(state: &ServiceState, coll: &str, slug: &str) -> HttpResponse {
    match state.store.delete_member_by_slug(coll, slug) {
        Ok(()) => HttpResponse::empty(204),
        Err(e) => store_error_response(e),
    }
}

// --- annotation hook --------------------------------------------------------

/// After a member commits, registers its semantic annotation when the
/// ontology document is available in the local cache. Never fails the
/// request: problems are logged and the response proceeds unchanged.
pub fn publish_hook(state: &ServiceState, member: &MemberResource) {
    let Some(sem) = member.entry.semantics(&state.extension_ns) else {
        return;
    };
    if let Availability::Other(mode) = &sem.availability {
        log::warn!(
            "annotation on {} has unrecognized availability {mode:?}; not registered",
            member.entry.id
        );
        return;
    }
    let iri = sem.ontology_iri;
    let path = state
        .ontology_cache
        .join(format!("{}.owl", iri_file_key(&iri)));
    let bytes = match std::fs::read(&path) {
        Ok(bytes) => bytes,
        Err(_) => {
            log::warn!("annotation ontology {iri} not found in local cache; not registered");
            return;
        }
    };
    let doc = match parse_ontology(&bytes, &iri) {
        Ok(doc) => doc,
        Err(e) => {
            log::warn!("annotation ontology {iri} failed to parse: {e}");
            return;
        }
    };
    if let Err(e) = state
        .registry
        .register(AnnotationRecord::now(member.entry.id.clone(), iri), &doc)
    {
        log::warn!("failed to register annotation for {}: {e}", member.entry.id);
    }
}

// --- search -----------------------------------------------------------------

fn search(state: &ServiceState, query: &str, req: &HttpRequest) -> HttpResponse {
    let params = query_params(query);
    let limit = match param(&params, "limit") {
        None => DEFAULT_SEARCH_LIMIT,
        Some(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return HttpResponse::text(400, format!("invalid limit {raw:?}")),
        },
    };
    let min_similarity = match param(&params, "min_similarity") {
        None => 0.0,
        Some(raw) => match raw.parse::<f64>() {
            Ok(v) => v,
            Err(_) => return HttpResponse::text(400, format!("invalid min_similarity {raw:?}")),
        },
    };

    let (results, description) = match param(&params, "kind") {
        Some("category") => {
            let Some(scheme) = &state.scheme else {
                return HttpResponse::text(400, "no categorization scheme bound");
            };
            let Some(term) = param(&params, "term") else {
                return HttpResponse::text(400, "category search requires term");
            };
            if let Some(scheme_param) = param(&params, "scheme") {
                if scheme_param != scheme.scheme_iri() {
                    return HttpResponse::text(400, format!("unknown scheme {scheme_param:?}"));
                }
            }
            let include_subsumed = matches!(
                param(&params, "subsumed").or(param(&params, "include_subsumed")),
                Some("true") | Some("1") | Some("yes")
            );
            match query_by_category(&state.store, scheme, term, include_subsumed, limit) {
                Ok(results) => (results, format!("Entries categorized under {term}")),
                Err(e) => return retrieval_error_response(e),
            }
        }
        Some("ontology") => {
            let Some(iri) = param(&params, "ontology") else {
                return HttpResponse::text(400, "ontology search requires ontology");
            };
            match query_by_semantics(
                &state.registry,
                &state.store,
                SemanticAnchor::Ontology(iri.to_string()),
                min_similarity,
                limit,
            ) {
                Ok(results) => (results, format!("Entries semantically similar to {iri}")),
                Err(e) => return retrieval_error_response(e),
            }
        }
        Some("entry") => {
            let Some(iri) = param(&params, "entry") else {
                return HttpResponse::text(400, "entry search requires entry");
            };
            match query_by_semantics(
                &state.registry,
                &state.store,
                SemanticAnchor::Entry(iri.to_string()),
                min_similarity,
                limit,
            ) {
                Ok(results) => (results, format!("Entries semantically similar to {iri}")),
                Err(e) => return retrieval_error_response(e),
            }
        }
        other => {
            return HttpResponse::text(
                400,
                format!("kind must be category, ontology or entry, got {other:?}"),
            )
        }
    };

    let accept = req.header("Accept").unwrap_or("text/html");
    if accept.contains("application/atom+xml") {
        match results_feed(state, &results) {
            Ok(bytes) => HttpResponse::document(200, FEED_MEDIA_TYPE, bytes),
            Err(e) => HttpResponse::text(500, e.to_string()),
        }
    } else {
        HttpResponse::document(
            200,
            HTML_MEDIA_TYPE,
            build_aggregation_page(&results, &description),
        )
    }
}

fn retrieval_error_response(err: RetrievalError) -> HttpResponse {
    let message = err.to_string();
    match err {
        RetrievalError::AnchorNotAnnotated(_) => HttpResponse::text(404, message),
        RetrievalError::AnchorOntology(RegistryError::UnknownOntology(_)) => {
            HttpResponse::text(404, message)
        }
        RetrievalError::MalformedTerm(_)
        | RetrievalError::UnknownScheme(_)
        | RetrievalError::InvalidLimit
        | RetrievalError::InvalidMinSimilarity(_) => HttpResponse::text(400, message),
        RetrievalError::AnchorOntology(_) | RetrievalError::Store(_) => {
            HttpResponse::text(500, message)
        }
    }
}

/// Search results as an Atom feed: one stub entry per result linking to the
/// member document, with the score carried as an extension element.
fn results_feed(state: &ServiceState, results: &[RankedResult]) -> Result<Vec<u8>, XmlError> {
    let now = now_rfc3339();
    let entries = results
        .iter()
        .map(|result| {
            let mut score = ExtensionElement::new(state.extension_ns.clone(), SCORE_LOCAL_NAME);
            score.attributes.insert(
                "basis".to_string(),
                match result.basis {
                    ResultBasis::CategoryMatch => "category-match".to_string(),
                    ResultBasis::Similarity => "similarity".to_string(),
                },
            );
            score.text = Some(format!("{:.6}", result.score));
            crate::atom::AtomEntry {
                id: result.entry_iri.clone(),
                title: TextConstruct::plain(result.title.clone()),
                updated: now.clone(),
                published: None,
                authors: Vec::new(),
                contributors: Vec::new(),
                categories: Vec::new(),
                links: vec![AtomLink::new(result.member_url.clone()).with_rel("alternate")],
                content: None,
                summary: None,
                rights: None,
                extensions: vec![score],
            }
        })
        .collect();
    let feed = AtomFeed {
        id: format!("{}/search", state.base_url),
        title: TextConstruct::plain("Search results"),
        updated: now,
        categories: Vec::new(),
        links: Vec::new(),
        entries,
    };
    serialize_feed(&feed)
}
