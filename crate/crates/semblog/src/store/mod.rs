//! File-backed collection store for entry documents and media resources.
//!
//! Layout under the store root (collection names never start with a dot, so
//! dotted directories are free for other subsystems):
//!
//!   <root>/<collection>/meta.json                collection title + accepted types
//!   <root>/<collection>/index                    member slugs, newest first
//!   <root>/<collection>/members/<slug>.atom.xml  canonical entry document
//!   <root>/<collection>/members/<slug>.media     media bytes (media-link members)
//!   <root>/<collection>/members/<slug>.mediatype media MIME type
//!
//! Every document and the index are replaced via write-to-temp-then-rename,
//! so a reader never sees a torn file and acknowledged writes survive a
//! crash. Startup reconciles the index against the member files on disk.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::DateTime;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::atom::{
    has_errors, mint_entry_id, now_rfc3339, validate_entry, AtomContent, AtomEntry, AtomFeed,
    TextConstruct, Violation,
};
use crate::fsio;
use crate::xml::{parse_entry, serialize_entry, XmlError};

const META_FILE: &str = "meta.json";
const INDEX_FILE: &str = "index";
const MEMBERS_DIR: &str = "members";
const ENTRY_SUFFIX: &str = ".atom.xml";

/// Media types a collection accepts by default, beside Atom entries.
pub const DEFAULT_ACCEPTED_MEDIA: &[&str] = &[
    "text/html",
    "application/xhtml+xml",
    "image/*",
    "audio/*",
    "video/*",
];

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown collection {0:?}")]
    UnknownCollection(String),
    #[error("collection {0:?} already exists")]
    DuplicateCollection(String),
    #[error("invalid collection name {0:?}")]
    InvalidCollectionName(String),
    #[error("member not found")]
    NotFound,
    #[error("member with id {0:?} already exists in the collection")]
    DuplicateMemberId(String),
    #[error("entry id {given:?} does not match stored id {stored:?}")]
    IdMismatch { given: String, stored: String },
    #[error("version token mismatch: expected {current}, got {given}")]
    EtagMismatch { current: String, given: String },
    #[error("media type {0:?} is not accepted by this collection")]
    UnacceptedMediaType(String),
    #[error("entry violates model invariants: {}", format_violations(.0))]
    InvalidEntry(Vec<Violation>),
    #[error("invalid page token {0:?}")]
    InvalidPageToken(String),
    #[error("page size must be at least 1")]
    InvalidPageSize,
    #[error("{0}")]
    Xml(#[from] XmlError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionMeta {
    pub title: String,
    pub accepted_media_types: Vec<String>,
}

impl CollectionMeta {
    pub fn titled(title: impl Into<String>) -> Self {
        CollectionMeta {
            title: title.into(),
            accepted_media_types: DEFAULT_ACCEPTED_MEDIA
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// A stored member: its entry document, optional media resource, and the
/// opaque version token derived from the canonical serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberResource {
    pub entry: AtomEntry,
    pub media: Option<(String, Vec<u8>)>,
    pub etag: String,
}

/// Input to member creation: a full entry document, or media bytes for which
/// a media-link entry is minted automatically.
#[allow(clippy::large_enum_variant)] // short-lived, created once per request
pub enum MemberInput {
    Entry(AtomEntry),
    Media { media_type: String, bytes: Vec<u8> },
}

#[derive(Default)]
struct CollectionIndex {
    /// Member slugs, newest creation first.
    order: Vec<String>,
    /// Slug → `updated` timestamp, kept in step with the files.
    updated: BTreeMap<String, String>,
}

struct CollectionState {
    dir: PathBuf,
    meta: CollectionMeta,
    write_lock: Mutex<()>,
    index: RwLock<CollectionIndex>,
}

pub struct BlogStore {
    root: PathBuf,
    base_iri: String,
    collections: RwLock<BTreeMap<String, Arc<CollectionState>>>,
}

/// URL-safe member slug: truncated hex SHA-256 of the entry id.
pub fn slug_for_id(id: &str) -> String {
    let digest = Sha256::digest(id.as_bytes());
    hex::encode(&digest[..16])
}

/// Version token: truncated hex SHA-256 of the canonical document bytes.
pub fn etag_of(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..16])
}

fn valid_collection_name(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= 64
        && name
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_')
        && !matches!(name, "service" | "search")
}

impl BlogStore {
    /// Opens the store, loading every collection directory found under the
    /// root and reconciling each index with the member files present.
    pub fn open(root: impl Into<PathBuf>, base_iri: impl Into<String>) -> Result<Self, StoreError> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        let base_iri = base_iri.into().trim_end_matches('/').to_string();
        let mut collections = BTreeMap::new();
        for dir_entry in std::fs::read_dir(&root)? {
            let dir_entry = dir_entry?;
            if !dir_entry.file_type()?.is_dir() {
                continue;
            }
            let Ok(name) = dir_entry.file_name().into_string() else {
                continue;
            };
            if name.starts_with('.') {
                continue;
            }
            let dir = dir_entry.path();
            if !dir.join(META_FILE).exists() {
                continue;
            }
            let state = load_collection(&dir)?;
            collections.insert(name, Arc::new(state));
        }
        Ok(BlogStore {
            root,
            base_iri,
            collections: RwLock::new(collections),
        })
    }

    pub fn base_iri(&self) -> &str {
        &self.base_iri
    }

    pub fn create_collection(&self, name: &str, meta: CollectionMeta) -> Result<(), StoreError> {
        if !valid_collection_name(name) {
            return Err(StoreError::InvalidCollectionName(name.to_string()));
        }
        let mut collections = self.collections.write().expect("store lock poisoned");
        if collections.contains_key(name) {
            return Err(StoreError::DuplicateCollection(name.to_string()));
        }
        let dir = self.root.join(name);
        std::fs::create_dir_all(dir.join(MEMBERS_DIR))?;
        fsio::write_atomic(
            &dir.join(META_FILE),
            &serde_json::to_vec_pretty(&meta).expect("meta"),
        )?;
        write_index(&dir, &[])?;
        collections.insert(
            name.to_string(),
            Arc::new(CollectionState {
                dir,
                meta,
                write_lock: Mutex::new(()),
                index: RwLock::new(CollectionIndex::default()),
            }),
        );
        Ok(())
    }

    /// Creates the collection when absent; an existing one is left as is.
    pub fn ensure_collection(&self, name: &str, meta: CollectionMeta) -> Result<(), StoreError> {
        match self.create_collection(name, meta) {
            Err(StoreError::DuplicateCollection(_)) => Ok(()),
            other => other,
        }
    }

    pub fn collection_names(&self) -> Vec<String> {
        self.collections
            .read()
            .expect("store lock poisoned")
            .keys()
            .cloned()
            .collect()
    }

    pub fn collection_meta(&self, name: &str) -> Result<CollectionMeta, StoreError> {
        Ok(self.collection(name)?.meta.clone())
    }

    fn collection(&self, name: &str) -> Result<Arc<CollectionState>, StoreError> {
        self.collections
            .read()
            .expect("store lock poisoned")
            .get(name)
            .cloned()
            .ok_or_else(|| StoreError::UnknownCollection(name.to_string()))
    }

    /// Member URL under the store's base IRI.
    pub fn member_url(&self, collection: &str, id: &str) -> String {
        format!("{}/{}/{}", self.base_iri, collection, slug_for_id(id))
    }

    pub fn create_member(
        &self,
        collection: &str,
        input: MemberInput,
    ) -> Result<MemberResource, StoreError> {
        let state = self.collection(collection)?;
        match input {
            MemberInput::Entry(mut entry) => {
                if entry.id.is_empty() {
                    entry.id = mint_entry_id();
                }
                if entry.updated.is_empty() {
                    entry.updated = now_rfc3339();
                }
                self.commit_new(&state, entry, None)
            }
            MemberInput::Media { media_type, bytes } => {
                if !media_accepted(&state.meta, &media_type) {
                    return Err(StoreError::UnacceptedMediaType(media_type));
                }
                let id = mint_entry_id();
                let src = self.member_media_url(collection, &id);
                let entry = AtomEntry {
                    id,
                    title: TextConstruct::plain("Media resource"),
                    updated: now_rfc3339(),
                    published: None,
                    authors: Vec::new(),
                    contributors: Vec::new(),
                    categories: Vec::new(),
                    links: Vec::new(),
                    content: Some(AtomContent::out_of_line(media_type.clone(), src)),
                    summary: None,
                    rights: None,
                    extensions: Vec::new(),
                };
                self.commit_new(&state, entry, Some((media_type, bytes)))
            }
        }
    }

    fn member_media_url(&self, collection: &str, id: &str) -> String {
        format!("{}/media", self.member_url(collection, id))
    }

    fn commit_new(
        &self,
        state: &CollectionState,
        entry: AtomEntry,
        media: Option<(String, Vec<u8>)>,
    ) -> Result<MemberResource, StoreError> {
        let violations = validate_entry(&entry);
        if has_errors(&violations) {
            return Err(StoreError::InvalidEntry(violations));
        }
        let slug = slug_for_id(&entry.id);
        let bytes = serialize_entry(&entry)?;

        let _guard = state.write_lock.lock().expect("collection lock poisoned");
        if state
            .index
            .read()
            .expect("index lock poisoned")
            .updated
            .contains_key(&slug)
        {
            return Err(StoreError::DuplicateMemberId(entry.id));
        }
        let members = state.dir.join(MEMBERS_DIR);
        if let Some((media_type, media_bytes)) = &media {
            fsio::write_atomic(&members.join(format!("{slug}.media")), media_bytes)?;
            fsio::write_atomic(
                &members.join(format!("{slug}.mediatype")),
                media_type.as_bytes(),
            )?;
        }
        fsio::write_atomic(&members.join(format!("{slug}{ENTRY_SUFFIX}")), &bytes)?;
        {
            let mut index = state.index.write().expect("index lock poisoned");
            index.order.insert(0, slug.clone());
            index.updated.insert(slug, entry.updated.clone());
            write_index(&state.dir, &index.order)?;
        }
        Ok(MemberResource {
            entry,
            media,
            etag: etag_of(&bytes),
        })
    }

    pub fn read_member(&self, collection: &str, id: &str) -> Result<MemberResource, StoreError> {
        self.read_member_by_slug(collection, &slug_for_id(id))
    }

    pub fn read_member_by_slug(
        &self,
        collection: &str,
        slug: &str,
    ) -> Result<MemberResource, StoreError> {
        let state = self.collection(collection)?;
        read_member_files(&state.dir, slug)
    }

    /// Replaces a member's entry document after a version check. When the
    /// client left `updated` unchanged (or blank) the store bumps it to the
    /// current instant so successive versions never collide.
    pub fn update_member(
        &self,
        collection: &str,
        id: &str,
        entry: AtomEntry,
        expected_etag: &str,
    ) -> Result<MemberResource, StoreError> {
        self.update_member_by_slug(collection, &slug_for_id(id), entry, expected_etag)
    }

    pub fn update_member_by_slug(
        &self,
        collection: &str,
        slug: &str,
        mut entry: AtomEntry,
        expected_etag: &str,
    ) -> Result<MemberResource, StoreError> {
        let state = self.collection(collection)?;
        let slug = slug.to_string();

        let _guard = state.write_lock.lock().expect("collection lock poisoned");
        let current = read_member_files(&state.dir, &slug)?;
        if current.etag != expected_etag {
            return Err(StoreError::EtagMismatch {
                current: current.etag,
                given: expected_etag.to_string(),
            });
        }
        if entry.id.is_empty() {
            entry.id = current.entry.id.clone();
        }
        if entry.id != current.entry.id {
            return Err(StoreError::IdMismatch {
                given: entry.id,
                stored: current.entry.id,
            });
        }
        if entry.updated.is_empty() || entry.updated == current.entry.updated {
            entry.updated = bump_instant(&current.entry.updated);
        }
        let violations = validate_entry(&entry);
        if has_errors(&violations) {
            return Err(StoreError::InvalidEntry(violations));
        }
        let bytes = serialize_entry(&entry)?;
        fsio::write_atomic(
            &state
                .dir
                .join(MEMBERS_DIR)
                .join(format!("{slug}{ENTRY_SUFFIX}")),
            &bytes,
        )?;
        state
            .index
            .write()
            .expect("index lock poisoned")
            .updated
            .insert(slug, entry.updated.clone());
        Ok(MemberResource {
            entry,
            media: current.media,
            etag: etag_of(&bytes),
        })
    }

    pub fn delete_member(&self, collection: &str, id: &str) -> Result<(), StoreError> {
        self.delete_member_by_slug(collection, &slug_for_id(id))
    }

    pub fn delete_member_by_slug(&self, collection: &str, slug: &str) -> Result<(), StoreError> {
        let state = self.collection(collection)?;
        let slug = slug.to_string();

        let _guard = state.write_lock.lock().expect("collection lock poisoned");
        let members = state.dir.join(MEMBERS_DIR);
        let entry_path = members.join(format!("{slug}{ENTRY_SUFFIX}"));
        if !entry_path.exists() {
            return Err(StoreError::NotFound);
        }
        std::fs::remove_file(&entry_path)?;
        let _ = std::fs::remove_file(members.join(format!("{slug}.media")));
        let _ = std::fs::remove_file(members.join(format!("{slug}.mediatype")));
        fsio::sync_dir(&members)?;
        {
            let mut index = state.index.write().expect("index lock poisoned");
            index.order.retain(|s| s != &slug);
            index.updated.remove(&slug);
            write_index(&state.dir, &index.order)?;
        }
        Ok(())
    }

    /// One page of the collection feed, newest member first, plus the token
    /// for the next page when more members remain.
    pub fn list_feed(
        &self,
        collection: &str,
        page_size: usize,
        page_token: Option<&str>,
    ) -> Result<(AtomFeed, Option<String>), StoreError> {
        if page_size == 0 {
            return Err(StoreError::InvalidPageSize);
        }
        let state = self.collection(collection)?;
        let (order, max_updated) = {
            let index = state.index.read().expect("index lock poisoned");
            (order_snapshot(&index), max_updated(&index))
        };
        let offset = match page_token {
            None => 0,
            Some(token) => token
                .parse::<usize>()
                .map_err(|_| StoreError::InvalidPageToken(token.to_string()))?,
        };
        let mut entries = Vec::new();
        for slug in order.iter().skip(offset).take(page_size) {
            entries.push(read_member_files(&state.dir, slug)?.entry);
        }
        let next = if offset.saturating_add(page_size) < order.len() {
            Some((offset + page_size).to_string())
        } else {
            None
        };
        let feed = AtomFeed {
            id: format!("{}/{}", self.base_iri, collection),
            title: TextConstruct::plain(state.meta.title.clone()),
            updated: max_updated.unwrap_or_else(now_rfc3339),
            categories: Vec::new(),
            links: Vec::new(),
            entries,
        };
        Ok((feed, next))
    }

    /// All entries of a collection, newest first.
    pub fn entries(&self, collection: &str) -> Result<Vec<AtomEntry>, StoreError> {
        let state = self.collection(collection)?;
        let order = order_snapshot(&state.index.read().expect("index lock poisoned"));
        order
            .iter()
            .map(|slug| Ok(read_member_files(&state.dir, slug)?.entry))
            .collect()
    }

    /// Locates a member by entry id across all collections.
    pub fn find_member(&self, id: &str) -> Option<(String, MemberResource)> {
        let slug = slug_for_id(id);
        let collections = self.collections.read().expect("store lock poisoned");
        for (name, state) in collections.iter() {
            if state
                .index
                .read()
                .expect("index lock poisoned")
                .updated
                .contains_key(&slug)
            {
                if let Ok(member) = read_member_files(&state.dir, &slug) {
                    return Some((name.clone(), member));
                }
            }
        }
        None
    }
}

fn order_snapshot(index: &CollectionIndex) -> Vec<String> {
    index.order.clone()
}

fn max_updated(index: &CollectionIndex) -> Option<String> {
    index
        .updated
        .values()
        .filter_map(|u| DateTime::parse_from_rfc3339(u).ok().map(|t| (t, u)))
        .max_by_key(|(t, _)| *t)
        .map(|(_, u)| u.clone())
}

/// Next version of an `updated` timestamp: the current instant, nudged
/// forward when the clock has not advanced strictly past the previous value.
/// Keeps successive versions distinct even within one millisecond.
fn bump_instant(previous: &str) -> String {
    let now = now_rfc3339();
    match DateTime::parse_from_rfc3339(previous) {
        Ok(prev) => {
            let now_t = DateTime::parse_from_rfc3339(&now).expect("now_rfc3339 is valid");
            if now_t > prev {
                now
            } else {
                (prev + chrono::Duration::milliseconds(1))
                    .to_utc()
                    .to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
            }
        }
        Err(_) => now,
    }
}

fn media_accepted(meta: &CollectionMeta, media_type: &str) -> bool {
    let bare = media_type.split(';').next().unwrap_or("").trim();
    meta.accepted_media_types.iter().any(|accepted| {
        let accepted = accepted.trim();
        if accepted == "*/*" || accepted == bare {
            return true;
        }
        match accepted.strip_suffix("/*") {
            Some(prefix) => bare.split('/').next() == Some(prefix),
            None => false,
        }
    })
}

fn write_index(dir: &Path, order: &[String]) -> Result<(), StoreError> {
    let mut text = String::new();
    for slug in order {
        text.push_str(slug);
        text.push('\n');
    }
    fsio::write_atomic(&dir.join(INDEX_FILE), text.as_bytes())?;
    Ok(())
}

fn read_member_files(dir: &Path, slug: &str) -> Result<MemberResource, StoreError> {
    let members = dir.join(MEMBERS_DIR);
    let entry_path = members.join(format!("{slug}{ENTRY_SUFFIX}"));
    let bytes = match std::fs::read(&entry_path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(StoreError::NotFound),
        Err(e) => return Err(e.into()),
    };
    let entry = parse_entry(&bytes)?;
    let media_path = members.join(format!("{slug}.media"));
    let media = if media_path.exists() {
        let media_type = std::fs::read_to_string(members.join(format!("{slug}.mediatype")))
            .unwrap_or_else(|_| "application/octet-stream".to_string());
        Some((media_type, std::fs::read(&media_path)?))
    } else {
        None
    };
    Ok(MemberResource {
        entry,
        media,
        etag: etag_of(&bytes),
    })
}

fn load_collection(dir: &Path) -> Result<CollectionState, StoreError> {
    let meta: CollectionMeta = serde_json::from_slice(&std::fs::read(dir.join(META_FILE))?)
        .map_err(|e| StoreError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?;
    let members = dir.join(MEMBERS_DIR);
    std::fs::create_dir_all(&members)?;
    fsio::clean_temp_files(dir)?;
    fsio::clean_temp_files(&members)?;

    // slugs with a member file actually on disk
    let mut on_disk: BTreeMap<String, String> = BTreeMap::new();
    for file in std::fs::read_dir(&members)? {
        let file = file?;
        let Ok(name) = file.file_name().into_string() else {
            continue;
        };
        let Some(slug) = name.strip_suffix(ENTRY_SUFFIX) else {
            continue;
        };
        let entry = read_member_files(dir, slug)?.entry;
        on_disk.insert(slug.to_string(), entry.updated);
    }

    let index_path = dir.join(INDEX_FILE);
    let recorded: Vec<String> = if index_path.exists() {
        std::fs::read_to_string(&index_path)?
            .lines()
            .map(str::to_string)
            .filter(|slug| on_disk.contains_key(slug))
            .collect()
    } else {
        Vec::new()
    };

    // members written but not yet indexed when a crash hit: newest first by
    // their updated stamp, ahead of the recorded order
    let mut unindexed: Vec<&String> = on_disk
        .keys()
        .filter(|slug| !recorded.contains(slug))
        .collect();
    unindexed.sort_by(|a, b| on_disk[b.as_str()].cmp(&on_disk[a.as_str()]));
    let mut order: Vec<String> = unindexed.into_iter().cloned().collect();
    order.extend(recorded);
    write_index(dir, &order)?;

    Ok(CollectionState {
        dir: dir.to_path_buf(),
        meta,
        write_lock: Mutex::new(()),
        index: RwLock::new(CollectionIndex {
            order,
            updated: on_disk,
        }),
    })
}
