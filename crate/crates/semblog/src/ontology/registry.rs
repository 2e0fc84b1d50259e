//! Persistent annotation registry: which ontology document annotates which
//! entry, plus the ontology documents themselves.
//!
//! Layout under the registry directory:
//!   annotations.log      append-only, one tab-separated record per line
//!   ontologies/<key>.owl structural RDF/XML, keyed by IRI hash
//!
//! Startup replays the log; a torn trailing line (crash mid-append) is
//! dropped with a warning. Reads go through a shared lock, writes through an
//! exclusive one, so readers never observe a half-registered annotation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::RwLock;

use sha2::{Digest, Sha256};

use crate::atom::{is_absolute_iri, is_rfc3339, now_rfc3339};
use crate::fsio;

use super::{parse_ontology, serialize_ontology, OntologyDoc, OntologyError};

const LOG_FILE: &str = "annotations.log";
const ONTOLOGY_DIR: &str = "ontologies";

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("record ontology IRI {record:?} does not match document IRI {doc:?}")]
    IriMismatch { record: String, doc: String },
    #[error("invalid annotation record: {0}")]
    InvalidRecord(String),
    #[error("invalid ontology document: {0}")]
    InvalidDoc(#[from] OntologyError),
    #[error("no stored ontology for {0:?}")]
    UnknownOntology(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One registry row: an entry id, the IRI of the ontology annotating it, and
/// when the pair was registered.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub entry_iri: String,
    pub ontology_iri: String,
    pub registered_at: String,
}

impl AnnotationRecord {
    pub fn now(entry_iri: impl Into<String>, ontology_iri: impl Into<String>) -> Self {
        AnnotationRecord {
            entry_iri: entry_iri.into(),
            ontology_iri: ontology_iri.into(),
            registered_at: now_rfc3339(),
        }
    }
}

/// URL-safe file key for an IRI: truncated hex SHA-256.
pub fn iri_file_key(iri: &str) -> String {
    let digest = Sha256::digest(iri.as_bytes());
    hex::encode(&digest[..16])
}

#[derive(Default)]
struct Inner {
    records: Vec<AnnotationRecord>,
    pairs: BTreeSet<(String, String)>,
    by_entry: BTreeMap<String, Vec<String>>,
    docs: BTreeMap<String, OntologyDoc>,
}

pub struct Registry {
    dir: PathBuf,
    inner: RwLock<Inner>,
}

impl Registry {
    /// Opens (creating if needed) the registry at `dir` and replays its log.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, RegistryError> {
        let dir = dir.into();
        std::fs::create_dir_all(dir.join(ONTOLOGY_DIR))?;
        fsio::clean_temp_files(&dir.join(ONTOLOGY_DIR))?;
        let mut inner = Inner::default();
        let log_path = dir.join(LOG_FILE);
        if log_path.exists() {
            let text = std::fs::read_to_string(&log_path)?;
            for line in text.lines() {
                let mut parts = line.split('\t');
                match (parts.next(), parts.next(), parts.next(), parts.next()) {
                    (Some(entry), Some(ontology), Some(at), None)
                        if is_absolute_iri(entry) && is_absolute_iri(ontology) =>
                    {
                        let record = AnnotationRecord {
                            entry_iri: entry.to_string(),
                            ontology_iri: ontology.to_string(),
                            registered_at: at.to_string(),
                        };
                        insert_record(&mut inner, record);
                    }
                    _ => log::warn!("skipping malformed registry log line: {line:?}"),
                }
            }
        }
        Ok(Registry {
            dir,
            inner: RwLock::new(inner),
        })
    }

    /// Persists an annotation and its ontology document. Re-registering an
    /// existing (entry, ontology) pair is a no-op.
    pub fn register(
        &self,
        record: AnnotationRecord,
        doc: &OntologyDoc,
    ) -> Result<(), RegistryError> {
        if record.ontology_iri != doc.iri {
            return Err(RegistryError::IriMismatch {
                record: record.ontology_iri,
                doc: doc.iri.clone(),
            });
        }
        if !is_absolute_iri(&record.entry_iri) {
            return Err(RegistryError::InvalidRecord(format!(
                "entry IRI {:?} is not absolute",
                record.entry_iri
            )));
        }
        if !is_absolute_iri(&record.ontology_iri) {
            return Err(RegistryError::InvalidRecord(format!(
                "ontology IRI {:?} is not absolute",
                record.ontology_iri
            )));
        }
        if !is_rfc3339(&record.registered_at) {
            return Err(RegistryError::InvalidRecord(format!(
                "timestamp {:?} is not RFC 3339",
                record.registered_at
            )));
        }
        doc.validate()?;

        let mut inner = self.inner.write().expect("registry lock poisoned");
        let pair = (record.entry_iri.clone(), record.ontology_iri.clone());
        let doc_path = self.ontology_path(&record.ontology_iri);
        if !doc_path.exists() || inner.docs.get(&doc.iri) != Some(doc) {
            fsio::write_atomic(&doc_path, &serialize_ontology(doc))?;
        }
        inner.docs.insert(doc.iri.clone(), doc.clone());
        if inner.pairs.contains(&pair) {
            return Ok(());
        }
        fsio::append_line_durable(
            &self.dir.join(LOG_FILE),
            &format!(
                "{}\t{}\t{}",
                record.entry_iri, record.ontology_iri, record.registered_at
            ),
        )?;
        insert_record(&mut inner, record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inner
            .read()
            .expect("registry lock poisoned")
            .records
            .len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> Vec<AnnotationRecord> {
        self.inner
            .read()
            .expect("registry lock poisoned")
            .records
            .clone()
    }

    /// Ontology IRIs registered for an entry, in registration order.
    pub fn ontologies_for_entry(&self, entry_iri: &str) -> Vec<String> {
        self.inner
            .read()
            .expect("registry lock poisoned")
            .by_entry
            .get(entry_iri)
            .cloned()
            .unwrap_or_default()
    }

    /// Every annotated entry with its ontology IRIs.
    pub fn annotated_entries(&self) -> BTreeMap<String, Vec<String>> {
        self.inner
            .read()
            .expect("registry lock poisoned")
            .by_entry
            .clone()
    }

    /// Loads a registered ontology document, from memory when already seen,
    /// otherwise from its stored file.
    pub fn load_ontology(&self, iri: &str) -> Result<OntologyDoc, RegistryError> {
        if let Some(doc) = self
            .inner
            .read()
            .expect("registry lock poisoned")
            .docs
            .get(iri)
        {
            return Ok(doc.clone());
        }
        let path = self.ontology_path(iri);
        if !path.exists() {
            return Err(RegistryError::UnknownOntology(iri.to_string()));
        }
        let doc = parse_ontology(&std::fs::read(&path)?, iri)?;
        self.inner
            .write()
            .expect("registry lock poisoned")
            .docs
            .insert(iri.to_string(), doc.clone());
        Ok(doc)
    }

    fn ontology_path(&self, iri: &str) -> PathBuf {
        self.dir
            .join(ONTOLOGY_DIR)
            .join(format!("{}.owl", iri_file_key(iri)))
    }
}

fn insert_record(inner: &mut Inner, record: AnnotationRecord) {
    let pair = (record.entry_iri.clone(), record.ontology_iri.clone());
    if inner.pairs.insert(pair) {
        inner
            .by_entry
            .entry(record.entry_iri.clone())
            .or_default()
            .push(record.ontology_iri.clone());
        inner.records.push(record);
    }
}
