//! Semantic retrieval: find the entries qualifying a category or similarity
//! criterion, rank them, and author the HTML aggregation page hyperlinking
//! their member documents.

use std::collections::BTreeMap;

use crate::atom::AtomFeed;
use crate::html::escape_html;
use crate::ontology::{similarity, OntologyDoc, Registry, RegistryError};
use crate::store::{BlogStore, StoreError};
use crate::taxonomy::{CodeError, TaxonomyCode, TaxonomyScheme};

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("malformed query term: {0}")]
    MalformedTerm(#[from] CodeError),
    #[error("query scheme {0:?} does not match the configured scheme")]
    UnknownScheme(String),
    #[error("anchor entry {0:?} has no annotation in the registry")]
    AnchorNotAnnotated(String),
    #[error("anchor ontology unusable: {0}")]
    AnchorOntology(#[from] RegistryError),
    #[error("invalid limit: must be at least 1")]
    InvalidLimit,
    #[error("invalid minimum similarity {0}: must lie in [0, 1]")]
    InvalidMinSimilarity(f64),
    #[error("store error: {0}")]
    Store(#[from] StoreError),
}

/// A retrieval request. Each kind carries exactly the fields it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    ByCategory {
        term: String,
        scheme: String,
        include_subsumed: bool,
        limit: usize,
    },
    ByOntology {
        ontology_iri: String,
        min_similarity: f64,
        limit: usize,
    },
    ByEntry {
        entry_iri: String,
        min_similarity: f64,
        limit: usize,
    },
}

/// What qualified an entry for the result list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultBasis {
    CategoryMatch,
    Similarity,
}

impl ResultBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            ResultBasis::CategoryMatch => "category-match",
            ResultBasis::Similarity => "similarity",
        }
    }
}

/// One qualifying entry: its IRI, where to fetch it, the display title, and
/// the score in [0, 1] that ranked it.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    pub entry_iri: String,
    pub member_url: String,
    pub title: String,
    pub score: f64,
    pub basis: ResultBasis,
}

fn rank(mut results: Vec<RankedResult>, limit: usize) -> Vec<RankedResult> {
    results.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.entry_iri.cmp(&b.entry_iri))
    });
    results.truncate(limit);
    results
}

/// Entries categorized with the query term (score 1.0) or, when
/// `include_subsumed` is set, with any term the query term subsumes
/// (score `common_level / 4`, i.e. the match depth mapped onto [0, 1]).
pub fn query_by_category(
    store: &BlogStore,
    scheme: &TaxonomyScheme,
    term: &str,
    include_subsumed: bool,
    limit: usize,
) -> Result<Vec<RankedResult>, RetrievalError> {
    if limit == 0 {
        return Err(RetrievalError::InvalidLimit);
    }
    let query_code = TaxonomyCode::parse(term)?;
    let mut results = Vec::new();
    for collection in store.collection_names() {
        for entry in store.entries(&collection)? {
            let mut best: Option<f64> = None;
            for category in &entry.categories {
                if category.scheme.as_deref() != Some(scheme.scheme_iri()) {
                    continue;
                }
                let Ok(code) = TaxonomyCode::parse(&category.term) else {
                    continue;
                };
                let score = if code == query_code {
                    1.0
                } else if include_subsumed && query_code.subsumes(&code) {
                    f64::from(query_code.common_level(&code)) / 4.0
                } else {
                    continue;
                };
                best = Some(best.map_or(score, |b: f64| b.max(score)));
            }
            if let Some(score) = best {
                results.push(RankedResult {
                    member_url: store.member_url(&collection, &entry.id),
                    title: entry.title.value.clone(),
                    entry_iri: entry.id,
                    score,
                    basis: ResultBasis::CategoryMatch,
                });
            }
        }
    }
    Ok(rank(results, limit))
}

/// Which ontology anchors a similarity query.
#[derive(Debug, Clone, PartialEq)]
pub enum SemanticAnchor {
    Ontology(String),
    /// Resolved through the entry's annotation records.
    Entry(String),
}

/// Entries whose annotating ontologies score at least `min_similarity`
/// against the anchor, best first. An entry annotated several times scores
/// by its best ontology; when the anchor is an entry, that entry itself is
/// excluded from the results.
pub fn query_by_semantics(
    registry: &Registry,
    store: &BlogStore,
    anchor: SemanticAnchor,
    min_similarity: f64,
    limit: usize,
) -> Result<Vec<RankedResult>, RetrievalError> {
    if limit == 0 {
        return Err(RetrievalError::InvalidLimit);
    }
    if !(0.0..=1.0).contains(&min_similarity) {
        return Err(RetrievalError::InvalidMinSimilarity(min_similarity));
    }
    let (anchor_iris, excluded_entry) = match anchor {
        SemanticAnchor::Ontology(iri) => (vec![iri], None),
        SemanticAnchor::Entry(entry_iri) => {
            let iris = registry.ontologies_for_entry(&entry_iri);
            if iris.is_empty() {
                return Err(RetrievalError::AnchorNotAnnotated(entry_iri));
            }
            (iris, Some(entry_iri))
        }
    };
    let anchor_docs = anchor_iris
        .iter()
        .map(|iri| registry.load_ontology(iri))
        .collect::<Result<Vec<_>, _>>()?;

    let mut doc_cache: BTreeMap<String, Option<OntologyDoc>> = BTreeMap::new();
    let mut results = Vec::new();
    for (entry_iri, ontology_iris) in registry.annotated_entries() {
        if excluded_entry.as_deref() == Some(entry_iri.as_str()) {
            continue;
        }
        let mut best: Option<f64> = None;
        for iri in &ontology_iris {
            let doc = doc_cache
                .entry(iri.clone())
                .or_insert_with(|| registry.load_ontology(iri).ok());
            let Some(doc) = doc else {
                log::warn!("skipping unreadable ontology {iri} for {entry_iri}");
                continue;
            };
            for anchor_doc in &anchor_docs {
                let score = similarity(anchor_doc, doc);
                best = Some(best.map_or(score, |b: f64| b.max(score)));
            }
        }
        let Some(score) = best else { continue };
        if score < min_similarity {
            continue;
        }
        let Some((collection, member)) = store.find_member(&entry_iri) else {
            log::warn!("annotated entry {entry_iri} is not stored; skipping");
            continue;
        };
        results.push(RankedResult {
            member_url: store.member_url(&collection, &entry_iri),
            title: member.entry.title.value,
            entry_iri,
            score,
            basis: ResultBasis::Similarity,
        });
    }
    Ok(rank(results, limit))
}

/// Authors the aggregation page: one hyperlink per result in rank order,
/// each showing the entry title and its score. Deterministic for identical
/// inputs.
pub fn build_aggregation_page(results: &[RankedResult], page_title: &str) -> Vec<u8> {
    let mut page = String::new();
    page.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n");
    page.push_str(&format!("<title>{}</title>\n", escape_html(page_title)));
    page.push_str("</head>\n<body>\n");
    page.push_str(&format!("<h1>{}</h1>\n", escape_html(page_title)));
    if results.is_empty() {
        page.push_str("<p>No matches.</p>\n");
    } else {
        page.push_str("<ol>\n");
        for result in results {
            page.push_str(&format!(
                "<li><a href=\"{}\">{}</a> <span class=\"score\">{:.3}</span></li>\n",
                escape_html(&result.member_url),
                escape_html(&result.title),
                result.score,
            ));
        }
        page.push_str("</ol>\n");
    }
    page.push_str("</body>\n</html>\n");
    page.into_bytes()
}

/// Relationship graph of a blog: the topic node, one node per entry, the
/// topic→entry family edges, and entry↔entry edges weighted by the
/// similarity of their annotating ontologies.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationGraph {
    pub topic: String,
    pub entries: Vec<String>,
    pub topic_edges: Vec<(String, String)>,
    pub similarity_edges: Vec<SimilarityEdge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityEdge {
    pub a: String,
    pub b: String,
    pub weight: f64,
}

/// Builds the relationship graph for a feed. Entry pairs appear as weighted
/// edges only when both are annotated; the weight is the best similarity
/// across their ontology pairs.
pub fn relate_entries(feed: &AtomFeed, registry: &Registry) -> RelationGraph {
    let entries: Vec<String> = feed.entries.iter().map(|e| e.id.clone()).collect();
    let topic_edges = entries
        .iter()
        .map(|id| (feed.id.clone(), id.clone()))
        .collect();

    let mut docs: BTreeMap<&str, Vec<OntologyDoc>> = BTreeMap::new();
    for id in &entries {
        let loaded: Vec<OntologyDoc> = registry
            .ontologies_for_entry(id)
            .iter()
            .filter_map(|iri| registry.load_ontology(iri).ok())
            .collect();
        if !loaded.is_empty() {
            docs.insert(id, loaded);
        }
    }
    let mut similarity_edges = Vec::new();
    for (i, a) in entries.iter().enumerate() {
        let Some(docs_a) = docs.get(a.as_str()) else {
            continue;
        };
        for b in entries.iter().skip(i + 1) {
            let Some(docs_b) = docs.get(b.as_str()) else {
                continue;
            };
            let weight = docs_a
                .iter()
                .flat_map(|da| docs_b.iter().map(move |db| similarity(da, db)))
                .fold(0.0f64, f64::max);
            similarity_edges.push(SimilarityEdge {
                a: a.clone(),
                b: b.clone(),
                weight,
            });
        }
    }
    RelationGraph {
        topic: feed.id.clone(),
        entries,
        topic_edges,
        similarity_edges,
    }
}
