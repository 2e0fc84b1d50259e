//! Hierarchical categorization scheme engine.
//!
//! Codes are 8 decimal digits read as four two-digit groups
//! (segment, family, class, commodity). Trailing `00` groups encode the
//! hierarchy level inside the code itself: `45000000` is a level-1 segment,
//! `45121504` a level-4 commodity. Category terms on entries are validated,
//! compared and subsumed against a scheme loaded from a small text fixture
//! (the real datasets are licensed, so the scheme source of truth here is
//! the fixture file).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::atom::{is_absolute_iri, AtomCategory};

pub const GROUPS: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodeError {
    #[error("code must be exactly 8 characters, got {0}")]
    WrongLength(usize),
    #[error("code must be decimal digits only: {0:?}")]
    NonDigit(String),
    #[error("first group of a code must not be 00: {0:?}")]
    EmptyLeadingGroup(String),
    #[error("non-zero group after a 00 group: {0:?}")]
    GapPattern(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemeError {
    #[error("scheme file is empty")]
    Empty,
    #[error("scheme IRI {0:?} is not an absolute IRI")]
    BadSchemeIri(String),
    #[error("line {line}: expected `code,label`")]
    BadLine { line: usize },
    #[error("line {line}: {source}")]
    BadCode {
        line: usize,
        #[source]
        source: CodeError,
    },
    #[error("duplicate code {0}")]
    DuplicateCode(TaxonomyCode),
    #[error("code {code} is missing its ancestor {ancestor}")]
    MissingAncestor {
        code: TaxonomyCode,
        ancestor: TaxonomyCode,
    },
    #[error("io error: {0}")]
    Io(String),
}

/// A valid 8-digit hierarchical code with its level precomputed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaxonomyCode {
    groups: [u8; GROUPS],
    level: u8,
}

impl TaxonomyCode {
    /// Parses and structurally validates a code string.
    pub fn parse(term: &str) -> Result<Self, CodeError> {
        if term.len() != 2 * GROUPS {
            return Err(CodeError::WrongLength(term.len()));
        }
        if !term.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CodeError::NonDigit(term.to_string()));
        }
        let mut groups = [0u8; GROUPS];
        for (i, chunk) in term.as_bytes().chunks(2).enumerate() {
            groups[i] = (chunk[0] - b'0') * 10 + (chunk[1] - b'0');
        }
        if groups[0] == 0 {
            return Err(CodeError::EmptyLeadingGroup(term.to_string()));
        }
        let level = groups.iter().take_while(|g| **g != 0).count() as u8;
        if groups[level as usize..].iter().any(|g| *g != 0) {
            return Err(CodeError::GapPattern(term.to_string()));
        }
        Ok(TaxonomyCode { groups, level })
    }

    /// Count of leading non-`00` groups; 1 through 4.
    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn groups(&self) -> [u8; GROUPS] {
        self.groups
    }

    /// The codes above this one in the hierarchy, formed by zeroing trailing
    /// groups; ordered shallow to deep. Level-1 codes have none.
    pub fn ancestors(&self) -> Vec<TaxonomyCode> {
        (1..self.level)
            .map(|level| {
                let mut groups = self.groups;
                for g in &mut groups[level as usize..] {
                    *g = 0;
                }
                TaxonomyCode { groups, level }
            })
            .collect()
    }

    /// Number of leading groups equal in both codes, capped at the shallower
    /// level. Equals the level of the deepest common ancestor (or the
    /// shallower code itself when one subsumes the other).
    pub fn common_level(&self, other: &TaxonomyCode) -> u8 {
        let cap = self.level.min(other.level);
        self.groups
            .iter()
            .zip(other.groups.iter())
            .take(cap as usize)
            .take_while(|(a, b)| a == b)
            .count() as u8
    }

    /// True when this code sits at or above `specific` in the hierarchy.
    pub fn subsumes(&self, specific: &TaxonomyCode) -> bool {
        self.level <= specific.level
            && self.groups[..self.level as usize] == specific.groups[..self.level as usize]
    }
}

impl fmt::Display for TaxonomyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in self.groups {
            write!(f, "{g:02}")?;
        }
        Ok(())
    }
}

/// An immutable categorization scheme: an identifying IRI plus the code→label
/// table. Every non-root ancestor of a listed code must itself be listed.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxonomyScheme {
    scheme_iri: String,
    nodes: BTreeMap<TaxonomyCode, String>,
}

impl TaxonomyScheme {
    /// Loads the fixture format: first non-empty line is the scheme IRI,
    /// each following line is `code,label`.
    pub fn load(path: &Path) -> Result<Self, SchemeError> {
        let text = std::fs::read_to_string(path).map_err(|e| SchemeError::Io(e.to_string()))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self, SchemeError> {
        let mut scheme_iri = None;
        let mut nodes = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let line_no = idx + 1;
            if scheme_iri.is_none() {
                if !is_absolute_iri(line) {
                    return Err(SchemeError::BadSchemeIri(line.to_string()));
                }
                scheme_iri = Some(line.to_string());
                continue;
            }
            let (code, label) = line
                .split_once(',')
                .ok_or(SchemeError::BadLine { line: line_no })?;
            let code = TaxonomyCode::parse(code.trim()).map_err(|source| SchemeError::BadCode {
                line: line_no,
                source,
            })?;
            if nodes.insert(code, label.trim().to_string()).is_some() {
                return Err(SchemeError::DuplicateCode(code));
            }
        }
        let scheme = TaxonomyScheme {
            scheme_iri: scheme_iri.ok_or(SchemeError::Empty)?,
            nodes,
        };
        scheme.check_ancestors()?;
        Ok(scheme)
    }

    fn check_ancestors(&self) -> Result<(), SchemeError> {
        for code in self.nodes.keys() {
            for ancestor in code.ancestors() {
                if !self.nodes.contains_key(&ancestor) {
                    return Err(SchemeError::MissingAncestor {
                        code: *code,
                        ancestor,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn scheme_iri(&self) -> &str {
        &self.scheme_iri
    }

    pub fn label(&self, code: &TaxonomyCode) -> Option<&str> {
        self.nodes.get(code).map(String::as_str)
    }

    pub fn contains(&self, code: &TaxonomyCode) -> bool {
        self.nodes.contains_key(code)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TaxonomyCode, &str)> {
        self.nodes.iter().map(|(c, l)| (c, l.as_str()))
    }
}

/// Outcome of checking one category against a scheme. The failure cases are
/// distinguished so the service can answer differently for each.
#[derive(Debug, Clone, PartialEq)]
pub enum TermValidation {
    /// Term is known under this scheme. `scheme_label` carries the scheme's
    /// own label whenever the category's label is absent or differs from it.
    Ok {
        scheme_label: Option<String>,
    },
    SchemeMismatch {
        expected: String,
        found: Option<String>,
    },
    Malformed(CodeError),
    UnknownTerm(String),
}

impl TermValidation {
    pub fn is_ok(&self) -> bool {
        matches!(self, TermValidation::Ok { .. })
    }
}

/// Validates a category's scheme IRI and term against the scheme table.
/// Scheme IRIs compare by exact string equality.
pub fn validate_term(category: &AtomCategory, scheme: &TaxonomyScheme) -> TermValidation {
    if category.scheme.as_deref() != Some(scheme.scheme_iri()) {
        return TermValidation::SchemeMismatch {
            expected: scheme.scheme_iri().to_string(),
            found: category.scheme.clone(),
        };
    }
    let code = match TaxonomyCode::parse(&category.term) {
        Ok(code) => code,
        Err(e) => return TermValidation::Malformed(e),
    };
    match scheme.label(&code) {
        None => TermValidation::UnknownTerm(category.term.clone()),
        Some(label) => {
            let scheme_label = if category.label.as_deref() == Some(label) {
                None
            } else {
                Some(label.to_string())
            };
            TermValidation::Ok { scheme_label }
        }
    }
}
