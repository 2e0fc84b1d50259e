//! Property tests: serialization round-trips, model invariants, taxonomy
//! algebra, and similarity laws, each cross-checked against independent
//! brute-force oracles where one exists.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use semblog::atom::{
    has_errors, validate_entry, AtomCategory, AtomContent, AtomEntry, AtomFeed, AtomLink,
    AtomPerson, ContentKind, ExtensionElement, SemanticsExtension, TextConstruct, TextKind,
    Violation, DEFAULT_EXTENSION_NS,
};
use semblog::ontology::{similarity, OntologyDoc};
use semblog::taxonomy::TaxonomyCode;
use semblog::xml::{parse_entry, parse_feed, serialize_entry, serialize_feed};

// --- strategies ---------------------------------------------------------------

/// Element text: printable ASCII plus newline/tab; no carriage returns, which
/// XML parsers normalize away.
fn body_text() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[ -~\\n\\t]{0,48}").unwrap()
}

/// Attribute-safe text: no tabs or newlines (attribute-value normalization
/// would fold them into spaces).
fn attr_text() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[ -~]{0,24}").unwrap()
}

/// Non-empty text that survives whitespace trimming unchanged.
fn trimmed_text() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[!-~]([ -~]{0,18}[!-~])?").unwrap()
}

fn iri() -> impl Strategy<Value = String> {
    prop_oneof![
        proptest::string::string_regex("urn:x-test:[a-z0-9]{1,12}").unwrap(),
        proptest::string::string_regex("http://example\\.org/[a-z0-9]{1,10}").unwrap(),
    ]
}

fn rfc3339() -> impl Strategy<Value = String> {
    (
        2000i32..2030,
        1u32..13,
        1u32..29,
        0u32..24,
        0u32..60,
        0u32..60,
        proptest::option::of(0u32..1000),
    )
        .prop_map(|(y, mo, d, h, mi, s, millis)| match millis {
            Some(ms) => format!("{y:04}-{mo:02}-{d:02}T{h:02}:{mi:02}:{s:02}.{ms:03}Z"),
            None => format!("{y:04}-{mo:02}-{d:02}T{h:02}:{mi:02}:{s:02}Z"),
        })
}

fn person() -> impl Strategy<Value = AtomPerson> {
    (
        trimmed_text(),
        proptest::option::of(iri()),
        proptest::option::of(
            proptest::string::string_regex("[a-z]{1,8}@[a-z]{1,8}\\.org").unwrap(),
        ),
    )
        .prop_map(|(name, uri, email)| AtomPerson { name, uri, email })
}

fn category() -> impl Strategy<Value = AtomCategory> {
    (
        proptest::string::string_regex("[!-~]{1,12}").unwrap(),
        proptest::option::of(iri()),
        proptest::option::of(attr_text()),
    )
        .prop_map(|(term, scheme, label)| AtomCategory {
            term,
            scheme,
            label,
        })
}

fn link() -> impl Strategy<Value = AtomLink> {
    (
        iri(),
        proptest::option::of(proptest::string::string_regex("[a-z]{2,10}").unwrap()),
        proptest::option::of(mime_type()),
    )
        .prop_map(|(href, rel, media_type)| AtomLink {
            href,
            rel,
            media_type,
        })
}

fn mime_type() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-z]{2,8}/[a-z0-9.+-]{2,10}").unwrap()
}

fn content() -> impl Strategy<Value = AtomContent> {
    prop_oneof![
        body_text().prop_map(AtomContent::inline_text),
        body_text().prop_map(AtomContent::inline_html),
        (mime_type(), iri()).prop_map(|(mt, src)| AtomContent::out_of_line(mt, src)),
        (mime_type(), body_text()).prop_map(|(mt, body)| AtomContent {
            kind: ContentKind::InlineText,
            media_type: Some(mt),
            src: None,
            body: Some(body),
        }),
    ]
}

fn text_construct(nonempty: bool) -> impl Strategy<Value = TextConstruct> {
    let value = if nonempty {
        proptest::string::string_regex("[ -~\\n]{1,32}")
            .unwrap()
            .boxed()
    } else {
        body_text().boxed()
    };
    (
        value,
        prop_oneof![Just(TextKind::Text), Just(TextKind::Html)],
    )
        .prop_map(|(value, kind)| TextConstruct { kind, value })
}

fn extension_leaf() -> impl Strategy<Value = ExtensionElement> {
    (
        iri(),
        proptest::string::string_regex("[A-Za-z][a-z0-9]{0,10}")
            .unwrap()
            .prop_filter("reserved local name", |s| s != "Semantics"),
        proptest::collection::btree_map(
            proptest::string::string_regex("[a-z][a-z0-9]{0,8}").unwrap(),
            attr_text(),
            0..3,
        ),
        proptest::option::of(trimmed_text()),
    )
        .prop_map(
            |(namespace_iri, local_name, attributes, text)| ExtensionElement {
                namespace_iri,
                local_name,
                attributes,
                text,
                children: vec![],
            },
        )
}

fn extension() -> impl Strategy<Value = ExtensionElement> {
    (
        extension_leaf(),
        proptest::collection::vec(extension_leaf(), 0..3),
    )
        .prop_map(|(mut parent, children)| {
            parent.children = children;
            parent
        })
}

prop_compose! {
    fn entry()(
        id in iri(),
        title in text_construct(true),
        updated in rfc3339(),
        published in proptest::option::of(rfc3339()),
        authors in proptest::collection::vec(person(), 0..3),
        contributors in proptest::collection::vec(person(), 0..2),
        categories in proptest::collection::vec(category(), 0..3),
        links in proptest::collection::vec(link(), 0..2),
        content in proptest::option::of(content()),
        summary in proptest::option::of(text_construct(false)),
        rights in proptest::option::of(text_construct(false)),
        extensions in proptest::collection::vec(extension(), 0..3),
        semantics in proptest::option::of(iri()),
    ) -> AtomEntry {
        let mut entry = AtomEntry {
            id, title, updated, published, authors, contributors, categories,
            links, content, summary, rights, extensions,
        };
        if let Some(iri) = semantics {
            let sem = SemanticsExtension::offline_at_url(iri).unwrap();
            entry.attach_semantics(sem, DEFAULT_EXTENSION_NS).unwrap();
        }
        entry
    }
}

prop_compose! {
    fn feed()(
        id in iri(),
        title in text_construct(true),
        updated in rfc3339(),
        categories in proptest::collection::vec(category(), 0..2),
        links in proptest::collection::vec(link(), 0..2),
        entries in proptest::collection::vec(entry(), 0..4),
    ) -> AtomFeed {
        // entry ids must be unique within a feed
        let mut seen = BTreeSet::new();
        let entries = entries
            .into_iter()
            .filter(|e| seen.insert(e.id.clone()))
            .collect();
        AtomFeed { id, title, updated, categories, links, entries }
    }
}

// --- round-trip and validation properties ---------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn entry_round_trips_structurally(entry in entry()) {
        prop_assert!(!has_errors(&validate_entry(&entry)));
        let bytes = serialize_entry(&entry).unwrap();
        let reparsed = parse_entry(&bytes).unwrap();
        prop_assert_eq!(reparsed, entry);
    }

    #[test]
    fn serialization_is_deterministic(entry in entry()) {
        prop_assert_eq!(serialize_entry(&entry).unwrap(), serialize_entry(&entry).unwrap());
    }

    #[test]
    fn feed_round_trips_structurally(feed in feed()) {
        let bytes = serialize_feed(&feed).unwrap();
        let reparsed = parse_feed(&bytes).unwrap();
        prop_assert_eq!(reparsed, feed);
    }

    #[test]
    fn blanking_mandatory_fields_names_them(entry in entry()) {
        type Blanker = fn(&mut AtomEntry);
        let cases: [(&str, Blanker); 3] = [
            ("id", |e| e.id.clear()),
            ("title", |e| e.title.value.clear()),
            ("updated", |e| e.updated.clear()),
        ];
        for (field, blank) in cases {
            let mut broken = entry.clone();
            blank(&mut broken);
            let violations = validate_entry(&broken);
            prop_assert!(
                violations.iter().any(|v: &Violation| v.field == field),
                "expected a violation naming {}, got {:?}", field, violations
            );
        }
    }

    #[test]
    fn attach_operations_are_idempotent(entry in entry(), cat in category(), onto in iri()) {
        prop_assume!(cat.scheme.as_ref().is_none_or(|s| semblog::atom::is_absolute_iri(s)));
        let mut target = entry;
        target.attach_category(cat.clone()).unwrap();
        let after_one = target.categories.len();
        target.attach_category(cat).unwrap();
        prop_assert_eq!(target.categories.len(), after_one);

        let sem = SemanticsExtension::offline_at_url(onto).unwrap();
        target.attach_semantics(sem.clone(), DEFAULT_EXTENSION_NS).unwrap();
        let after_sem = target.extensions.len();
        target.attach_semantics(sem, DEFAULT_EXTENSION_NS).unwrap();
        prop_assert_eq!(target.extensions.len(), after_sem);
    }
}

// --- taxonomy properties ----------------------------------------------------------

fn code_string() -> impl Strategy<Value = String> {
    (1u8..=4, 1u8..100, 1u8..100, 1u8..100, 1u8..100).prop_map(|(level, a, b, c, d)| {
        let groups = [a, b, c, d];
        let mut out = String::new();
        for (i, g) in groups.iter().enumerate() {
            if (i as u8) < level {
                out.push_str(&format!("{g:02}"));
            } else {
                out.push_str("00");
            }
        }
        out
    })
}

fn ancestors_oracle(code: &str) -> Vec<String> {
    let level = TaxonomyCode::parse(code).unwrap().level() as usize;
    (1..level)
        .map(|k| format!("{}{}", &code[..2 * k], "0".repeat(8 - 2 * k)))
        .collect()
}

fn chain(code: &str) -> Vec<String> {
    let mut chain = ancestors_oracle(code);
    chain.push(code.to_string());
    chain
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn subsumes_is_reflexive_and_antisymmetric(a in code_string(), b in code_string()) {
        let ca = TaxonomyCode::parse(&a).unwrap();
        let cb = TaxonomyCode::parse(&b).unwrap();
        prop_assert!(ca.subsumes(&ca));
        if ca.subsumes(&cb) && cb.subsumes(&ca) {
            prop_assert_eq!(ca, cb);
        }
    }

    #[test]
    fn subsumes_is_transitive_along_chains(code in code_string(), i in 0usize..4, j in 0usize..4) {
        let full = TaxonomyCode::parse(&code).unwrap();
        let chain = chain(&code);
        let i = i.min(chain.len() - 1);
        let j = j.min(chain.len() - 1);
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let general = TaxonomyCode::parse(&chain[lo]).unwrap();
        let middle = TaxonomyCode::parse(&chain[hi]).unwrap();
        prop_assert!(general.subsumes(&middle));
        prop_assert!(middle.subsumes(&full));
        prop_assert!(general.subsumes(&full));
    }

    #[test]
    fn ancestors_match_suffix_zeroing_oracle(code in code_string()) {
        let parsed = TaxonomyCode::parse(&code).unwrap();
        let got: Vec<String> = parsed.ancestors().iter().map(|c| c.to_string()).collect();
        prop_assert_eq!(got, ancestors_oracle(&code));
        for ancestor in parsed.ancestors() {
            prop_assert!(ancestor.subsumes(&parsed));
        }
    }

    #[test]
    fn common_level_matches_chain_intersection_oracle(a in code_string(), b in code_string()) {
        let ca = TaxonomyCode::parse(&a).unwrap();
        let cb = TaxonomyCode::parse(&b).unwrap();
        let chain_a = chain(&a);
        let chain_b = chain(&b);
        let oracle = chain_a.iter().filter(|c| chain_b.contains(c)).count() as u8;
        prop_assert_eq!(ca.common_level(&cb), oracle);
        prop_assert_eq!(cb.common_level(&ca), oracle);
    }

    #[test]
    fn subsumes_matches_string_prefix_oracle(a in code_string(), b in code_string()) {
        let ca = TaxonomyCode::parse(&a).unwrap();
        let cb = TaxonomyCode::parse(&b).unwrap();
        let la = ca.level() as usize;
        let oracle = ca.level() <= cb.level() && b.starts_with(&a[..2 * la]);
        prop_assert_eq!(ca.subsumes(&cb), oracle);
    }
}

// --- similarity properties ----------------------------------------------------------

#[derive(Debug, Clone)]
struct RandomOntology {
    doc: OntologyDoc,
}

fn random_ontology() -> impl Strategy<Value = RandomOntology> {
    (
        0usize..20,
        proptest::collection::vec((0usize..20, 0usize..20), 0..30),
        0u32..1000,
    )
        .prop_map(|(n, raw_edges, salt)| {
            let mut doc = OntologyDoc::new(format!("urn:x-onto:{salt}"));
            for i in 0..n {
                doc.classes.insert(format!("urn:c:{salt}:{i}"));
            }
            for (a, b) in raw_edges {
                if n == 0 {
                    break;
                }
                let (a, b) = (a % n, b % n);
                // edges point from lower to higher index, so no cycles
                if a < b {
                    doc.subclass_edges
                        .insert((format!("urn:c:{salt}:{a}"), format!("urn:c:{salt}:{b}")));
                }
            }
            RandomOntology { doc }
        })
}

/// Naive fixpoint closure used as the independent oracle for the BFS walk.
fn closure_oracle(doc: &OntologyDoc) -> BTreeSet<String> {
    let mut set = doc.classes.clone();
    loop {
        let mut added = false;
        for (sub, sup) in &doc.subclass_edges {
            if set.contains(sub) && set.insert(sup.clone()) {
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn similarity_laws(a in random_ontology(), b in random_ontology()) {
        let s_ab = similarity(&a.doc, &b.doc);
        let s_ba = similarity(&b.doc, &a.doc);
        prop_assert!((s_ab - s_ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&s_ab));
        if !a.doc.superclass_closure().is_empty() {
            prop_assert!((similarity(&a.doc, &a.doc) - 1.0).abs() < 1e-12);
        } else {
            prop_assert_eq!(similarity(&a.doc, &a.doc), 0.0);
        }
    }

    #[test]
    fn closure_matches_fixpoint_oracle(a in random_ontology()) {
        prop_assert!(a.doc.validate().is_ok());
        prop_assert_eq!(a.doc.superclass_closure(), closure_oracle(&a.doc));
    }

    #[test]
    fn closure_walks_past_undeclared_targets(a in random_ontology(), extra in 0usize..5) {
        // reachability must also hold for hand-built documents whose edges
        // point at classes never declared
        let mut doc = a.doc;
        let classes: Vec<String> = doc.classes.iter().cloned().collect();
        for (i, class) in classes.iter().take(extra).enumerate() {
            doc.subclass_edges.insert((class.clone(), format!("urn:x-ghost:{i}")));
        }
        prop_assert_eq!(doc.superclass_closure(), closure_oracle(&doc));
    }
}
