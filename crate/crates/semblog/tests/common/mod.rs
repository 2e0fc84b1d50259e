//! Shared helpers for the integration and acceptance suites.
#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use semblog::atom::{
    new_entry, AtomCategory, AtomContent, AtomEntry, AtomPerson, SemanticsExtension,
    DEFAULT_EXTENSION_NS,
};
use semblog::ontology::iri_file_key;
use semblog::service::{spawn_ephemeral, ServiceConfig, ServiceError, ServiceState};
use semblog::xml::serialize_entry;

pub const SCHEME_IRI: &str = "http://www.unspsc.org/UNv1111201";
pub const CAMERA_ONTOLOGY_IRI: &str = "http://www.daman.nic.in/khuba/ontology/camera.owl";
pub const FILM_ONTOLOGY_IRI: &str = "http://example.org/ontology/film_camera.owl";
pub const TRIPOD_ONTOLOGY_IRI: &str = "http://example.org/ontology/tripod.owl";

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap()
}

/// Copies the ontology fixtures into a cache directory under the file names
/// the service resolves annotation IRIs to.
pub fn seed_ontology_cache(cache_dir: &Path) {
    std::fs::create_dir_all(cache_dir).unwrap();
    for (fixture, iri) in [
        ("camera.owl", CAMERA_ONTOLOGY_IRI),
        ("film_camera.owl", FILM_ONTOLOGY_IRI),
        ("tripod.owl", TRIPOD_ONTOLOGY_IRI),
    ] {
        std::fs::write(
            cache_dir.join(format!("{}.owl", iri_file_key(iri))),
            fixture_bytes(fixture),
        )
        .unwrap();
    }
}

pub fn service_config(root: &Path, base_url: &str, with_taxonomy: bool) -> ServiceConfig {
    ServiceConfig {
        root: root.to_path_buf(),
        base_url: base_url.to_string(),
        taxonomy: with_taxonomy.then(|| fixture_path("taxonomy.txt")),
        ontology_cache: None,
        extension_ns: DEFAULT_EXTENSION_NS.to_string(),
        collections: vec![("blog".to_string(), "Blog".to_string())],
    }
}

/// In-process state without a listening socket, for router-level tests.
pub fn build_state(root: &Path, with_taxonomy: bool) -> ServiceState {
    service_config(root, "http://test.local", with_taxonomy)
        .build()
        .unwrap()
}

/// HTTP server on an ephemeral port over a fresh store rooted at `root`.
pub fn spawn_server(root: &Path, with_taxonomy: bool) -> Result<SocketAddr, ServiceError> {
    let root = root.to_path_buf();
    spawn_ephemeral(move |base_url| service_config(&root, base_url, with_taxonomy).build())
}

pub fn entry_with_term(title: &str, term: &str) -> AtomEntry {
    let mut entry = new_entry(
        title,
        AtomContent::inline_text(format!("content of {title}")),
        vec![AtomPerson::named("tester")],
    )
    .unwrap();
    entry
        .attach_category(AtomCategory::new(term).with_scheme(SCHEME_IRI))
        .unwrap();
    entry
}

pub fn annotated_entry(title: &str, ontology_iri: &str) -> AtomEntry {
    let mut entry = new_entry(
        title,
        AtomContent::inline_text(format!("content of {title}")),
        vec![AtomPerson::named("tester")],
    )
    .unwrap();
    entry
        .attach_semantics(
            SemanticsExtension::offline_at_url(ontology_iri).unwrap(),
            DEFAULT_EXTENSION_NS,
        )
        .unwrap();
    entry
}

pub fn entry_xml(entry: &AtomEntry) -> Vec<u8> {
    serialize_entry(entry).unwrap()
}

// --- tiny HTTP client ---------------------------------------------------------

pub struct TestResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl TestResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn body_string(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}

fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into()
}

pub fn http(
    method: &str,
    url: &str,
    headers: &[(&str, &str)],
    body: Option<&[u8]>,
) -> TestResponse {
    let agent = agent();
    let response = match (method, body) {
        ("GET", None) => {
            let mut b = agent.get(url);
            for (k, v) in headers {
                b = b.header(*k, *v);
            }
            b.call().unwrap()
        }
        ("DELETE", None) => {
            let mut b = agent.delete(url);
            for (k, v) in headers {
                b = b.header(*k, *v);
            }
            b.call().unwrap()
        }
        ("POST", Some(body)) => {
            let mut b = agent.post(url);
            for (k, v) in headers {
                b = b.header(*k, *v);
            }
            b.send(body).unwrap()
        }
        ("PUT", Some(body)) => {
            let mut b = agent.put(url);
            for (k, v) in headers {
                b = b.header(*k, *v);
            }
            b.send(body).unwrap()
        }
        _ => panic!("unsupported method {method}"),
    };
    let status = response.status().as_u16();
    let headers = response
        .headers()
        .iter()
        .map(|(k, v)| (k.as_str().to_string(), v.to_str().unwrap_or("").to_string()))
        .collect();
    let mut response = response;
    let body = response.body_mut().read_to_vec().unwrap();
    TestResponse {
        status,
        headers,
        body,
    }
}

/// Panics unless the bytes are a well-formed XML document.
pub fn assert_well_formed_xml(bytes: &[u8]) {
    use quick_xml::events::Event;
    let mut reader = quick_xml::NsReader::from_reader(bytes);
    let mut buf = Vec::new();
    loop {
        match reader.read_resolved_event_into(&mut buf) {
            Ok((_, Event::Eof)) => break,
            Ok(_) => {}
            Err(e) => panic!("response is not well-formed XML: {e}"),
        }
        buf.clear();
    }
}

/// `A` element `href` values in document order, by parsing the page as XML.
pub fn extract_hrefs(html: &[u8]) -> Vec<String> {
    use quick_xml::events::Event;
    let mut reader = quick_xml::Reader::from_reader(html);
    let mut hrefs = Vec::new();
    let mut buf = Vec::new();
    loop {
        match reader
            .read_event_into(&mut buf)
            .expect("page must be well-formed markup")
        {
            Event::Start(e) | Event::Empty(e) => {
                if e.local_name().as_ref() == b"a" {
                    for attr in e.attributes() {
                        let attr = attr.unwrap();
                        if attr.key.as_ref() == b"href" {
                            hrefs.push(
                                attr.normalized_value(quick_xml::XmlVersion::Explicit1_0)
                                    .unwrap()
                                    .into_owned(),
                            );
                        }
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    hrefs
}
