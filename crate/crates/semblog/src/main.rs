//! Command-line client and server launcher.
//!
//! Exit codes: 0 success, 1 user error (bad input, validation failure,
//! HTTP 4xx), 2 transport or server error (connection failure, HTTP 5xx).

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use semblog::atom::{
    has_errors, new_entry, validate_entry, AtomCategory, AtomContent, AtomPerson,
    SemanticsExtension, Severity, DEFAULT_EXTENSION_NS,
};
use semblog::config::{
    load_config_file, resolve, ENV_EXTENSION_NS, ENV_SERVER, KEY_EXTENSION_NS, KEY_SERVER,
};
use semblog::service::{self, ServiceConfig, SCORE_LOCAL_NAME};
use semblog::taxonomy::{validate_term, TaxonomyScheme, TermValidation};
use semblog::xml::{parse_entry, parse_feed, serialize_entry};

#[derive(Parser)]
#[command(name = "semblog", version, about = "Semantic Atom blog toolkit")]
struct Cli {
    /// key=value config file (defaults: server, extension_ns)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Launch the blog service
    Serve(ServeArgs),
    /// Compose an entry document and print it
    New(NewArgs),
    /// POST an entry or media file to a collection URL, printing the
    /// member's Location
    Publish {
        url: String,
        file: PathBuf,
        /// Override the media type inferred from the file extension
        #[arg(long)]
        content_type: Option<String>,
    },
    /// GET a member URL and print the document
    Get { url: String },
    /// PUT stdin to a member URL (fetches the current version token unless
    /// --if-match is given)
    Put {
        url: String,
        #[arg(long)]
        if_match: Option<String>,
    },
    /// DELETE a member URL
    Delete { url: String },
    /// Check an entry document; nonzero exit on violations
    Validate {
        file: PathBuf,
        /// Also validate category terms against this scheme fixture
        #[arg(long)]
        taxonomy: Option<PathBuf>,
    },
    /// Attach a semantic annotation to an entry document, rewriting it
    Annotate {
        file: PathBuf,
        ontology_iri: String,
        #[arg(long)]
        extension_ns: Option<String>,
    },
    /// Run a retrieval query against a server's /search route
    Query(QueryArgs),
}

#[derive(Args)]
struct ServeArgs {
    /// Store root directory
    #[arg(long)]
    root: PathBuf,
    /// Bind address
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: String,
    /// External base URL (defaults to http://<bind address>)
    #[arg(long)]
    base_url: Option<String>,
    /// Taxonomy scheme fixture to bind to all collections
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    /// Directory of cached ontology documents, keyed by IRI hash
    #[arg(long)]
    ontology_cache: Option<PathBuf>,
    /// Annotation extension namespace IRI
    #[arg(long)]
    extension_ns: Option<String>,
    /// Collection as name=Title (repeatable; default blog=Blog)
    #[arg(long = "collection")]
    collections: Vec<String>,
    /// Worker threads
    #[arg(long, default_value_t = 4)]
    workers: usize,
}

#[derive(Args)]
struct NewArgs {
    #[arg(long)]
    title: String,
    /// Inline text content
    #[arg(long, conflicts_with = "content_file")]
    content_text: Option<String>,
    /// Read content from a file
    #[arg(long)]
    content_file: Option<PathBuf>,
    /// Content type: text, html, xhtml or a MIME type
    #[arg(long)]
    content_type: Option<String>,
    /// Author name (repeatable)
    #[arg(long = "author")]
    authors: Vec<String>,
    /// Category as term[,scheme[,label]] (repeatable)
    #[arg(long = "category")]
    categories: Vec<String>,
    /// Ontology IRI to attach as the semantic annotation
    #[arg(long)]
    semantics: Option<String>,
    #[arg(long)]
    extension_ns: Option<String>,
}

#[derive(Args)]
struct QueryArgs {
    /// Server base URL (or SEMBLOG_SERVER / config `server`)
    #[arg(long)]
    server: Option<String>,
    /// category, ontology or entry
    #[arg(long)]
    kind: String,
    #[arg(long)]
    term: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// Include entries under subsumed (more specific) terms
    #[arg(long)]
    subsumed: bool,
    #[arg(long)]
    ontology: Option<String>,
    #[arg(long)]
    entry: Option<String>,
    #[arg(long)]
    min_similarity: Option<f64>,
    #[arg(long)]
    limit: Option<usize>,
    /// Save the HTML aggregation page here instead of printing results
    #[arg(long)]
    html: Option<PathBuf>,
    #[arg(long)]
    extension_ns: Option<String>,
}

#[derive(Debug)]
enum CliError {
    /// Bad input, failed validation, HTTP 4xx.
    User(String),
    /// Connection failures and HTTP 5xx.
    Transport(String),
}

impl CliError {
    fn user(e: impl std::fmt::Display) -> Self {
        CliError::User(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Transport(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_config = load_config_file(cli.config.as_deref());
    match cli.command {
        Command::Serve(args) => serve(args, &file_config),
        Command::New(args) => compose(args, &file_config),
        Command::Publish {
            url,
            file,
            content_type,
        } => publish(&url, &file, content_type),
        Command::Get { url } => get(&url),
        Command::Put { url, if_match } => put(&url, if_match),
        Command::Delete { url } => delete(&url),
        Command::Validate { file, taxonomy } => validate(&file, taxonomy.as_deref()),
        Command::Annotate {
            file,
            ontology_iri,
            extension_ns,
        } => annotate(&file, &ontology_iri, extension_ns, &file_config),
        Command::Query(args) => query(args, &file_config),
    }
}

fn resolve_extension_ns(flag: Option<String>, file_config: &BTreeMap<String, String>) -> String {
    resolve(flag, ENV_EXTENSION_NS, file_config, KEY_EXTENSION_NS)
        .unwrap_or_else(|| DEFAULT_EXTENSION_NS.to_string())
}

// --- serve -------------------------------------------------------------------

fn serve(args: ServeArgs, file_config: &BTreeMap<String, String>) -> Result<(), CliError> {
    let server = service::bind(&args.bind)
        .map_err(|e| CliError::Transport(format!("cannot bind {}: {e}", args.bind)))?;
    let base_url = match args.base_url {
        Some(url) => url.trim_end_matches('/').to_string(),
        None => {
            let addr = service::local_addr(&server)
                .ok_or_else(|| CliError::Transport("cannot resolve bound address".into()))?;
            format!("http://{addr}")
        }
    };
    let mut collections = Vec::new();
    for spec in &args.collections {
        let (name, title) = spec
            .split_once('=')
            .ok_or_else(|| CliError::User(format!("--collection must be name=Title: {spec:?}")))?;
        collections.push((name.to_string(), title.to_string()));
    }
    if collections.is_empty() {
        collections.push(("blog".to_string(), "Blog".to_string()));
    }
    let state = ServiceConfig {
        root: args.root,
        base_url: base_url.clone(),
        taxonomy: args.taxonomy,
        ontology_cache: args.ontology_cache,
        extension_ns: resolve_extension_ns(args.extension_ns, file_config),
        collections,
    }
    .build()
    .map_err(|e| CliError::Transport(e.to_string()))?;
    eprintln!("serving on {base_url}");
    service::run(server, Arc::new(state), args.workers);
    Ok(())
}

// --- new ----------------------------------------------------------------------

fn media_type_for_extension(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "xml" | "atom" => "application/atom+xml",
        "txt" => "text/plain",
        "html" | "htm" => "text/html",
        "xhtml" => "application/xhtml+xml",
        "png" => "image/png",
        "jpg" | "jpeg" => "image/jpeg",
        "gif" => "image/gif",
        "svg" => "image/svg+xml",
        "mp3" => "audio/mpeg",
        "ogg" => "audio/ogg",
        "wav" => "audio/wav",
        "mp4" => "video/mp4",
        "webm" => "video/webm",
        _ => "application/octet-stream",
    }
}

fn content_from_args(args: &NewArgs) -> Result<AtomContent, CliError> {
    let (body, default_type) = if let Some(file) = &args.content_file {
        let body = std::fs::read_to_string(file)
            .map_err(|e| CliError::User(format!("cannot read {}: {e}", file.display())))?;
        (body, media_type_for_extension(file))
    } else {
        (args.content_text.clone().unwrap_or_default(), "text/plain")
    };
    let kind = args.content_type.as_deref().unwrap_or(match default_type {
        "text/html" => "html",
        "application/xhtml+xml" => "xhtml",
        _ => "text",
    });
    Ok(match kind {
        "text" => AtomContent::inline_text(body),
        "html" => AtomContent::inline_html(body),
        "xhtml" => AtomContent {
            kind: semblog::atom::ContentKind::InlineXhtml,
            media_type: None,
            src: None,
            body: Some(body),
        },
        mime => AtomContent {
            kind: semblog::atom::ContentKind::InlineText,
            media_type: Some(mime.to_string()),
            src: None,
            body: Some(body),
        },
    })
}

fn parse_category_spec(spec: &str) -> AtomCategory {
    let mut parts = spec.splitn(3, ',');
    let term = parts.next().unwrap_or_default().trim().to_string();
    let mut category = AtomCategory::new(term);
    if let Some(scheme) = parts.next() {
        category.scheme = Some(scheme.trim().to_string());
    }
    if let Some(label) = parts.next() {
        category.label = Some(label.trim().to_string());
    }
    category
}

fn compose(args: NewArgs, file_config: &BTreeMap<String, String>) -> Result<(), CliError> {
    let content = content_from_args(&args)?;
    let authors = args.authors.iter().map(AtomPerson::named).collect();
    let mut entry = new_entry(&args.title, content, authors).map_err(CliError::user)?;
    for spec in &args.categories {
        entry
            .attach_category(parse_category_spec(spec))
            .map_err(CliError::user)?;
    }
    if let Some(iri) = &args.semantics {
        let ns = resolve_extension_ns(args.extension_ns.clone(), file_config);
        let sem = SemanticsExtension::offline_at_url(iri.clone()).map_err(CliError::user)?;
        entry.attach_semantics(sem, &ns).map_err(CliError::user)?;
    }
    let bytes = serialize_entry(&entry).map_err(CliError::user)?;
    print_bytes(&bytes);
    Ok(())
}

// --- HTTP client ---------------------------------------------------------------

struct HttpResult {
    status: u16,
    headers: Vec<(String, String)>,
    body: Vec<u8>,
}

impl HttpResult {
    fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into()
}

fn http(
    method: &str,
    url: &str,
    headers: &[(&str, String)],
    body: Option<&[u8]>,
) -> Result<HttpResult, CliError> {
    let agent = agent();
    let transport = |e: ureq::Error| CliError::Transport(format!("{method} {url}: {e}"));
    let response = match (method, body) {
        ("GET", None) => {
            let mut builder = agent.get(url);
            for (name, value) in headers {
                builder = builder.header(*name, value.as_str());
            }
            builder.call().map_err(transport)?
        }
        ("DELETE", None) => {
            let mut builder = agent.delete(url);
            for (name, value) in headers {
                builder = builder.header(*name, value.as_str());
            }
            builder.call().map_err(transport)?
        }
        ("POST", Some(body)) => {
            let mut builder = agent.post(url);
            for (name, value) in headers {
                builder = builder.header(*name, value.as_str());
            }
            builder.send(body).map_err(transport)?
        }
        ("PUT", Some(body)) => {
            let mut builder = agent.put(url);
            for (name, value) in headers {
                builder = builder.header(*name, value.as_str());
            }
            builder.send(body).map_err(transport)?
        }
        _ => return Err(CliError::User(format!("unsupported method {method}"))),
    };
    let status = response.status().as_u16();
    let headers = response
        .headers()
        .iter()
        .map(|(k, v)| (k.as_str().to_string(), v.to_str().unwrap_or("").to_string()))
        .collect();
    let mut response = response;
    let body = response
        .body_mut()
        .read_to_vec()
        .map_err(|e| CliError::Transport(format!("{method} {url}: reading body: {e}")))?;
    Ok(HttpResult {
        status,
        headers,
        body,
    })
}

/// Maps a response status to the exit-code contract: 2xx passes through,
/// 4xx is a user error, everything else a server error.
fn check_status(result: &HttpResult, context: &str) -> Result<(), CliError> {
    let body = String::from_utf8_lossy(&result.body);
    let body = body.trim();
    match result.status {
        200..=299 => Ok(()),
        400..=499 => Err(CliError::User(format!(
            "{context}: server returned {}: {body}",
            result.status
        ))),
        status => Err(CliError::Transport(format!(
            "{context}: server returned {status}: {body}"
        ))),
    }
}

fn print_bytes(bytes: &[u8]) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = lock.write_all(bytes);
    if !bytes.ends_with(b"\n") {
        let _ = lock.write_all(b"\n");
    }
}

// --- member CRUD -----------------------------------------------------------------

fn publish(url: &str, file: &Path, content_type: Option<String>) -> Result<(), CliError> {
    let bytes = std::fs::read(file)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", file.display())))?;
    let media_type = content_type.unwrap_or_else(|| media_type_for_extension(file).to_string());
    let media_type = if media_type == "application/atom+xml" {
        "application/atom+xml;type=entry".to_string()
    } else {
        media_type
    };
    let result = http("POST", url, &[("Content-Type", media_type)], Some(&bytes))?;
    check_status(&result, "publish")?;
    match result.header("Location") {
        Some(location) => println!("{location}"),
        None => return Err(CliError::Transport("no Location header in response".into())),
    }
    Ok(())
}

fn get(url: &str) -> Result<(), CliError> {
    let result = http("GET", url, &[], None)?;
    check_status(&result, "get")?;
    print_bytes(&result.body);
    Ok(())
}

fn put(url: &str, if_match: Option<String>) -> Result<(), CliError> {
    let etag = match if_match {
        Some(etag) => etag,
        None => {
            let current = http("GET", url, &[], None)?;
            check_status(&current, "put (fetching current version)")?;
            current
                .header("ETag")
                .ok_or_else(|| CliError::Transport("no ETag header on current member".into()))?
                .to_string()
        }
    };
    let mut body = Vec::new();
    std::io::stdin()
        .read_to_end(&mut body)
        .map_err(|e| CliError::User(format!("cannot read stdin: {e}")))?;
    let result = http(
        "PUT",
        url,
        &[
            (
                "Content-Type",
                "application/atom+xml;type=entry".to_string(),
            ),
            ("If-Match", etag),
        ],
        Some(&body),
    )?;
    check_status(&result, "put")?;
    print_bytes(&result.body);
    Ok(())
}

fn delete(url: &str) -> Result<(), CliError> {
    let result = http("DELETE", url, &[], None)?;
    check_status(&result, "delete")?;
    Ok(())
}

// --- validate / annotate ------------------------------------------------------------

fn validate(file: &Path, taxonomy: Option<&Path>) -> Result<(), CliError> {
    let bytes = std::fs::read(file)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", file.display())))?;
    let entry = parse_entry(&bytes).map_err(CliError::user)?;
    let violations = validate_entry(&entry);
    for violation in &violations {
        eprintln!("{violation}");
    }
    let mut failed = has_errors(&violations);
    if let Some(path) = taxonomy {
        let scheme = TaxonomyScheme::load(path).map_err(CliError::user)?;
        for category in &entry.categories {
            if category.scheme.as_deref() != Some(scheme.scheme_iri()) {
                continue;
            }
            match validate_term(category, &scheme) {
                TermValidation::Ok { scheme_label: None } => {}
                TermValidation::Ok {
                    scheme_label: Some(label),
                } => {
                    eprintln!(
                        "warning: category {}: label differs from scheme label {label:?}",
                        category.term
                    );
                }
                other => {
                    eprintln!("error: category {}: {other:?}", category.term);
                    failed = true;
                }
            }
        }
    }
    if failed {
        return Err(CliError::User("document has validation errors".into()));
    }
    let warnings = violations
        .iter()
        .filter(|v| v.severity == Severity::Warning)
        .count();
    if warnings > 0 {
        eprintln!("valid with {warnings} warning(s)");
    }
    Ok(())
}

fn annotate(
    file: &Path,
    ontology_iri: &str,
    extension_ns: Option<String>,
    file_config: &BTreeMap<String, String>,
) -> Result<(), CliError> {
    let bytes = std::fs::read(file)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", file.display())))?;
    let mut entry = parse_entry(&bytes).map_err(CliError::user)?;
    let ns = resolve_extension_ns(extension_ns, file_config);
    let sem = SemanticsExtension::offline_at_url(ontology_iri).map_err(CliError::user)?;
    entry.attach_semantics(sem, &ns).map_err(CliError::user)?;
    let out = serialize_entry(&entry).map_err(CliError::user)?;
    semblog::fsio::write_atomic(file, &out)
        .map_err(|e| CliError::User(format!("cannot rewrite {}: {e}", file.display())))?;
    Ok(())
}

// --- query ----------------------------------------------------------------------------

fn query(args: QueryArgs, file_config: &BTreeMap<String, String>) -> Result<(), CliError> {
    let server =
        resolve(args.server.clone(), ENV_SERVER, file_config, KEY_SERVER).ok_or_else(|| {
            CliError::User("no server: pass --server, set SEMBLOG_SERVER, or configure".into())
        })?;
    let server = server.trim_end_matches('/');

    let mut params: Vec<(&str, String)> = vec![("kind", args.kind.clone())];
    match args.kind.as_str() {
        "category" => {
            let term = args
                .term
                .clone()
                .ok_or_else(|| CliError::User("category query requires --term".into()))?;
            params.push(("term", term));
            if let Some(scheme) = &args.scheme {
                params.push(("scheme", scheme.clone()));
            }
            if args.subsumed {
                params.push(("subsumed", "true".to_string()));
            }
        }
        "ontology" => {
            let iri = args
                .ontology
                .clone()
                .ok_or_else(|| CliError::User("ontology query requires --ontology".into()))?;
            params.push(("ontology", iri));
        }
        "entry" => {
            let iri = args
                .entry
                .clone()
                .ok_or_else(|| CliError::User("entry query requires --entry".into()))?;
            params.push(("entry", iri));
        }
        other => {
            return Err(CliError::User(format!(
                "kind must be category, ontology or entry, got {other:?}"
            )))
        }
    }
    if let Some(min) = args.min_similarity {
        params.push(("min_similarity", min.to_string()));
    }
    if let Some(limit) = args.limit {
        params.push(("limit", limit.to_string()));
    }
    let query_string = url::form_urlencoded::Serializer::new(String::new())
        .extend_pairs(params.iter().map(|(k, v)| (*k, v.as_str())))
        .finish();
    let url = format!("{server}/search?{query_string}");

    if let Some(out) = &args.html {
        let result = http("GET", &url, &[("Accept", "text/html".to_string())], None)?;
        check_status(&result, "query")?;
        std::fs::write(out, &result.body)
            .map_err(|e| CliError::User(format!("cannot write {}: {e}", out.display())))?;
        return Ok(());
    }

    let result = http(
        "GET",
        &url,
        &[("Accept", "application/atom+xml".to_string())],
        None,
    )?;
    check_status(&result, "query")?;
    let feed = parse_feed(&result.body).map_err(CliError::user)?;
    for entry in &feed.entries {
        let score = entry
            .extensions
            .iter()
            .find(|e| e.local_name == SCORE_LOCAL_NAME)
            .and_then(|e| e.text.as_deref())
            .unwrap_or("")
            .trim()
            .to_string();
        let link = entry
            .links
            .iter()
            .find(|l| l.rel.as_deref() == Some("alternate"))
            .map(|l| l.href.as_str())
            .unwrap_or("");
        println!("{}\t{}\t{}", entry.id, score, link);
    }
    Ok(())
}
