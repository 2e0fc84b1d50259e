//! HTTP transport: a small worker pool over `tiny_http`, delegating every
//! request to [`handle_request`](super::handle_request).

use std::io::Read;
use std::net::SocketAddr;
use std::sync::Arc;

use tiny_http::{Header, Response, Server};

use super::{handle_request, HttpRequest, HttpResponse, ServiceError, ServiceState};

/// Largest request body accepted, in bytes.
const MAX_BODY: usize = 64 * 1024 * 1024;

/// Binds the listening socket. Split from [`run`] so the caller can learn
/// the actual port (for `:0` binds) before building state around it.
pub fn bind(addr: &str) -> Result<Server, ServiceError> {
    Server::http(addr).map_err(|e| ServiceError::Bind(e.to_string()))
}

pub fn local_addr(server: &Server) -> Option<SocketAddr> {
    server.server_addr().to_ip()
}

/// Serves requests until the process exits. `workers` threads share the
/// accept queue; per-collection write serialization happens in the store.
pub fn run(server: Server, state: Arc<ServiceState>, workers: usize) {
    let server = Arc::new(server);
    let mut handles = Vec::new();
    for _ in 0..workers.max(1) {
        let server = Arc::clone(&server);
        let state = Arc::clone(&state);
        handles.push(std::thread::spawn(move || worker_loop(&server, &state)));
    }
    for handle in handles {
        let _ = handle.join();
    }
}

fn worker_loop(server: &Server, state: &ServiceState) {
    loop {
        let request = match server.recv() {
            Ok(request) => request,
            Err(e) => {
                log::error!("accept failed: {e}");
                return;
            }
        };
        let (request, parsed) = to_http_request(request);
        match parsed {
            Some(http) => respond(request, handle_request(state, &http)),
            None => respond(request, HttpResponse::text(400, "unreadable request body")),
        }
    }
}

type RawRequest = tiny_http::Request;

fn to_http_request(mut request: RawRequest) -> (RawRequest, Option<HttpRequest>) {
    let method = request.method().as_str().to_string();
    let target = request.url().to_string();
    let headers: Vec<(String, String)> = request
        .headers()
        .iter()
        .map(|h| {
            (
                h.field.as_str().as_str().to_string(),
                h.value.as_str().to_string(),
            )
        })
        .collect();
    let mut body = Vec::new();
    {
        let reader = request.as_reader();
        if reader
            .take(MAX_BODY as u64 + 1)
            .read_to_end(&mut body)
            .is_err()
        {
            return (request, None);
        }
    }
    if body.len() > MAX_BODY {
        return (request, None);
    }
    (
        request,
        Some(HttpRequest {
            method,
            target,
            headers,
            body,
        }),
    )
}

fn respond(request: RawRequest, response: HttpResponse) {
    let mut out = Response::from_data(response.body).with_status_code(response.status);
    for (name, value) in &response.headers {
        if let Ok(header) = Header::from_bytes(name.as_bytes(), value.as_bytes()) {
            out.add_header(header);
        }
    }
    if let Err(e) = request.respond(out) {
        log::debug!("client went away before response: {e}");
    }
}

/// Binds an ephemeral localhost port, builds state around the resulting base
/// URL, and serves it on background threads for the rest of the process.
pub fn spawn_ephemeral<F>(build: F) -> Result<SocketAddr, ServiceError>
where
    F: FnOnce(&str) -> Result<ServiceState, ServiceError>,
{
    let server = bind("127.0.0.1:0")?;
    let addr =
        local_addr(&server).ok_or_else(|| ServiceError::Bind("no local address".to_string()))?;
    let state = build(&format!("http://{addr}"))?;
    std::thread::spawn(move || run(server, Arc::new(state), 4));
    Ok(addr)
}
