// SPDX-License-Identifier: Apache-2.0

//! Plain HTTP/1.1 repository service and the matching client.
//!
//! `GET /updates/{name}/manifest` and `GET /updates/{name}/image` return the
//! stored bytes unchanged.

use std::io::Read;
use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use tiny_http::{Header, Method, Request, Response, Server};

use super::repo::{RepoError, Repository};
use super::source::{PackageSource, SourceError};

/// Upper bound on a fetched body.
pub const MAX_BODY_BYTES: u64 = 16 << 20;

const DEFAULT_WORKERS: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {reason}")]
    Bind { addr: String, reason: String },
    #[error(transparent)]
    Repo(#[from] RepoError),
}

/// A running service. Dropping it stops the workers.
pub struct RepoServer {
    server: Arc<Server>,
    addr: SocketAddr,
    workers: Vec<JoinHandle<()>>,
}

impl RepoServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Blocks until the workers exit, which only happens after `shutdown`
    /// from another handle or process termination.
    pub fn join(mut self) {
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        for _ in &self.workers {
            self.server.unblock();
        }
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

impl Drop for RepoServer {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Starts serving `repo` on `bind` (for example `127.0.0.1:0`).
pub fn serve(repo: Repository, bind: &str) -> Result<RepoServer, ServeError> {
    let repo = Repository::open_existing(repo.root())?;
    let server = Server::http(bind).map_err(|e| ServeError::Bind {
        addr: bind.to_string(),
        reason: e.to_string(),
    })?;
    let addr = server
        .server_addr()
        .to_ip()
        .ok_or_else(|| ServeError::Bind {
            addr: bind.to_string(),
            reason: "not an IP listener".into(),
        })?;
    let server = Arc::new(server);
    let workers = (0..DEFAULT_WORKERS)
        .map(|_| {
            let server = Arc::clone(&server);
            let repo = repo.clone();
            std::thread::spawn(move || {
                while let Ok(req) = server.recv() {
                    respond(&repo, req);
                }
            })
        })
        .collect();
    Ok(RepoServer { server, addr, workers })
}

fn respond(repo: &Repository, req: Request) {
    let (status, body, content_type) = route(repo, req.method(), req.url());
    let resp = Response::from_data(body)
        .with_status_code(status)
        // Always send Content-Length, never chunked transfer coding.
        .with_chunked_threshold(usize::MAX)
        .with_header(Header::from_bytes("Content-Type", content_type).expect("static header"));
    let _ = req.respond(resp);
}

fn route(repo: &Repository, method: &Method, url: &str) -> (u16, Vec<u8>, &'static str) {
    const TEXT: &str = "text/plain";
    if *method != Method::Get {
        return (405, b"method not allowed\n".to_vec(), TEXT);
    }
    let path = url.split('?').next().unwrap_or("");
    let parts: Vec<&str> = path.trim_start_matches('/').split('/').collect();
    let found = match parts.as_slice() {
        ["updates", name, "manifest"] => repo.manifest_bytes(name).map(|b| (b, "application/cbor")),
        ["updates", name, "image"] => repo.image_bytes(name).map(|b| (b, "application/octet-stream")),
        _ => return (404, b"not found\n".to_vec(), TEXT),
    };
    match found {
        Ok((body, ct)) => (200, body, ct),
        Err(RepoError::NotFound(_) | RepoError::InvalidName(_)) => (404, b"not found\n".to_vec(), TEXT),
        Err(e) => (500, format!("{e}\n").into_bytes(), TEXT),
    }
}

/// Fetches packages from a running repository service.
#[derive(Debug, Clone)]
pub struct HttpSource {
    base_url: String,
    agent: ureq::Agent,
}

impl HttpSource {
    pub fn new(base_url: impl Into<String>) -> Self {
        HttpSource {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent: ureq::AgentBuilder::new()
                .timeout(std::time::Duration::from_secs(30))
                .build(),
        }
    }

    pub fn get(&self, path: &str) -> Result<Vec<u8>, SourceError> {
        let url = format!("{}{}", self.base_url, path);
        let resp = match self.agent.get(&url).call() {
            Ok(r) => r,
            Err(ureq::Error::Status(404, _)) => return Err(SourceError::NotFound(path.to_string())),
            Err(ureq::Error::Status(code, _)) => return Err(SourceError::Transport(format!("{url}: HTTP {code}"))),
            Err(e) => return Err(SourceError::Transport(format!("{url}: {e}"))),
        };
        let mut body = Vec::new();
        resp.into_reader()
            .take(MAX_BODY_BYTES + 1)
            .read_to_end(&mut body)
            .map_err(|e| SourceError::Transport(format!("{url}: {e}")))?;
        if body.len() as u64 > MAX_BODY_BYTES {
            return Err(SourceError::Transport(format!("{url}: body exceeds {MAX_BODY_BYTES} bytes")));
        }
        Ok(body)
    }
}

impl PackageSource for HttpSource {
    fn fetch(&self, name: &str) -> Result<(Vec<u8>, Vec<u8>), SourceError> {
        let manifest = self.get(&format!("/updates/{name}/manifest"))?;
        let image = self.get(&format!("/updates/{name}/image"))?;
        Ok((manifest, image))
    }

    fn describe(&self) -> String {
        self.base_url.clone()
    }
}
