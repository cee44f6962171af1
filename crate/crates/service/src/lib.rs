//! JSON-over-HTTP access to one assurance case.
//!
//! [`Service::handle`] is transport agnostic: it takes a method, path, query,
//! two headers and a body, and returns a status with a body. [`router`]
//! mounts it on axum.

use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use a2_core::confidence::ConfidenceInput;
use a2_core::risk::RiskThresholds;
use a2_core::{CaseGraph, LeafInputs};
use serde::{Deserialize, Serialize};

mod error;
mod http;
mod routes;

pub use error::ApiError;
pub use http::{router, serve};

/// Everything an evaluation needs besides the case itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub leaf: LeafInputs,
    pub confidence: ConfidenceInput,
    pub thresholds: RiskThresholds,
    /// Propagate confidence without requiring soundness.
    pub exploratory: bool,
}

/// An immutable view of the session; readers evaluate against one of these.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub revision: u64,
    pub case: Option<Arc<CaseGraph>>,
    pub inputs: Inputs,
}

pub struct Request<'a> {
    pub method: &'a str,
    pub path: &'a str,
    /// Raw query string without the leading `?`.
    pub query: &'a str,
    pub content_type: Option<&'a str>,
    pub if_match: Option<&'a str>,
    pub body: &'a [u8],
}

impl<'a> Request<'a> {
    pub fn new(method: &'a str, path: &'a str) -> Self {
        let (path, query) = path.split_once('?').unwrap_or((path, ""));
        Request {
            method,
            path,
            query,
            content_type: None,
            if_match: None,
            body: &[],
        }
    }

    pub fn json(mut self, body: &'a str) -> Self {
        self.content_type = Some("application/json");
        self.body = body.as_bytes();
        self
    }

    pub fn text(mut self, body: &'a str) -> Self {
        self.content_type = Some("text/plain");
        self.body = body.as_bytes();
        self
    }

    pub fn if_match(mut self, tag: &'a str) -> Self {
        self.if_match = Some(tag);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
    /// Revision the response reflects; sent as the ETag.
    pub revision: u64,
    /// Methods allowed on the path, for 405 responses.
    pub allow: Option<&'static str>,
}

impl Response {
    pub fn json_body(&self) -> serde_json::Value {
        serde_json::from_str(&self.body).unwrap_or(serde_json::Value::Null)
    }
}

pub struct Service {
    state: Mutex<Snapshot>,
    defaults: Inputs,
    persist: Option<PathBuf>,
}

impl Service {
    /// A session with no case loaded, at revision 0.
    pub fn new(defaults: Inputs) -> Service {
        Service {
            state: Mutex::new(Snapshot {
                revision: 0,
                case: None,
                inputs: defaults.clone(),
            }),
            defaults,
            persist: None,
        }
    }

    /// A session holding `g` at revision 1.
    pub fn with_case(g: CaseGraph, defaults: Inputs) -> Service {
        let s = Service::new(defaults);
        {
            let mut st = s.lock();
            st.case = Some(Arc::new(g));
            st.revision = 1;
        }
        s
    }

    /// Write the canonical serialization of the case to `path` after every
    /// mutation of the case. The format follows the file extension.
    pub fn persist_to(mut self, path: impl Into<PathBuf>) -> Service {
        self.persist = Some(path.into());
        self
    }

    pub fn snapshot(&self) -> Snapshot {
        self.lock().clone()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Snapshot> {
        // a panic while holding the lock leaves the previous snapshot intact
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn handle(&self, req: &Request<'_>) -> Response {
        let resp = routes::dispatch(self, req);
        log::info!("{} {} -> {}", req.method, req.path, resp.status);
        resp
    }
}
