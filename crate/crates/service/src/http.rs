use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{header, HeaderValue, StatusCode};
use axum::Router;

use crate::{Request, Service};

const MAX_BODY: usize = 16 * 1024 * 1024;

/// Every path goes to [`Service::handle`].
pub fn router(svc: Arc<Service>) -> Router {
    Router::new().fallback(move |req: axum::extract::Request| {
        let svc = svc.clone();
        async move { forward(&svc, req).await }
    })
}

async fn forward(svc: &Service, req: axum::extract::Request) -> axum::response::Response {
    let (parts, body) = req.into_parts();
    let header = |name: header::HeaderName| {
        parts
            .headers
            .get(name)
            .and_then(|v| v.to_str().ok())
            .map(str::to_owned)
    };
    let content_type = header(header::CONTENT_TYPE);
    let if_match = header(header::IF_MATCH);
    let bytes = match to_bytes(body, MAX_BODY).await {
        Ok(b) => b,
        Err(_) => {
            return axum::response::Response::builder()
                .status(StatusCode::PAYLOAD_TOO_LARGE)
                .header(header::CONTENT_TYPE, "application/json")
                .body(Body::from(
                    "{\"code\":\"body-too-large\",\"message\":\"request body too large\"}\n",
                ))
                .unwrap_or_default();
        }
    };
    let request = Request {
        method: parts.method.as_str(),
        path: parts.uri.path(),
        query: parts.uri.query().unwrap_or(""),
        content_type: content_type.as_deref(),
        if_match: if_match.as_deref(),
        body: &bytes,
    };
    let resp = svc.handle(&request);
    let mut builder = axum::response::Response::builder()
        .status(StatusCode::from_u16(resp.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR))
        .header(header::CONTENT_TYPE, resp.content_type);
    if let Ok(tag) = HeaderValue::from_str(&format!("\"{}\"", resp.revision)) {
        builder = builder.header(header::ETAG, tag);
    }
    if let Some(allow) = resp.allow {
        builder = builder.header(header::ALLOW, allow);
    }
    builder.body(Body::from(resp.body)).unwrap_or_default()
}

/// Serve until the process is stopped.
pub async fn serve(svc: Arc<Service>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(svc)).await
}
