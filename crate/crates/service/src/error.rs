use a2_core::format::{ParseDiagnostic, SourceSpan};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<serde_json::Value>,
}

impl ApiError {
    pub fn new(status: u16, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code,
            message: message.into(),
            span: None,
            details: Vec::new(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError::new(400, "malformed-body", message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError::new(404, code, message)
    }

    pub fn unprocessable(code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError::new(422, code, message)
    }

    pub fn with_details<T: Serialize>(mut self, items: &[T]) -> ApiError {
        self.details = items
            .iter()
            .filter_map(|i| serde_json::to_value(i).ok())
            .collect();
        self
    }

    pub fn parse(diags: &[ParseDiagnostic]) -> ApiError {
        let first = diags.first();
        ApiError {
            status: 400,
            code: "parse-error",
            message: first.map_or_else(|| "case does not parse".to_string(), |d| d.message.clone()),
            span: first.map(|d| d.span.clone()),
            details: diags
                .iter()
                .map(|d| serde_json::Value::String(d.to_string()))
                .collect(),
        }
    }
}
