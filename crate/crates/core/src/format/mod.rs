//! Case interchange: the `.a2` DSL and its JSON mirror.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{build_graph, BuildError, CaseGraph, Node, NodeId};
use crate::structure::structural_check;

mod dsl;
mod json;
mod lexer;
mod write;

pub use json::{CaseDocument, JsonCase, JsonNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dsl,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dsl" | "a2" => Ok(Format::Dsl),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected dsl or json)")),
        }
    }
}

impl Format {
    /// Guess from a file name: `.json` is JSON, anything else the DSL.
    pub fn from_path(path: &str) -> Format {
        if path.to_ascii_lowercase().ends_with(".json") {
            Format::Json
        } else {
            Format::Dsl
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}: {}", self.span, self.message)
    }
}

/// Position-only span used while parsing; the file name is attached at the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl Pos {
    fn with_file(self, file: &str) -> SourceSpan {
        SourceSpan {
            file: file.to_string(),
            line: self.line.max(1),
            column: self.column.max(1),
            length: self.length,
        }
    }
}

/// Where each declaration and reference came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceMap {
    file: String,
    case: Pos,
    /// every declaration of an id, in source order
    decls: BTreeMap<NodeId, Vec<Pos>>,
    /// (referring node, referenced id) -> first reference position
    refs: BTreeMap<(NodeId, NodeId), Pos>,
}

impl SourceMap {
    pub(crate) fn new(file: &str) -> Self {
        SourceMap {
            file: file.to_string(),
            ..Default::default()
        }
    }

    pub(crate) fn set_case(&mut self, pos: Pos) {
        self.case = pos;
    }

    pub(crate) fn declare(&mut self, id: &NodeId, pos: Pos) {
        self.decls.entry(id.clone()).or_default().push(pos);
    }

    pub(crate) fn reference(&mut self, from: &NodeId, to: &NodeId, pos: Pos) {
        self.refs.entry((from.clone(), to.clone())).or_insert(pos);
    }

    pub fn file(&self) -> &str {
        &self.file
    }

    pub fn case_span(&self) -> SourceSpan {
        self.case.with_file(&self.file)
    }

    /// Span of the first declaration of `id`, falling back to the case header.
    pub fn node_span(&self, id: &str) -> SourceSpan {
        self.decls
            .get(id)
            .and_then(|v| v.first())
            .copied()
            .unwrap_or(self.case)
            .with_file(&self.file)
    }

    fn nth_decl(&self, id: &str, n: usize) -> SourceSpan {
        self.decls
            .get(id)
            .and_then(|v| v.get(n).or(v.first()))
            .copied()
            .unwrap_or(self.case)
            .with_file(&self.file)
    }

    fn ref_span(&self, from: &NodeId, to: &NodeId) -> SourceSpan {
        match self.refs.get(&(from.clone(), to.clone())) {
            Some(p) => p.with_file(&self.file),
            None => self.node_span(from.as_str()),
        }
    }
}

/// A successfully parsed case.
#[derive(Debug, Clone)]
pub struct ParsedCase {
    pub graph: CaseGraph,
    pub warnings: Vec<ParseDiagnostic>,
    pub source: SourceMap,
}

/// Parse a case document. Never panics; every failure becomes a diagnostic.
pub fn parse_case(text: &str, format: Format) -> Result<ParsedCase, Vec<ParseDiagnostic>> {
    parse_case_named("<input>", text, format)
}

pub fn parse_case_named(
    file: &str,
    text: &str,
    format: Format,
) -> Result<ParsedCase, Vec<ParseDiagnostic>> {
    let raw = match format {
        Format::Dsl => dsl::parse(file, text)?,
        Format::Json => json::parse(file, text)?,
    };
    finish(raw)
}

/// Declarations as read, before graph construction.
pub(crate) struct RawCase {
    pub title: String,
    pub decls: Vec<Node>,
    pub source: SourceMap,
    pub warnings: Vec<ParseDiagnostic>,
}

fn finish(raw: RawCase) -> Result<ParsedCase, Vec<ParseDiagnostic>> {
    let RawCase {
        title,
        decls,
        source,
        mut warnings,
    } = raw;
    let graph = match build_graph(title, decls) {
        Ok(g) => g,
        Err(e) => return Err(vec![build_diagnostic(&e, &source)]),
    };
    let local: Vec<ParseDiagnostic> = structural_check(&graph)
        .into_iter()
        .filter(|f| f.is_block_local())
        .map(|f| ParseDiagnostic {
            severity: Severity::Error,
            message: f.to_string(),
            span: f
                .node()
                .map_or_else(|| source.case_span(), |n| source.node_span(n.as_str())),
        })
        .collect();
    if !local.is_empty() {
        return Err(local);
    }
    warnings.sort_by_key(|w| (w.span.line, w.span.column));
    Ok(ParsedCase {
        graph,
        warnings,
        source,
    })
}

fn build_diagnostic(e: &BuildError, src: &SourceMap) -> ParseDiagnostic {
    let span = match e {
        BuildError::EmptyCase | BuildError::NoTopClaim => src.case_span(),
        BuildError::DuplicateId { id } => src.nth_decl(id.as_str(), 1),
        BuildError::DanglingReference { from, id } | BuildError::KindMismatch { from, id, .. } => {
            src.ref_span(from, id)
        }
        BuildError::MultipleTopClaims { ids } => {
            src.node_span(ids.get(1).or(ids.first()).map_or("", |i| i.as_str()))
        }
        BuildError::MultipleExactDefeaters { defeaters, .. } => src.node_span(
            defeaters
                .get(1)
                .or(defeaters.first())
                .map_or("", |i| i.as_str()),
        ),
        other => match other.primary_node() {
            Some(n) => src.node_span(n.as_str()),
            None => src.case_span(),
        },
    };
    ParseDiagnostic {
        severity: Severity::Error,
        message: e.to_string(),
        span,
    }
}

/// Canonical text for `g`; nodes appear in id order.
pub fn serialize_case(g: &CaseGraph, format: Format) -> String {
    match format {
        Format::Dsl => write::to_dsl(g),
        Format::Json => json::to_json(g),
    }
}
