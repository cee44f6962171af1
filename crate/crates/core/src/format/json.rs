//! JSON mirror of the DSL: `{"case": {"title", "nodes": [...], "top"}}`.
//!
//! Field names are the DSL keywords; each node object carries a `"node"`
//! discriminator naming its DSL item.

use serde::{Deserialize, Serialize};

use crate::measures::Elicitation;
use crate::model::{
    BlockKind, BlockMode, BlockNode, CaseGraph, ClaimNode, ClaimRole, DefeaterNode, DefeaterStatus,
    EvidenceNode, Exactness, Node, NodeId, SubcaseRef,
};
use crate::validity::Assessment;

use super::{ParseDiagnostic, Pos, RawCase, Severity, SourceMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseDocument {
    pub case: JsonCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonCase {
    pub title: String,
    pub nodes: Vec<JsonNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JsonClaimRole {
    #[default]
    Ordinary,
    Top,
    Side,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

fn yes() -> bool {
    true
}

fn is_true(v: &bool) -> bool {
    *v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase", deny_unknown_fields)]
pub enum JsonNode {
    Claim {
        id: NodeId,
        text: String,
        #[serde(default, skip_serializing_if = "is_default")]
        role: JsonClaimRole,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        justification: Option<String>,
    },
    Assumption {
        id: NodeId,
        text: String,
        prob: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        justification: Option<String>,
    },
    Residual {
        id: NodeId,
        text: String,
        likelihood: f64,
        consequence: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class: Option<String>,
    },
    Evidence {
        id: NodeId,
        description: String,
        assembly: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        posterior: Option<f64>,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        accepted: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        elicit: Option<Elicitation>,
    },
    Block {
        id: NodeId,
        kind: BlockKind,
        parent: NodeId,
        #[serde(default, skip_serializing_if = "is_default")]
        mode: BlockMode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        side: Option<NodeId>,
        sub: Vec<NodeId>,
        justification: String,
    },
    Defeater {
        id: NodeId,
        exactness: Exactness,
        targets: NodeId,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        claim: String,
        #[serde(default)]
        status: DefeaterStatus,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        narrative: Option<String>,
    },
    Subcase {
        id: NodeId,
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        external: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        assessed: Option<Assessment>,
    },
}

impl JsonNode {
    pub fn id(&self) -> &NodeId {
        match self {
            JsonNode::Claim { id, .. }
            | JsonNode::Assumption { id, .. }
            | JsonNode::Residual { id, .. }
            | JsonNode::Evidence { id, .. }
            | JsonNode::Block { id, .. }
            | JsonNode::Defeater { id, .. }
            | JsonNode::Subcase { id, .. } => id,
        }
    }

    fn references(&self) -> Vec<&NodeId> {
        match self {
            JsonNode::Block {
                parent, side, sub, ..
            } => std::iter::once(parent).chain(side).chain(sub).collect(),
            JsonNode::Defeater { targets, .. } => vec![targets],
            _ => Vec::new(),
        }
    }

    pub fn from_node(n: &Node) -> JsonNode {
        match n.clone() {
            Node::Claim(c) => match c.role {
                ClaimRole::Assumption { prob } => JsonNode::Assumption {
                    id: c.id,
                    text: c.text,
                    prob,
                    justification: c.justification,
                },
                ClaimRole::ResidualDoubt {
                    likelihood,
                    consequence,
                    class,
                } => JsonNode::Residual {
                    id: c.id,
                    text: c.text,
                    likelihood,
                    consequence,
                    class,
                },
                role => JsonNode::Claim {
                    id: c.id,
                    text: c.text,
                    role: match role {
                        ClaimRole::Top => JsonClaimRole::Top,
                        ClaimRole::Side => JsonClaimRole::Side,
                        _ => JsonClaimRole::Ordinary,
                    },
                    justification: c.justification,
                },
            },
            Node::Evidence(e) => JsonNode::Evidence {
                id: e.id,
                description: e.description,
                assembly: e.assembly,
                posterior: e.posterior,
                accepted: e.accepted,
                elicit: e.elicitation,
            },
            Node::Block(b) => JsonNode::Block {
                id: b.id,
                kind: b.kind,
                parent: b.parent,
                mode: b.mode,
                side: b.sideclaim,
                sub: b.subclaims,
                justification: b.justification,
            },
            Node::Defeater(d) => JsonNode::Defeater {
                id: d.id,
                exactness: d.exactness,
                targets: d.target,
                claim: d.claim,
                status: d.status,
                narrative: d.narrative,
            },
            Node::Subcase(s) => JsonNode::Subcase {
                id: s.id,
                text: s.text,
                external: s.external,
                assessed: s.assessed,
            },
        }
    }

    pub fn into_node(self) -> Node {
        match self {
            JsonNode::Claim {
                id,
                text,
                role,
                justification,
            } => Node::Claim(ClaimNode {
                id,
                text,
                role: match role {
                    JsonClaimRole::Ordinary => ClaimRole::Ordinary,
                    JsonClaimRole::Top => ClaimRole::Top,
                    JsonClaimRole::Side => ClaimRole::Side,
                },
                justification,
            }),
            JsonNode::Assumption {
                id,
                text,
                prob,
                justification,
            } => Node::Claim(ClaimNode {
                id,
                text,
                role: ClaimRole::Assumption { prob },
                justification,
            }),
            JsonNode::Residual {
                id,
                text,
                likelihood,
                consequence,
                class,
            } => Node::Claim(ClaimNode {
                id,
                text,
                role: ClaimRole::ResidualDoubt {
                    likelihood,
                    consequence,
                    class,
                },
                justification: None,
            }),
            JsonNode::Evidence {
                id,
                description,
                assembly,
                posterior,
                accepted,
                elicit,
            } => Node::Evidence(EvidenceNode {
                id,
                description,
                assembly,
                accepted,
                posterior,
                elicitation: elicit,
            }),
            JsonNode::Block {
                id,
                kind,
                parent,
                mode,
                side,
                sub,
                justification,
            } => Node::Block(BlockNode {
                id,
                kind,
                mode,
                parent,
                subclaims: sub,
                sideclaim: side,
                justification,
            }),
            JsonNode::Defeater {
                id,
                exactness,
                targets,
                claim,
                status,
                narrative,
            } => Node::Defeater(DefeaterNode {
                id,
                claim,
                target: targets,
                exactness,
                status,
                narrative,
            }),
            JsonNode::Subcase {
                id,
                text,
                external,
                assessed,
            } => Node::Subcase(SubcaseRef {
                id,
                text,
                external,
                assessed,
            }),
        }
    }
}

impl CaseDocument {
    pub fn from_graph(g: &CaseGraph) -> CaseDocument {
        CaseDocument {
            case: JsonCase {
                title: g.title().to_string(),
                nodes: g.nodes().map(JsonNode::from_node).collect(),
                top: Some(g.top().clone()),
            },
        }
    }
}

pub(crate) fn to_json(g: &CaseGraph) -> String {
    let mut s = serde_json::to_string_pretty(&CaseDocument::from_graph(g)).unwrap_or_default();
    s.push('\n');
    s
}

/// Line/column of the `n`th occurrence (0-based) of `needle`, else 1:1.
fn locate(text: &str, needle: &str, n: usize) -> Pos {
    let Some((offset, _)) = text.match_indices(needle).nth(n) else {
        return Pos {
            line: 1,
            column: 1,
            length: 0,
        };
    };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Pos {
        line,
        column,
        length: needle.chars().count(),
    }
}

pub(crate) fn parse(file: &str, text: &str) -> Result<RawCase, Vec<ParseDiagnostic>> {
    let doc: CaseDocument = serde_json::from_str(text).map_err(|e| {
        vec![ParseDiagnostic {
            severity: Severity::Error,
            message: format!("invalid case JSON: {e}"),
            span: Pos {
                line: e.line(),
                column: e.column(),
                length: 1,
            }
            .with_file(file),
        }]
    })?;
    let mut source = SourceMap::new(file);
    source.set_case(locate(text, "\"case\"", 0));

    let mut seen: std::collections::BTreeMap<&NodeId, usize> = Default::default();
    for n in &doc.case.nodes {
        let k = seen.entry(n.id()).or_insert(0);
        let quoted = format!("\"{}\"", n.id());
        // nth declaration of the id; references elsewhere may shift this, which only blurs the span
        source.declare(n.id(), locate(text, &quoted, *k));
        *k += 1;
        for r in n.references() {
            source.reference(n.id(), r, locate(text, &format!("\"{r}\""), 0));
        }
    }

    let mut decls: Vec<Node> = doc
        .case
        .nodes
        .into_iter()
        .map(JsonNode::into_node)
        .collect();
    if let Some(top) = &doc.case.top {
        match decls.iter_mut().find(|n| n.id() == top) {
            Some(Node::Claim(c)) if matches!(c.role, ClaimRole::Ordinary | ClaimRole::Top) => {
                c.role = ClaimRole::Top
            }
            _ => {
                return Err(vec![ParseDiagnostic {
                    severity: Severity::Error,
                    message: format!(
                        "`top` names `{top}`, which is not an ordinary claim of this case"
                    ),
                    span: locate(text, "\"top\"", 0).with_file(file),
                }])
            }
        }
    }
    Ok(RawCase {
        title: doc.case.title,
        decls,
        source,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_objects_use_dsl_keywords() {
        let text = r#"{"case": {"title": "j", "top": "TC", "nodes": [
            {"node": "claim", "id": "TC", "text": "t"},
            {"node": "evidence", "id": "E1", "description": "d", "assembly": "a",
             "elicit": {"prior": "neutral", "posterior": 0.9}},
            {"node": "block", "id": "B1", "kind": "incorporation", "parent": "TC", "sub": ["E1"], "justification": "j"}
        ]}}"#;
        let raw = parse("c.json", text).ok().unwrap();
        assert_eq!(raw.decls.len(), 3);
        assert!(matches!(&raw.decls[0], Node::Claim(c) if c.role == ClaimRole::Top));
        assert!(
            matches!(&raw.decls[1], Node::Evidence(e) if e.accepted && e.elicitation.is_some())
        );
    }

    #[test]
    fn unknown_fields_rejected_with_position() {
        let text = "{\"case\": {\"title\": \"j\", \"nodes\": [\n {\"node\": \"claim\", \"id\": \"TC\", \"text\": \"t\", \"colour\": 1}]}}";
        let e = parse("c.json", text).err().unwrap();
        assert_eq!(e[0].span.line, 2);
        assert!(e[0].message.contains("colour"), "{}", e[0].message);
    }

    #[test]
    fn locate_counts_chars() {
        let p = locate("ab\n  é\"x\"", "\"x\"", 0);
        assert_eq!((p.line, p.column, p.length), (2, 4, 3));
    }
}
