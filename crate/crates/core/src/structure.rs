//! Structural validity of a built case.
//!
//! Because every reasoning step is one of the five building blocks, logical
//! validity of a defeater-free argument reduces to the checks here: one top
//! claim, a connected graph, admissible leaves and block arities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Arity, BlockKind, CaseGraph, ClaimRole, Exactness, Node, NodeId, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "finding", rename_all = "kebab-case")]
pub enum StructuralFinding {
    /// Top-claim count differs from one.
    TopClaimCount {
        count: usize,
    },
    /// Nodes not connected (ignoring direction) to the top claim.
    Disconnected {
        nodes: Vec<NodeId>,
    },
    /// A claim with no supporting block that is not an admissible leaf.
    UnsupportedLeaf {
        node: NodeId,
    },
    /// Evidence that no incorporation block incorporates.
    UnincorporatedEvidence {
        node: NodeId,
    },
    ArityViolation {
        block: NodeId,
        kind: BlockKind,
        expected: ArityText,
        got: usize,
    },
    /// A subnode or side-claim of the wrong kind for its block.
    InvalidSubnode {
        block: NodeId,
        node: NodeId,
        found: NodeKind,
    },
    MissingJustification {
        block: NodeId,
    },
    /// Exact defeaters negate a claim or defeater; other targets are rejected.
    ExactDefeaterTarget {
        defeater: NodeId,
        target: NodeId,
        found: NodeKind,
    },
}

/// [`Arity`] rendered for findings; keeps findings totally ordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArityText(pub String);

impl From<Arity> for ArityText {
    fn from(a: Arity) -> Self {
        ArityText(a.to_string())
    }
}

impl StructuralFinding {
    pub fn node(&self) -> Option<&NodeId> {
        match self {
            StructuralFinding::TopClaimCount { .. } => None,
            StructuralFinding::Disconnected { nodes } => nodes.first(),
            StructuralFinding::UnsupportedLeaf { node }
            | StructuralFinding::UnincorporatedEvidence { node } => Some(node),
            StructuralFinding::ArityViolation { block, .. }
            | StructuralFinding::InvalidSubnode { block, .. }
            | StructuralFinding::MissingJustification { block } => Some(block),
            StructuralFinding::ExactDefeaterTarget { defeater, .. } => Some(defeater),
        }
    }

    /// Findings that violate a block's own invariants, as opposed to
    /// incompleteness of the argument as a whole.
    pub fn is_block_local(&self) -> bool {
        matches!(
            self,
            StructuralFinding::ArityViolation { .. }
                | StructuralFinding::InvalidSubnode { .. }
                | StructuralFinding::ExactDefeaterTarget { .. }
        )
    }
}

impl fmt::Display for StructuralFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralFinding::TopClaimCount { count } => {
                write!(f, "expected exactly one top claim, found {count}")
            }
            StructuralFinding::Disconnected { nodes } => write!(
                f,
                "not connected to the top claim: {}",
                crate::model::join_ids(nodes)
            ),
            StructuralFinding::UnsupportedLeaf { node } => write!(
                f,
                "claim `{node}` has no supporting block and is not an assumption, residual doubt or subcase"
            ),
            StructuralFinding::UnincorporatedEvidence { node } => {
                write!(f, "evidence `{node}` is not incorporated by any block")
            }
            StructuralFinding::ArityViolation {
                block,
                kind,
                expected,
                got,
            } => write!(
                f,
                "{} block `{block}` must have {} subnode(s), got {got}",
                kind.keyword(),
                expected.0
            ),
            StructuralFinding::InvalidSubnode { block, node, found } => {
                write!(f, "block `{block}` cannot use {found} `{node}` here")
            }
            StructuralFinding::MissingJustification { block } => {
                write!(f, "block `{block}` has an empty justification")
            }
            StructuralFinding::ExactDefeaterTarget {
                defeater,
                target,
                found,
            } => write!(
                f,
                "exact defeater `{defeater}` targets {found} `{target}`; exact defeaters must target a claim or defeater"
            ),
        }
    }
}

/// All structural findings, sorted. Empty iff the case is structurally valid.
pub fn structural_check(g: &CaseGraph) -> Vec<StructuralFinding> {
    let mut findings = BTreeSet::new();

    let tops = g.claims().filter(|c| c.role == ClaimRole::Top).count();
    if tops != 1 {
        findings.insert(StructuralFinding::TopClaimCount { count: tops });
    }

    let reached = undirected_component(g, g.top());
    let disconnected: Vec<NodeId> = g
        .ids()
        .filter(|id| !reached.contains(*id))
        .cloned()
        .collect();
    if !disconnected.is_empty() {
        findings.insert(StructuralFinding::Disconnected {
            nodes: disconnected,
        });
    }

    for node in g.nodes() {
        match node {
            Node::Claim(c) => {
                let supported = !g.supporters(c.id.as_str()).is_empty()
                    || g.exact_defeater_on(c.id.as_str()).is_some();
                if !c.role.is_leaf_role() && !supported {
                    findings.insert(StructuralFinding::UnsupportedLeaf { node: c.id.clone() });
                }
            }
            Node::Evidence(e) => {
                let incorporated = g.used_by(e.id.as_str()).iter().any(|b| {
                    g.node(b.as_str())
                        .and_then(Node::as_block)
                        .is_some_and(|b| {
                            b.kind == BlockKind::EvidenceIncorporation
                                && b.subclaims.contains(&e.id)
                        })
                });
                if !incorporated {
                    findings
                        .insert(StructuralFinding::UnincorporatedEvidence { node: e.id.clone() });
                }
            }
            Node::Block(b) => {
                let arity = b.kind.arity();
                if !arity.admits(b.subclaims.len()) {
                    findings.insert(StructuralFinding::ArityViolation {
                        block: b.id.clone(),
                        kind: b.kind,
                        expected: arity.into(),
                        got: b.subclaims.len(),
                    });
                }
                for sub in &b.subclaims {
                    let Some(n) = g.node(sub.as_str()) else {
                        continue;
                    };
                    let ok = match b.kind {
                        BlockKind::EvidenceIncorporation => matches!(n, Node::Evidence(_)),
                        _ => matches!(n, Node::Claim(_) | Node::Subcase(_)),
                    };
                    if !ok {
                        findings.insert(StructuralFinding::InvalidSubnode {
                            block: b.id.clone(),
                            node: sub.clone(),
                            found: n.kind(),
                        });
                    }
                }
                if let Some(side) = &b.sideclaim {
                    if let Some(n) = g.node(side.as_str()) {
                        if !matches!(n, Node::Claim(_) | Node::Subcase(_)) {
                            findings.insert(StructuralFinding::InvalidSubnode {
                                block: b.id.clone(),
                                node: side.clone(),
                                found: n.kind(),
                            });
                        }
                    }
                }
                if b.justification.trim().is_empty() {
                    findings.insert(StructuralFinding::MissingJustification {
                        block: b.id.clone(),
                    });
                }
            }
            Node::Defeater(d) => {
                if d.exactness == Exactness::Exact {
                    if let Some(t) = g.node(d.target.as_str()) {
                        if !t.is_claim_like() {
                            findings.insert(StructuralFinding::ExactDefeaterTarget {
                                defeater: d.id.clone(),
                                target: d.target.clone(),
                                found: t.kind(),
                            });
                        }
                    }
                }
            }
            Node::Subcase(_) => {}
        }
    }

    findings.into_iter().collect()
}

fn undirected_component(g: &CaseGraph, start: &NodeId) -> BTreeSet<NodeId> {
    let mut adjacency: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for node in g.nodes() {
        for r in node.references() {
            adjacency.entry(node.id()).or_default().push(r);
            adjacency.entry(r).or_default().push(node.id());
        }
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(id) = stack.pop() {
        if seen.insert(id.clone()) {
            if let Some(next) = adjacency.get(id) {
                stack.extend(next.iter().copied());
            }
        }
    }
    seen
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffectedError {
    #[error("defeater target `{0}` not found")]
    TargetNotFound(NodeId),
    #[error("`{0}` has no parent claim")]
    NoParentClaim(NodeId),
}

/// The claim a defeater calls into question.
///
/// This is the target itself when it is a claim, assumption, residual doubt or
/// defeater, and otherwise the parent claim of the targeted node. Evidence and
/// subcase references take the parent of the first block (by id) using them.
pub fn affected_claim(g: &CaseGraph, target: &NodeId) -> Result<NodeId, AffectedError> {
    let node = g
        .node(target.as_str())
        .ok_or_else(|| AffectedError::TargetNotFound(target.clone()))?;
    match node {
        Node::Claim(_) | Node::Defeater(_) => Ok(target.clone()),
        Node::Block(b) => Ok(b.parent.clone()),
        Node::Evidence(_) | Node::Subcase(_) => g
            .used_by(target.as_str())
            .iter()
            .filter_map(|b| g.node(b.as_str()).and_then(Node::as_block))
            .map(|b| b.parent.clone())
            .next()
            .ok_or_else(|| AffectedError::NoParentClaim(target.clone())),
    }
}

/// Effective defeaters grouped by the claim they affect, in defeater id order.
pub(crate) fn defeaters_by_affected(g: &CaseGraph) -> BTreeMap<NodeId, Vec<NodeId>> {
    let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for d in g.defeaters() {
        if let Ok(affected) = affected_claim(g, &d.target) {
            out.entry(affected).or_default().push(d.id.clone());
        }
    }
    out
}
