//! Typed argument-graph model.
//!
//! A case is a set of node declarations (claims, reasoning blocks, evidence,
//! defeaters and external subcase references). [`build_graph`] resolves the
//! references between them into an immutable [`CaseGraph`], rejecting
//! dangling references, duplicate identifiers and cycles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::Elicitation;
use crate::validity::Assessment;

/// Identifier of a node, unique within one case.
///
/// Grammar: `[A-Za-z_][A-Za-z0-9_.-]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeId(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid node identifier {0:?}")]
pub struct InvalidNodeId(pub String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self, InvalidNodeId> {
        let id = id.into();
        if Self::is_valid(&id) {
            Ok(NodeId(id))
        } else {
            Err(InvalidNodeId(id))
        }
    }

    pub fn is_valid(id: &str) -> bool {
        let mut chars = id.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for NodeId {
    type Error = InvalidNodeId;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        NodeId::new(value)
    }
}

impl TryFrom<&str> for NodeId {
    type Error = InvalidNodeId;
    fn try_from(value: &str) -> Result<Self, Self::Error> {
        NodeId::new(value)
    }
}

impl From<NodeId> for String {
    fn from(id: NodeId) -> Self {
        id.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Role of a claim in the argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "kebab-case")]
pub enum ClaimRole {
    Ordinary,
    Top,
    Side,
    /// An explicitly designated assumption, taken as true, with the
    /// numerical probability developers assign to it.
    Assumption {
        prob: f64,
    },
    /// A defeater accepted as a residual doubt, with its risk scores.
    ResidualDoubt {
        likelihood: f64,
        consequence: f64,
        class: Option<String>,
    },
}

impl ClaimRole {
    pub fn is_leaf_role(&self) -> bool {
        matches!(
            self,
            ClaimRole::Assumption { .. } | ClaimRole::ResidualDoubt { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimNode {
    pub id: NodeId,
    pub text: String,
    pub role: ClaimRole,
    pub justification: Option<String>,
}

/// The five permitted reasoning-step kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    Decomposition,
    Substitution,
    Concretion,
    Calculation,
    #[serde(rename = "incorporation")]
    EvidenceIncorporation,
}

/// Number of subnodes a block kind admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arity {
    Exactly(usize),
    AtLeast(usize),
}

impl Arity {
    pub fn admits(self, n: usize) -> bool {
        match self {
            Arity::Exactly(k) => n == k,
            Arity::AtLeast(k) => n >= k,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Exactly(k) => write!(f, "{k}"),
            Arity::AtLeast(k) => write!(f, "at least {k}"),
        }
    }
}

impl BlockKind {
    pub const ALL: [BlockKind; 5] = [
        BlockKind::Decomposition,
        BlockKind::Substitution,
        BlockKind::Concretion,
        BlockKind::Calculation,
        BlockKind::EvidenceIncorporation,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            BlockKind::Decomposition => "decomposition",
            BlockKind::Substitution => "substitution",
            BlockKind::Concretion => "concretion",
            BlockKind::Calculation => "calculation",
            BlockKind::EvidenceIncorporation => "incorporation",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    pub fn arity(self) -> Arity {
        match self {
            BlockKind::Substitution | BlockKind::Concretion | BlockKind::EvidenceIncorporation => {
                Arity::Exactly(1)
            }
            BlockKind::Decomposition | BlockKind::Calculation => Arity::AtLeast(1),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockMode {
    #[default]
    Conjunctive,
    Disjunctive,
}

impl BlockMode {
    pub fn keyword(self) -> &'static str {
        match self {
            BlockMode::Conjunctive => "conjunctive",
            BlockMode::Disjunctive => "disjunctive",
        }
    }
}

/// A reasoning step justifying `parent` from its subnodes and optional side-claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockNode {
    pub id: NodeId,
    pub kind: BlockKind,
    pub mode: BlockMode,
    pub parent: NodeId,
    pub subclaims: Vec<NodeId>,
    pub sideclaim: Option<NodeId>,
    pub justification: String,
}

impl BlockNode {
    /// Side-claim first, then subnodes in declaration order.
    pub fn antecedents(&self) -> impl Iterator<Item = &NodeId> {
        self.sideclaim.iter().chain(self.subclaims.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceNode {
    pub id: NodeId,
    pub description: String,
    /// Locator of the evidence assembly (provenance, methods, results).
    pub assembly: String,
    pub accepted: bool,
    /// Posterior P(C|E) for the "something useful" claim.
    pub posterior: Option<f64>,
    pub elicitation: Option<Elicitation>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    #[default]
    Exploratory,
    Exact,
}

impl Exactness {
    pub fn keyword(self) -> &'static str {
        match self {
            Exactness::Exploratory => "exploratory",
            Exactness::Exact => "exact",
        }
    }
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum DefeaterStatus {
    #[default]
    Doubt,
    Investigating,
    Sustained,
    Refuted,
    Addressed,
    Residual,
}

impl DefeaterStatus {
    pub const ALL: [DefeaterStatus; 6] = [
        DefeaterStatus::Doubt,
        DefeaterStatus::Investigating,
        DefeaterStatus::Sustained,
        DefeaterStatus::Refuted,
        DefeaterStatus::Addressed,
        DefeaterStatus::Residual,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            DefeaterStatus::Doubt => "doubt",
            DefeaterStatus::Investigating => "investigating",
            DefeaterStatus::Sustained => "sustained",
            DefeaterStatus::Refuted => "refuted",
            DefeaterStatus::Addressed => "addressed",
            DefeaterStatus::Residual => "residual",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.keyword() == word)
    }

    /// Addressed defeaters are commentary and residual ones are accepted
    /// doubts; neither takes part in validity propagation.
    pub fn takes_part_in_propagation(self) -> bool {
        !matches!(self, DefeaterStatus::Addressed | DefeaterStatus::Residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefeaterNode {
    pub id: NodeId,
    pub claim: String,
    pub target: NodeId,
    pub exactness: Exactness,
    pub status: DefeaterStatus,
    pub narrative: Option<String>,
}

impl DefeaterNode {
    pub fn is_effective(&self) -> bool {
        self.status.takes_part_in_propagation()
    }
}

/// Reference to a separately developed subcase, used as a leaf (lemma).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcaseRef {
    pub id: NodeId,
    pub text: String,
    pub external: Option<String>,
    pub assessed: Option<Assessment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Claim(ClaimNode),
    Block(BlockNode),
    Evidence(EvidenceNode),
    Defeater(DefeaterNode),
    Subcase(SubcaseRef),
}

/// Coarse node classification used by checks and renderers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Claim,
    Assumption,
    ResidualDoubt,
    Block,
    Evidence,
    Defeater,
    Subcase,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Claim => "claim",
            NodeKind::Assumption => "assumption",
            NodeKind::ResidualDoubt => "residual doubt",
            NodeKind::Block => "block",
            NodeKind::Evidence => "evidence",
            NodeKind::Defeater => "defeater",
            NodeKind::Subcase => "subcase",
        })
    }
}

impl Node {
    pub fn id(&self) -> &NodeId {
        match self {
            Node::Claim(n) => &n.id,
            Node::Block(n) => &n.id,
            Node::Evidence(n) => &n.id,
            Node::Defeater(n) => &n.id,
            Node::Subcase(n) => &n.id,
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Claim(c) => match c.role {
                ClaimRole::Assumption { .. } => NodeKind::Assumption,
                ClaimRole::ResidualDoubt { .. } => NodeKind::ResidualDoubt,
                _ => NodeKind::Claim,
            },
            Node::Block(_) => NodeKind::Block,
            Node::Evidence(_) => NodeKind::Evidence,
            Node::Defeater(_) => NodeKind::Defeater,
            Node::Subcase(_) => NodeKind::Subcase,
        }
    }

    /// Claims (of any role) and defeaters carry a claim of their own.
    pub fn is_claim_like(&self) -> bool {
        matches!(self, Node::Claim(_) | Node::Defeater(_))
    }

    /// Can justify a parent as an antecedent of a non-incorporation block.
    fn is_antecedent_kind(&self) -> bool {
        matches!(self, Node::Claim(_) | Node::Subcase(_) | Node::Evidence(_))
    }

    pub fn as_claim(&self) -> Option<&ClaimNode> {
        match self {
            Node::Claim(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_block(&self) -> Option<&BlockNode> {
        match self {
            Node::Block(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_evidence(&self) -> Option<&EvidenceNode> {
        match self {
            Node::Evidence(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_defeater(&self) -> Option<&DefeaterNode> {
        match self {
            Node::Defeater(d) => Some(d),
            _ => None,
        }
    }

    /// Every node id this declaration refers to, in declaration order.
    pub fn references(&self) -> Vec<&NodeId> {
        match self {
            Node::Block(b) => std::iter::once(&b.parent)
                .chain(b.sideclaim.iter())
                .chain(b.subclaims.iter())
                .collect(),
            Node::Defeater(d) => vec![&d.target],
            _ => Vec::new(),
        }
    }

    /// `(field, value)` for every probability-valued field.
    fn probabilities(&self) -> Vec<(&'static str, f64)> {
        match self {
            Node::Claim(c) => match &c.role {
                ClaimRole::Assumption { prob } => vec![("prob", *prob)],
                ClaimRole::ResidualDoubt {
                    likelihood,
                    consequence,
                    ..
                } => {
                    vec![("likelihood", *likelihood), ("consequence", *consequence)]
                }
                _ => Vec::new(),
            },
            Node::Evidence(e) => {
                let mut out: Vec<_> = e.posterior.map(|p| ("posterior", p)).into_iter().collect();
                if let Some(el) = &e.elicitation {
                    out.extend(
                        el.entries()
                            .map(|(field, j)| (field.keyword(), j.probability())),
                    );
                }
                out
            }
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "kebab-case")]
pub enum BuildError {
    #[error("a case must declare at least one node")]
    EmptyCase,
    #[error("duplicate node id `{id}`")]
    DuplicateId { id: NodeId },
    #[error("`{from}` refers to undeclared node `{id}`")]
    DanglingReference { from: NodeId, id: NodeId },
    #[error("`{from}` refers to `{id}`, which is a {found} but must be {expected}")]
    KindMismatch {
        from: NodeId,
        id: NodeId,
        found: NodeKind,
        expected: String,
    },
    #[error("block `{block}` is disjunctive, but only decomposition blocks may be disjunctive")]
    DisjunctiveNotDecomposition { block: NodeId },
    #[error("`{node}`: {field} = {value} is not a probability in [0, 1]")]
    InvalidProbability {
        node: NodeId,
        field: String,
        value: f64,
    },
    #[error("the case has no top claim")]
    NoTopClaim,
    #[error("the case has more than one top claim: {}", join_ids(ids))]
    MultipleTopClaims { ids: Vec<NodeId> },
    #[error(
        "node `{target}` is targeted by more than one exact defeater: {}",
        join_ids(defeaters)
    )]
    MultipleExactDefeaters {
        target: NodeId,
        defeaters: Vec<NodeId>,
    },
    #[error("cycle detected: {}", path.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(" -> "))]
    CycleDetected { path: Vec<NodeId> },
}

impl BuildError {
    /// The declaration the error is best reported against.
    pub fn primary_node(&self) -> Option<&NodeId> {
        match self {
            BuildError::EmptyCase | BuildError::NoTopClaim => None,
            BuildError::DuplicateId { id } => Some(id),
            BuildError::DanglingReference { from, .. } => Some(from),
            BuildError::KindMismatch { from, .. } => Some(from),
            BuildError::DisjunctiveNotDecomposition { block } => Some(block),
            BuildError::InvalidProbability { node, .. } => Some(node),
            BuildError::MultipleTopClaims { ids } => ids.get(1),
            BuildError::MultipleExactDefeaters { defeaters, .. } => defeaters.get(1),
            BuildError::CycleDetected { path } => path.first(),
        }
    }
}

pub(crate) fn join_ids(ids: &[NodeId]) -> String {
    ids.iter()
        .map(NodeId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// An immutable, reference-resolved assurance case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseGraph {
    title: String,
    top: NodeId,
    nodes: BTreeMap<NodeId, Node>,
    /// claim or defeater -> blocks whose parent it is
    supporters: BTreeMap<NodeId, Vec<NodeId>>,
    /// node -> blocks that use it as a subnode or side-claim
    used_by: BTreeMap<NodeId, Vec<NodeId>>,
    /// node -> defeaters pointing at it
    defeaters_on: BTreeMap<NodeId, Vec<NodeId>>,
}

const NO_IDS: &[NodeId] = &[];

impl CaseGraph {
    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn top(&self) -> &NodeId {
        &self.top
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &BlockNode> {
        self.nodes.values().filter_map(Node::as_block)
    }

    pub fn evidence(&self) -> impl Iterator<Item = &EvidenceNode> {
        self.nodes.values().filter_map(Node::as_evidence)
    }

    pub fn defeaters(&self) -> impl Iterator<Item = &DefeaterNode> {
        self.nodes.values().filter_map(Node::as_defeater)
    }

    pub fn claims(&self) -> impl Iterator<Item = &ClaimNode> {
        self.nodes.values().filter_map(Node::as_claim)
    }

    /// Blocks whose parent is `id`, in id order.
    pub fn supporters(&self, id: &str) -> &[NodeId] {
        self.supporters.get(id).map_or(NO_IDS, Vec::as_slice)
    }

    /// Blocks using `id` as a subnode or side-claim, in id order.
    pub fn used_by(&self, id: &str) -> &[NodeId] {
        self.used_by.get(id).map_or(NO_IDS, Vec::as_slice)
    }

    /// Defeaters whose target is `id`, in id order.
    pub fn defeaters_on(&self, id: &str) -> &[NodeId] {
        self.defeaters_on.get(id).map_or(NO_IDS, Vec::as_slice)
    }

    /// The exact defeater (if any) targeting `id` that takes part in propagation.
    pub fn exact_defeater_on(&self, id: &str) -> Option<&DefeaterNode> {
        self.defeaters_on(id)
            .iter()
            .filter_map(|d| self.node(d.as_str()).and_then(Node::as_defeater))
            .find(|d| d.exactness == Exactness::Exact && d.is_effective())
    }

    /// The declarations this graph was built from, in id order.
    pub fn decls(&self) -> Vec<Node> {
        self.nodes.values().cloned().collect()
    }

    /// Nodes of the main argument: everything reachable from the top claim
    /// through block parent/subnode/side-claim edges, without entering defeaters.
    pub fn main_argument(&self) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.top.clone()];
        while let Some(id) = stack.pop() {
            if !seen.insert(id.clone()) {
                continue;
            }
            match self.node(id.as_str()) {
                Some(Node::Block(b)) => stack.extend(b.antecedents().cloned()),
                Some(Node::Claim(_)) => stack.extend(self.supporters(id.as_str()).iter().cloned()),
                _ => {}
            }
        }
        seen
    }

    /// Graph isomorphism on ids, kinds, edges and fields, with numeric
    /// fields compared to within `tolerance`.
    pub fn isomorphic(&self, other: &CaseGraph, tolerance: f64) -> bool {
        if self.title != other.title || self.top != other.top || self.len() != other.len() {
            return false;
        }
        self.nodes
            .iter()
            .zip(other.nodes.iter())
            .all(|((ia, a), (ib, b))| {
                ia == ib
                    && match (serde_json::to_value(a), serde_json::to_value(b)) {
                        (Ok(va), Ok(vb)) => values_close(&va, &vb, tolerance),
                        _ => false,
                    }
            })
    }

    /// Build a new graph with `f` applied to the declarations.
    pub fn rebuild(&self, f: impl FnOnce(&mut Vec<Node>)) -> Result<CaseGraph, BuildError> {
        let mut decls = self.decls();
        f(&mut decls);
        build_graph(self.title.clone(), decls)
    }
}

fn values_close(a: &serde_json::Value, b: &serde_json::Value, tol: f64) -> bool {
    use serde_json::Value;
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) => (x - y).abs() <= tol,
            _ => x == y,
        },
        (Value::Array(xs), Value::Array(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| values_close(x, y, tol))
        }
        (Value::Object(xs), Value::Object(ys)) => {
            xs.len() == ys.len()
                && xs
                    .iter()
                    .all(|(k, x)| ys.get(k).is_some_and(|y| values_close(x, y, tol)))
        }
        _ => a == b,
    }
}

/// Resolve declarations into a [`CaseGraph`].
///
/// Validation is order independent: every check walks declarations in id
/// order, so the same set of declarations yields the same error.
pub fn build_graph(title: impl Into<String>, decls: Vec<Node>) -> Result<CaseGraph, BuildError> {
    if decls.is_empty() {
        return Err(BuildError::EmptyCase);
    }

    let mut nodes = BTreeMap::new();
    let mut duplicates = BTreeSet::new();
    for node in decls {
        let id = node.id().clone();
        if nodes.insert(id.clone(), node).is_some() {
            duplicates.insert(id);
        }
    }
    if let Some(id) = duplicates.into_iter().next() {
        return Err(BuildError::DuplicateId { id });
    }

    for node in nodes.values() {
        for (field, value) in node.probabilities() {
            if !(0.0..=1.0).contains(&value) {
                return Err(BuildError::InvalidProbability {
                    node: node.id().clone(),
                    field: field.to_string(),
                    value,
                });
            }
        }
    }

    for node in nodes.values() {
        for r in node.references() {
            if !nodes.contains_key(r) {
                return Err(BuildError::DanglingReference {
                    from: node.id().clone(),
                    id: r.clone(),
                });
            }
        }
    }

    for node in nodes.values() {
        match node {
            Node::Block(b) => {
                let parent = &nodes[&b.parent];
                let parent_ok = match parent {
                    Node::Claim(c) => !c.role.is_leaf_role(),
                    Node::Defeater(_) => true,
                    _ => false,
                };
                if !parent_ok {
                    return Err(BuildError::KindMismatch {
                        from: b.id.clone(),
                        id: b.parent.clone(),
                        found: parent.kind(),
                        expected: "a non-leaf claim or a defeater".into(),
                    });
                }
                for r in b.antecedents() {
                    let n = &nodes[r];
                    if !n.is_antecedent_kind() {
                        return Err(BuildError::KindMismatch {
                            from: b.id.clone(),
                            id: r.clone(),
                            found: n.kind(),
                            expected: "a claim, evidence or subcase".into(),
                        });
                    }
                }
                if b.mode == BlockMode::Disjunctive && b.kind != BlockKind::Decomposition {
                    return Err(BuildError::DisjunctiveNotDecomposition {
                        block: b.id.clone(),
                    });
                }
            }
            Node::Defeater(_) | Node::Claim(_) | Node::Evidence(_) | Node::Subcase(_) => {}
        }
    }

    let tops: Vec<NodeId> = nodes
        .values()
        .filter_map(Node::as_claim)
        .filter(|c| c.role == ClaimRole::Top)
        .map(|c| c.id.clone())
        .collect();
    let top = match tops.as_slice() {
        [] => return Err(BuildError::NoTopClaim),
        [top] => top.clone(),
        _ => return Err(BuildError::MultipleTopClaims { ids: tops }),
    };

    let mut supporters: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut used_by: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut defeaters_on: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for node in nodes.values() {
        match node {
            Node::Block(b) => {
                supporters
                    .entry(b.parent.clone())
                    .or_default()
                    .push(b.id.clone());
                let mut seen = BTreeSet::new();
                for r in b.antecedents() {
                    if seen.insert(r) {
                        used_by.entry(r.clone()).or_default().push(b.id.clone());
                    }
                }
            }
            Node::Defeater(d) => defeaters_on
                .entry(d.target.clone())
                .or_default()
                .push(d.id.clone()),
            _ => {}
        }
    }

    for (target, ds) in &defeaters_on {
        let exact: Vec<NodeId> = ds
            .iter()
            .filter(|d| {
                nodes[*d]
                    .as_defeater()
                    .is_some_and(|d| d.exactness == Exactness::Exact)
            })
            .cloned()
            .collect();
        if exact.len() > 1 {
            return Err(BuildError::MultipleExactDefeaters {
                target: target.clone(),
                defeaters: exact,
            });
        }
    }

    let graph = CaseGraph {
        title: title.into(),
        top,
        nodes,
        supporters,
        used_by,
        defeaters_on,
    };
    if let Some(path) = find_cycle(&graph) {
        return Err(BuildError::CycleDetected { path });
    }
    Ok(graph)
}

/// Dependency successors: a claim depends on its supporting blocks, a block on
/// its side-claim and subnodes, and any node on the defeaters pointing at it.
pub(crate) fn dependencies<'g>(g: &'g CaseGraph, id: &str) -> Vec<&'g NodeId> {
    let mut out: Vec<&NodeId> = Vec::new();
    match g.node(id) {
        Some(Node::Block(b)) => out.extend(b.antecedents()),
        Some(Node::Claim(_)) | Some(Node::Defeater(_)) => out.extend(g.supporters(id)),
        _ => {}
    }
    out.extend(g.defeaters_on(id));
    out
}

/// All ids with every node after its dependencies.
pub(crate) fn topological_order(g: &CaseGraph) -> Vec<NodeId> {
    let mut done: BTreeSet<&NodeId> = BTreeSet::new();
    let mut out = Vec::with_capacity(g.len());
    for start in g.ids() {
        if done.contains(start) {
            continue;
        }
        let mut stack: Vec<(&NodeId, std::vec::IntoIter<&NodeId>)> =
            vec![(start, dependencies(g, start.as_str()).into_iter())];
        let mut on_stack: BTreeSet<&NodeId> = BTreeSet::from([start]);
        while let Some((id, it)) = stack.last_mut() {
            match it.next() {
                Some(next) => {
                    if !done.contains(next) && on_stack.insert(next) {
                        stack.push((next, dependencies(g, next.as_str()).into_iter()));
                    }
                }
                None => {
                    let id = *id;
                    done.insert(id);
                    on_stack.remove(id);
                    out.push(id.clone());
                    stack.pop();
                }
            }
        }
    }
    out
}

fn find_cycle(g: &CaseGraph) -> Option<Vec<NodeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let mut marks: BTreeMap<&NodeId, Mark> = g.ids().map(|id| (id, Mark::Fresh)).collect();

    // start from the top claim so reported paths read top-down
    for start in std::iter::once(g.top()).chain(g.ids()) {
        if marks[start] != Mark::Fresh {
            continue;
        }
        // iterative DFS; `path` mirrors the active stack
        let mut path: Vec<&NodeId> = vec![start];
        let mut iters: Vec<std::vec::IntoIter<&NodeId>> =
            vec![dependencies(g, start.as_str()).into_iter()];
        marks.insert(start, Mark::Active);
        while let Some(it) = iters.last_mut() {
            match it.next() {
                Some(next) => match marks[next] {
                    Mark::Active => {
                        let from = path.iter().position(|p| *p == next).unwrap_or(0);
                        let mut cycle: Vec<NodeId> =
                            path[from..].iter().map(|p| (*p).clone()).collect();
                        cycle.push(next.clone());
                        return Some(cycle);
                    }
                    Mark::Fresh => {
                        marks.insert(next, Mark::Active);
                        path.push(next);
                        iters.push(dependencies(g, next.as_str()).into_iter());
                    }
                    Mark::Done => {}
                },
                None => {
                    if let Some(done) = path.pop() {
                        marks.insert(done, Mark::Done);
                    }
                    iters.pop();
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn id(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn claim(i: &str, role: ClaimRole) -> Node {
        Node::Claim(ClaimNode {
            id: id(i),
            text: format!("claim {i}"),
            role,
            justification: None,
        })
    }

    fn evidence(i: &str) -> Node {
        Node::Evidence(EvidenceNode {
            id: id(i),
            description: "tests".into(),
            assembly: "assembly/1".into(),
            accepted: true,
            posterior: Some(0.9),
            elicitation: None,
        })
    }

    fn block(i: &str, kind: BlockKind, parent: &str, subs: &[&str]) -> Node {
        Node::Block(BlockNode {
            id: id(i),
            kind,
            mode: BlockMode::Conjunctive,
            parent: id(parent),
            subclaims: subs.iter().map(|s| id(s)).collect(),
            sideclaim: None,
            justification: "because".into(),
        })
    }

    #[test]
    fn node_id_grammar() {
        assert!(NodeId::is_valid("TC"));
        assert!(NodeId::is_valid("_x.1-b"));
        assert!(!NodeId::is_valid(""));
        assert!(!NodeId::is_valid("1abc"));
        assert!(!NodeId::is_valid("a b"));
        assert!(NodeId::new("-x").is_err());
    }

    #[test]
    fn minimal_case_builds() {
        let g = build_graph(
            "minimal",
            vec![
                claim("TC", ClaimRole::Top),
                evidence("E1"),
                block("B1", BlockKind::EvidenceIncorporation, "TC", &["E1"]),
            ],
        )
        .unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.top().as_str(), "TC");
        assert_eq!(g.supporters("TC"), &[id("B1")]);
        assert_eq!(g.used_by("E1"), &[id("B1")]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let err = build_graph(
            "loop",
            vec![
                claim("TC", ClaimRole::Top),
                block("B1", BlockKind::Substitution, "TC", &["TC"]),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            BuildError::CycleDetected {
                path: vec![id("TC"), id("B1"), id("TC")]
            }
        );
    }

    #[test]
    fn undeclared_subclaim_is_dangling() {
        let err = build_graph(
            "dangling",
            vec![
                claim("TC", ClaimRole::Top),
                block("B1", BlockKind::Substitution, "TC", &["S9"]),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            BuildError::DanglingReference {
                from: id("B1"),
                id: id("S9")
            }
        );
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = build_graph(
            "dup",
            vec![
                claim("TC", ClaimRole::Top),
                claim("TC", ClaimRole::Ordinary),
            ],
        )
        .unwrap_err();
        assert_eq!(err, BuildError::DuplicateId { id: id("TC") });
    }

    #[test]
    fn top_claim_is_required_and_unique() {
        assert_eq!(
            build_graph("none", vec![claim("A", ClaimRole::Ordinary)]).unwrap_err(),
            BuildError::NoTopClaim
        );
        assert!(matches!(
            build_graph(
                "two",
                vec![claim("A", ClaimRole::Top), claim("B", ClaimRole::Top)]
            ),
            Err(BuildError::MultipleTopClaims { .. })
        ));
        assert_eq!(
            build_graph("empty", vec![]).unwrap_err(),
            BuildError::EmptyCase
        );
    }

    #[test]
    fn defeater_edges_participate_in_cycle_detection() {
        // D targets TC while its own subcase uses TC as a subclaim
        let err = build_graph(
            "defeater loop",
            vec![
                claim("TC", ClaimRole::Top),
                Node::Defeater(DefeaterNode {
                    id: id("D"),
                    claim: "TC is wrong".into(),
                    target: id("TC"),
                    exactness: Exactness::Exploratory,
                    status: DefeaterStatus::Investigating,
                    narrative: None,
                }),
                block("BD", BlockKind::Substitution, "D", &["TC"]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::CycleDetected { .. }), "{err}");
    }

    #[test]
    fn probabilities_are_range_checked() {
        let err = build_graph(
            "p",
            vec![
                claim("TC", ClaimRole::Top),
                claim("A", ClaimRole::Assumption { prob: 1.5 }),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::InvalidProbability { .. }));
    }

    #[test]
    fn disjunctive_mode_only_on_decomposition() {
        let mut b = block("B1", BlockKind::Substitution, "TC", &["S"]);
        if let Node::Block(b) = &mut b {
            b.mode = BlockMode::Disjunctive;
        }
        let err = build_graph(
            "d",
            vec![
                claim("TC", ClaimRole::Top),
                claim("S", ClaimRole::Ordinary),
                b,
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            BuildError::DisjunctiveNotDecomposition { block: id("B1") }
        );
    }

    #[test]
    fn build_is_order_independent() {
        let decls = vec![
            claim("TC", ClaimRole::Top),
            evidence("E1"),
            block("B1", BlockKind::EvidenceIncorporation, "TC", &["E1"]),
        ];
        let mut rev = decls.clone();
        rev.reverse();
        assert_eq!(
            build_graph("m", decls).unwrap(),
            build_graph("m", rev).unwrap()
        );
    }
}
