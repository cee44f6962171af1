//! Probabilistic confidence propagation: product and sum-of-doubts.
//!
//! For a step with side-claim confidence `w` and subclaim confidences
//! `s_1..s_n`, the product method gives `w * s_1 * ... * s_n` and the
//! sum-of-doubts method gives `max(0, w + s_1 + ... + s_n - n)`, i.e. one
//! minus the summed doubts of all antecedents, clamped at zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{topological_order, BlockMode, CaseGraph, ClaimRole, Node, NodeId};
use crate::structure::{structural_check, StructuralFinding};
use crate::validity::{assess_validity, soundness_gate, LeafInputs, Soundness, UnsoundReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Product,
    Doubts,
}

impl Method {
    pub fn keyword(self) -> &'static str {
        match self {
            Method::Product => "product",
            Method::Doubts => "doubts",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Product => "product",
            Method::Doubts => "sum-of-doubts",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(Method::Product),
            "doubts" | "sum-of-doubts" => Ok(Method::Doubts),
            other => Err(format!(
                "unknown method `{other}` (expected product or doubts)"
            )),
        }
    }
}

/// Numeric inputs to confidence propagation. Values given here take
/// precedence over the ones recorded on the nodes themselves.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConfidenceInput {
    /// Useful-claim posterior P(C|E) per evidence node.
    pub evidence: BTreeMap<NodeId, f64>,
    pub assumptions: BTreeMap<NodeId, f64>,
    /// Optional numeric confidence for residual-doubt leaves; absent ones are bypassed.
    pub residuals: BTreeMap<NodeId, f64>,
    /// Confidence in the top claims of referenced subcases.
    pub subcases: BTreeMap<NodeId, f64>,
    /// Manual overrides on interior claims or steps.
    pub overrides: BTreeMap<NodeId, f64>,
}

impl ConfidenceInput {
    pub fn is_empty(&self) -> bool {
        self.evidence.is_empty()
            && self.assumptions.is_empty()
            && self.residuals.is_empty()
            && self.subcases.is_empty()
            && self.overrides.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotApplicable {
    Disjunctive,
    ExactDefeater,
    OutsideMainArgument,
    Antecedent,
}

impl fmt::Display for NotApplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NotApplicable::Disjunctive => "disjunctive decomposition",
            NotApplicable::ExactDefeater => "determined by an exact defeater",
            NotApplicable::OutsideMainArgument => "defeater or defeater subcase",
            NotApplicable::Antecedent => "an antecedent is not applicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "provenance", content = "reason", rename_all = "kebab-case")]
pub enum Provenance {
    Leaf,
    Propagated,
    Overridden,
    ResidualBypass,
    NotApplicable(NotApplicable),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeConfidence {
    /// `None` when not applicable.
    pub value: Option<f64>,
    #[serde(flatten)]
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "lint", rename_all = "kebab-case")]
pub enum ConfidenceLint {
    /// The doubt sum exceeded one and the bound was clamped to zero.
    DoubtClamped {
        node: NodeId,
    },
    /// A claim used by several steps; its leaves are counted once per use.
    SharedSubclaim {
        node: NodeId,
        uses: usize,
    },
    ResidualBypassed {
        node: NodeId,
    },
    /// A claim with several supporting steps takes the least of them.
    MultipleSupport {
        node: NodeId,
    },
    /// Propagation ran on a case that did not pass the soundness gate.
    Exploratory,
}

impl fmt::Display for ConfidenceLint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfidenceLint::DoubtClamped { node } => {
                write!(
                    f,
                    "doubts at `{node}` sum to more than 1; bound clamped to 0"
                )
            }
            ConfidenceLint::SharedSubclaim { node, uses } => write!(
                f,
                "`{node}` is a subclaim of {uses} steps; its leaves are counted {uses} times"
            ),
            ConfidenceLint::ResidualBypassed { node } => {
                write!(f, "residual doubt `{node}` bypassed (no numeric estimate)")
            }
            ConfidenceLint::MultipleSupport { node } => {
                write!(
                    f,
                    "`{node}` has several supporting steps; the least confidence is used"
                )
            }
            ConfidenceLint::Exploratory => {
                f.write_str("exploratory run on a case that is not sound")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceMap {
    pub method: Method,
    pub nodes: BTreeMap<NodeId, NodeConfidence>,
    pub lints: Vec<ConfidenceLint>,
}

impl ConfidenceMap {
    pub fn value(&self, id: &str) -> Option<f64> {
        self.nodes.get(id).and_then(|n| n.value)
    }

    pub fn provenance(&self, id: &str) -> Option<Provenance> {
        self.nodes.get(id).map(|n| n.provenance)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfidenceError {
    #[error("structural findings present ({})", .0.len())]
    StructuralFindings(Vec<StructuralFinding>),
    #[error("case is not sound ({} reason(s)); rerun as exploratory to propagate anyway", .0.len())]
    PreconditionViolated(Vec<UnsoundReason>),
    #[error("no confidence available for `{node}`: {what}")]
    MissingInput { node: NodeId, what: &'static str },
    #[error(
        "override on `{node}` is not allowed: overrides apply to interior claims and steps only"
    )]
    InvalidOverride { node: NodeId },
    #[error("confidence for `{node}` must lie in [0,1], got {value}")]
    OutOfRange { node: NodeId, value: f64 },
    #[error("input names unknown node `{node}`")]
    UnknownNode { node: NodeId },
}

/// How the soundness precondition is discharged.
#[derive(Debug, Clone, Copy)]
pub enum Precondition<'a> {
    /// Run the soundness gate with these validity inputs.
    Sound(&'a LeafInputs),
    /// The caller accepts propagating over a possibly unsound case.
    Exploratory,
}

pub fn propagate_confidence(
    g: &CaseGraph,
    input: &ConfidenceInput,
    method: Method,
    pre: Precondition<'_>,
) -> Result<ConfidenceMap, ConfidenceError> {
    let findings = structural_check(g);
    if !findings.is_empty() {
        return Err(ConfidenceError::StructuralFindings(findings));
    }
    let exploratory = match pre {
        Precondition::Sound(leaf) => {
            let m = assess_validity(g, leaf).ok();
            if let Soundness::NotSound(reasons) = soundness_gate(g, m.as_ref(), leaf) {
                return Err(ConfidenceError::PreconditionViolated(reasons));
            }
            false
        }
        Precondition::Exploratory => true,
    };
    validate_input(g, input)?;
    let mut out = fold(g, input, method, None)?;
    if exploratory {
        out.lints.insert(0, ConfidenceLint::Exploratory);
    }
    Ok(out)
}

/// Range, node-existence and override-placement checks on `input`.
pub fn validate_input(g: &CaseGraph, input: &ConfidenceInput) -> Result<(), ConfidenceError> {
    let tables = [
        &input.evidence,
        &input.assumptions,
        &input.residuals,
        &input.subcases,
        &input.overrides,
    ];
    for table in tables {
        for (id, v) in table {
            if !g.contains(id.as_str()) {
                return Err(ConfidenceError::UnknownNode { node: id.clone() });
            }
            check_range(id, *v)?;
        }
    }
    for id in input.overrides.keys() {
        let interior = match g.node(id.as_str()) {
            Some(Node::Block(_)) => true,
            Some(Node::Claim(c)) => !c.role.is_leaf_role() && !g.supporters(id.as_str()).is_empty(),
            _ => false,
        };
        if !interior {
            return Err(ConfidenceError::InvalidOverride { node: id.clone() });
        }
    }
    Ok(())
}

fn check_range(node: &NodeId, value: f64) -> Result<f64, ConfidenceError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ConfidenceError::OutOfRange {
            node: node.clone(),
            value,
        })
    }
}

/// One DAG fold. `neutral` names a (block, antecedent) edge whose
/// contribution is replaced by certainty, which is how excision is modelled.
fn fold(
    g: &CaseGraph,
    input: &ConfidenceInput,
    method: Method,
    neutral: Option<(&NodeId, &NodeId)>,
) -> Result<ConfidenceMap, ConfidenceError> {
    let main = g.main_argument();
    let mut nodes: BTreeMap<NodeId, NodeConfidence> = BTreeMap::new();
    let mut lints = BTreeSet::new();

    for id in topological_order(g) {
        let node = g.node(id.as_str()).expect("ordered ids exist");
        let result =
            if let Some(v) = input.overrides.get(&id) {
                NodeConfidence {
                    value: Some(*v),
                    provenance: Provenance::Overridden,
                }
            } else if !main.contains(&id) {
                not_applicable(NotApplicable::OutsideMainArgument)
            } else if node.is_claim_like() && g.exact_defeater_on(id.as_str()).is_some() {
                not_applicable(NotApplicable::ExactDefeater)
            } else {
                match node {
                    Node::Evidence(e) => {
                        let v = input
                            .evidence
                            .get(&id)
                            .copied()
                            .or(e.posterior)
                            .or_else(|| {
                                e.elicitation
                                    .as_ref()
                                    .and_then(|el| el.posterior)
                                    .map(|j| j.probability())
                            })
                            .ok_or(ConfidenceError::MissingInput {
                                node: id.clone(),
                                what: "evidence posterior",
                            })?;
                        leaf(check_range(&id, v)?)
                    }
                    Node::Subcase(_) => {
                        let v = input.subcases.get(&id).copied().ok_or(
                            ConfidenceError::MissingInput {
                                node: id.clone(),
                                what: "subcase confidence",
                            },
                        )?;
                        leaf(v)
                    }
                    Node::Claim(c) => match &c.role {
                        ClaimRole::Assumption { prob } => leaf(check_range(
                            &id,
                            input.assumptions.get(&id).copied().unwrap_or(*prob),
                        )?),
                        ClaimRole::ResidualDoubt { .. } => match input.residuals.get(&id) {
                            Some(v) => leaf(*v),
                            None => {
                                lints.insert(ConfidenceLint::ResidualBypassed { node: id.clone() });
                                NodeConfidence {
                                    value: Some(1.0),
                                    provenance: Provenance::ResidualBypass,
                                }
                            }
                        },
                        _ => supported(g, &id, &nodes, &mut lints)?,
                    },
                    Node::Defeater(_) => supported(g, &id, &nodes, &mut lints)?,
                    Node::Block(b) => {
                        if b.mode == BlockMode::Disjunctive {
                            not_applicable(NotApplicable::Disjunctive)
                        } else {
                            let mut values = Vec::with_capacity(b.subclaims.len() + 1);
                            let mut na = false;
                            if b.sideclaim.is_none() {
                                values.push(1.0);
                            }
                            for a in b.antecedents() {
                                if neutral == Some((&id, a)) {
                                    values.push(1.0);
                                    continue;
                                }
                                match nodes.get(a).and_then(|n| n.value) {
                                    Some(v) => values.push(v),
                                    None => na = true,
                                }
                            }
                            if na {
                                not_applicable(NotApplicable::Antecedent)
                            } else {
                                let v = match method {
                                    Method::Product => values.iter().product(),
                                    Method::Doubts => {
                                        // certain antecedents add no doubt, and a lone
                                        // doubtful one passes through unrounded
                                        let doubtful: Vec<f64> =
                                            values.iter().copied().filter(|v| *v != 1.0).collect();
                                        let doubt: f64 = doubtful.iter().map(|v| 1.0 - v).sum();
                                        if let [only] = doubtful[..] {
                                            only
                                        } else if doubt > 1.0 {
                                            lints.insert(ConfidenceLint::DoubtClamped {
                                                node: id.clone(),
                                            });
                                            0.0
                                        } else {
                                            1.0 - doubt
                                        }
                                    }
                                };
                                NodeConfidence {
                                    value: Some(v),
                                    provenance: Provenance::Propagated,
                                }
                            }
                        }
                    }
                }
            };
        nodes.insert(id, result);
    }

    for id in &main {
        let uses = g
            .used_by(id.as_str())
            .iter()
            .filter(|b| main.contains(*b))
            .count();
        if uses > 1 {
            lints.insert(ConfidenceLint::SharedSubclaim {
                node: id.clone(),
                uses,
            });
        }
    }

    Ok(ConfidenceMap {
        method,
        nodes,
        lints: lints.into_iter().collect(),
    })
}

fn leaf(v: f64) -> NodeConfidence {
    NodeConfidence {
        value: Some(v),
        provenance: Provenance::Leaf,
    }
}

fn not_applicable(why: NotApplicable) -> NodeConfidence {
    NodeConfidence {
        value: None,
        provenance: Provenance::NotApplicable(why),
    }
}

fn supported(
    g: &CaseGraph,
    id: &NodeId,
    nodes: &BTreeMap<NodeId, NodeConfidence>,
    lints: &mut BTreeSet<ConfidenceLint>,
) -> Result<NodeConfidence, ConfidenceError> {
    let blocks = g.supporters(id.as_str());
    if blocks.is_empty() {
        return Err(ConfidenceError::MissingInput {
            node: id.clone(),
            what: "claim has no supporting step",
        });
    }
    if blocks.len() > 1 {
        lints.insert(ConfidenceLint::MultipleSupport { node: id.clone() });
    }
    let mut least: Option<f64> = None;
    for b in blocks {
        match nodes.get(b).and_then(|n| n.value) {
            Some(v) => least = Some(least.map_or(v, |l: f64| l.min(v))),
            None => return Ok(not_applicable(NotApplicable::Antecedent)),
        }
    }
    Ok(NodeConfidence {
        value: least,
        provenance: Provenance::Propagated,
    })
}

/// One interior node's leaf decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafContribution {
    pub node: NodeId,
    /// Contributing leaves with multiplicity.
    pub leaves: BTreeMap<NodeId, usize>,
    pub leaf_product: f64,
    pub propagated: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excision {
    pub block: NodeId,
    pub antecedent: NodeId,
    pub excised_confidence: f64,
    pub top_before: f64,
    pub top_after: f64,
}

impl Excision {
    pub fn increases(&self) -> bool {
        self.top_after > self.top_before
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub contributions: Vec<LeafContribution>,
    pub shared: Vec<(NodeId, usize)>,
    pub excisions: Vec<Excision>,
    pub warnings: Vec<String>,
}

/// Leaf-multiset decomposition of the product method, with the effect of
/// excising each antecedent subtree of the main argument on the top claim.
pub fn structure_sensitivity_report(
    g: &CaseGraph,
    input: &ConfidenceInput,
) -> Result<SensitivityReport, ConfidenceError> {
    let findings = structural_check(g);
    if !findings.is_empty() {
        return Err(ConfidenceError::StructuralFindings(findings));
    }
    validate_input(g, input)?;
    let base = fold(g, input, Method::Product, None)?;

    // leaf multisets, bottom-up
    let mut leaves: BTreeMap<NodeId, BTreeMap<NodeId, usize>> = BTreeMap::new();
    for id in topological_order(g) {
        let Some(nc) = base.nodes.get(&id) else {
            continue;
        };
        if nc.value.is_none() {
            continue;
        }
        let mut set = BTreeMap::new();
        match (nc.provenance, g.node(id.as_str())) {
            (Provenance::Propagated, Some(Node::Block(b))) => {
                for a in b.antecedents() {
                    for (l, n) in leaves.get(a).into_iter().flatten() {
                        *set.entry(l.clone()).or_insert(0) += n;
                    }
                }
            }
            (Provenance::Propagated, Some(_)) => {
                // the least-confidence supporting step is the one propagated
                let chosen = g
                    .supporters(id.as_str())
                    .iter()
                    .filter(|b| base.value(b.as_str()).is_some())
                    .min_by(|x, y| {
                        base.value(x.as_str())
                            .partial_cmp(&base.value(y.as_str()))
                            .unwrap_or(std::cmp::Ordering::Equal)
                    });
                if let Some(b) = chosen {
                    set = leaves.get(b).cloned().unwrap_or_default();
                }
            }
            _ => {
                set.insert(id.clone(), 1);
            }
        }
        leaves.insert(id, set);
    }

    let mut contributions = Vec::new();
    for (id, set) in &leaves {
        let Some(nc) = base.nodes.get(id) else {
            continue;
        };
        if nc.provenance != Provenance::Propagated {
            continue;
        }
        let propagated = nc.value.unwrap_or(0.0);
        let leaf_product: f64 = set
            .iter()
            .map(|(l, n)| base.value(l.as_str()).unwrap_or(1.0).powi(*n as i32))
            .product();
        contributions.push(LeafContribution {
            node: id.clone(),
            leaves: set.clone(),
            leaf_product,
            propagated,
            agrees: (leaf_product - propagated).abs() <= 1e-12,
        });
    }

    let top = g.top();
    let shared: Vec<(NodeId, usize)> = leaves
        .get(top)
        .into_iter()
        .flatten()
        .filter(|(_, n)| **n > 1)
        .map(|(l, n)| (l.clone(), *n))
        .collect();

    let mut excisions = Vec::new();
    if let Some(top_before) = base.value(top.as_str()) {
        let main = g.main_argument();
        for b in g.blocks().filter(|b| main.contains(&b.id)) {
            if base.value(b.id.as_str()).is_none() {
                continue;
            }
            for a in b.antecedents() {
                let Some(excised_confidence) = base.value(a.as_str()) else {
                    continue;
                };
                let after = fold(g, input, Method::Product, Some((&b.id, a)))?;
                if let Some(top_after) = after.value(top.as_str()) {
                    excisions.push(Excision {
                        block: b.id.clone(),
                        antecedent: a.clone(),
                        excised_confidence,
                        top_before,
                        top_after,
                    });
                }
            }
        }
    }

    let mut warnings =
        vec!["excising any subtree whose confidence is below 1 raises the top-claim confidence under the product rule".to_string()];
    for (l, n) in &shared {
        warnings.push(format!(
            "leaf `{l}` is counted {n} times in the top-claim product"
        ));
    }
    Ok(SensitivityReport {
        contributions,
        shared,
        excisions,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_graph, BlockKind, BlockNode, ClaimNode, EvidenceNode};

    fn id(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn claim(i: &str, role: ClaimRole) -> Node {
        Node::Claim(ClaimNode {
            id: id(i),
            text: i.into(),
            role,
            justification: None,
        })
    }

    fn evidence(i: &str, p: f64) -> Node {
        Node::Evidence(EvidenceNode {
            id: id(i),
            description: i.into(),
            assembly: "a".into(),
            accepted: true,
            posterior: Some(p),
            elicitation: None,
        })
    }

    fn block(i: &str, kind: BlockKind, parent: &str, subs: &[&str], side: Option<&str>) -> Node {
        Node::Block(BlockNode {
            id: id(i),
            kind,
            mode: BlockMode::Conjunctive,
            parent: id(parent),
            subclaims: subs.iter().map(|s| id(s)).collect(),
            sideclaim: side.map(id),
            justification: "j".into(),
        })
    }

    /// TC <- B1(side W, sub S); W <- E1 (0.9), S <- E2 (0.8)
    fn side_and_sub(w: f64, s: f64) -> CaseGraph {
        build_graph(
            "t",
            vec![
                claim("TC", ClaimRole::Top),
                claim("W", ClaimRole::Side),
                claim("S", ClaimRole::Ordinary),
                evidence("E1", w),
                evidence("E2", s),
                block("B1", BlockKind::Substitution, "TC", &["S"], Some("W")),
                block("BW", BlockKind::EvidenceIncorporation, "W", &["E1"], None),
                block("BS", BlockKind::EvidenceIncorporation, "S", &["E2"], None),
            ],
        )
        .unwrap()
    }

    fn run(g: &CaseGraph, method: Method) -> ConfidenceMap {
        propagate_confidence(
            g,
            &ConfidenceInput::default(),
            method,
            Precondition::Exploratory,
        )
        .unwrap()
    }

    #[test]
    fn product_of_side_and_sub() {
        let m = run(&side_and_sub(0.9, 0.8), Method::Product);
        assert!((m.value("TC").unwrap() - 0.72).abs() < 1e-12);
    }

    #[test]
    fn sum_of_doubts() {
        let m = run(&side_and_sub(0.9, 0.8), Method::Doubts);
        assert!((m.value("TC").unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn sum_of_doubts_clamps() {
        let m = run(&side_and_sub(0.5, 0.3), Method::Doubts);
        assert_eq!(m.value("TC"), Some(0.0));
        assert!(m
            .lints
            .contains(&ConfidenceLint::DoubtClamped { node: id("B1") }));
    }

    #[test]
    fn lone_doubt_passes_through_exactly() {
        // 1 - (1 - 0.15) rounds to 0.15000000000000002
        let m = run(&side_and_sub(1.0, 0.15), Method::Doubts);
        assert_eq!(m.value("TC"), Some(0.15));
        let p = run(&side_and_sub(1.0, 0.15), Method::Product);
        assert_eq!(p.value("TC"), m.value("TC"));
    }

    #[test]
    fn certainty_is_a_fixed_point() {
        for method in [Method::Product, Method::Doubts] {
            let m = run(&side_and_sub(1.0, 1.0), method);
            assert!(m.nodes.values().all(|n| n.value == Some(1.0)));
        }
    }

    #[test]
    fn override_feeds_upward() {
        let g = side_and_sub(0.9, 0.8);
        let mut input = ConfidenceInput::default();
        input.overrides.insert(id("S"), 0.5);
        let m =
            propagate_confidence(&g, &input, Method::Product, Precondition::Exploratory).unwrap();
        assert_eq!(m.provenance("S"), Some(Provenance::Overridden));
        assert!((m.value("TC").unwrap() - 0.45).abs() < 1e-12);
    }

    #[test]
    fn override_on_leaf_is_refused() {
        let g = side_and_sub(0.9, 0.8);
        let mut input = ConfidenceInput::default();
        input.overrides.insert(id("E1"), 0.5);
        assert_eq!(
            propagate_confidence(&g, &input, Method::Product, Precondition::Exploratory),
            Err(ConfidenceError::InvalidOverride { node: id("E1") })
        );
    }

    #[test]
    fn unsound_case_needs_exploratory_flag() {
        let g = side_and_sub(0.9, 0.8);
        let r = propagate_confidence(
            &g,
            &ConfidenceInput::default(),
            Method::Product,
            Precondition::Sound(&LeafInputs::default()),
        );
        assert!(matches!(r, Err(ConfidenceError::PreconditionViolated(_))));
    }

    #[test]
    fn excision_raises_top() {
        let g = side_and_sub(0.9, 0.8);
        let r = structure_sensitivity_report(&g, &ConfidenceInput::default()).unwrap();
        let cut = r
            .excisions
            .iter()
            .find(|e| e.block == id("B1") && e.antecedent == id("S"))
            .unwrap();
        assert!((cut.top_after - 0.9).abs() < 1e-12);
        assert!(cut.increases());
        assert!(r.contributions.iter().all(|c| c.agrees));
    }
}
