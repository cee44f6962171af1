//! Three-valued logical assessment with defeaters.
//!
//! Each node is assessed TRUE, FALSE or UNSUPPORTED, bottom-up over the
//! dependency DAG (a claim depends on its supporting blocks and on the
//! defeaters affecting it; a block depends on its side-claim and subnodes).
//! Shared subclaims are evaluated once.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{self, Measure};
use crate::model::{
    BlockKind, BlockMode, CaseGraph, ClaimRole, DefeaterStatus, Exactness, Node, NodeId,
};
use crate::structure::{defeaters_by_affected, structural_check, StructuralFinding};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assessment {
    True,
    False,
    Unsupported,
}

impl Assessment {
    pub fn keyword(self) -> &'static str {
        match self {
            Assessment::True => "true",
            Assessment::False => "false",
            Assessment::Unsupported => "unsupported",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "true" => Some(Assessment::True),
            "false" => Some(Assessment::False),
            "unsupported" => Some(Assessment::Unsupported),
            _ => None,
        }
    }
}

impl Not for Assessment {
    type Output = Assessment;
    fn not(self) -> Assessment {
        match self {
            Assessment::True => Assessment::False,
            Assessment::False => Assessment::True,
            Assessment::Unsupported => Assessment::Unsupported,
        }
    }
}

impl fmt::Display for Assessment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assessment::True => "TRUE",
            Assessment::False => "FALSE",
            Assessment::Unsupported => "UNSUPPORTED",
        })
    }
}

/// Why a node received its assessment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "node", rename_all = "kebab-case")]
pub enum Cause {
    FromLeaf,
    FromStep,
    FromDefeater(NodeId),
    Exonerated(NodeId),
    Override,
    ResidualBypass,
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cause::FromLeaf => f.write_str("leaf"),
            Cause::FromStep => f.write_str("step"),
            Cause::FromDefeater(d) => write!(f, "defeater {d}"),
            Cause::Exonerated(d) => write!(f, "exonerated by {d}"),
            Cause::Override => f.write_str("override"),
            Cause::ResidualBypass => f.write_str("residual bypass"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAssessment {
    pub value: Assessment,
    pub cause: Cause,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "lint", rename_all = "kebab-case")]
pub enum AssessmentLint {
    /// Declared status disagrees with the computed assessment; computed wins.
    StatusMismatch {
        defeater: NodeId,
        declared: DefeaterStatus,
        computed: Assessment,
    },
    /// The node's own subcase is ignored because an exact defeater targets it.
    SubcaseIgnored {
        node: NodeId,
        exact_defeater: NodeId,
    },
    /// A residual-doubt leaf skipped by the steps above it.
    ResidualBypassed { node: NodeId },
}

impl fmt::Display for AssessmentLint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssessmentLint::StatusMismatch {
                defeater,
                declared,
                computed,
            } => write!(
                f,
                "defeater `{defeater}` is declared {} but assessed {computed}; the computed value is used",
                declared.keyword()
            ),
            AssessmentLint::SubcaseIgnored { node, exact_defeater } => write!(
                f,
                "subcase of `{node}` is ignored: exact defeater `{exact_defeater}` determines its assessment"
            ),
            AssessmentLint::ResidualBypassed { node } => {
                write!(f, "residual doubt `{node}` is bypassed in logical assessment")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentMap {
    pub nodes: BTreeMap<NodeId, NodeAssessment>,
    pub lints: Vec<AssessmentLint>,
}

impl AssessmentMap {
    pub fn get(&self, id: &str) -> Option<Assessment> {
        self.nodes.get(id).map(|n| n.value)
    }

    pub fn cause(&self, id: &str) -> Option<&Cause> {
        self.nodes.get(id).map(|n| &n.cause)
    }
}

/// Human and external inputs to logical assessment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LeafInputs {
    /// Concurrence for every step not listed in `concurrence`.
    pub concur_all: bool,
    /// Per-step human concurrence with the step's justification.
    pub concurrence: BTreeMap<NodeId, bool>,
    /// Overrides the evidence node's own acceptance flag.
    pub accepted: BTreeMap<NodeId, bool>,
    /// Assumption assertions; unlisted assumptions are asserted.
    pub assumptions: BTreeMap<NodeId, bool>,
    /// Overrides a subcase reference's recorded external assessment.
    pub subcases: BTreeMap<NodeId, Assessment>,
    /// Manual assessment overrides on claims or defeaters.
    pub overrides: BTreeMap<NodeId, Assessment>,
}

impl LeafInputs {
    pub fn concurring() -> Self {
        LeafInputs {
            concur_all: true,
            ..Default::default()
        }
    }

    pub fn concurs(&self, step: &str) -> bool {
        self.concurrence
            .get(step)
            .copied()
            .unwrap_or(self.concur_all)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessError {
    #[error("structural findings present ({})", .0.len())]
    PreconditionViolated(Vec<StructuralFinding>),
}

/// Assess every node of a structurally valid case.
pub fn assess_validity(g: &CaseGraph, inputs: &LeafInputs) -> Result<AssessmentMap, AssessError> {
    let findings = structural_check(g);
    if !findings.is_empty() {
        return Err(AssessError::PreconditionViolated(findings));
    }
    let mut ev = Evaluator {
        g,
        inputs,
        affecting: defeaters_by_affected(g),
        memo: BTreeMap::new(),
        bypassed: BTreeSet::new(),
        lints: BTreeSet::new(),
    };
    for id in crate::model::topological_order(g) {
        ev.eval(&id);
    }
    for d in g.defeaters() {
        if !g.supporters(d.id.as_str()).is_empty() {
            let computed = ev.memo[&d.id].value;
            let expected = match d.status {
                DefeaterStatus::Sustained => Some(Assessment::True),
                DefeaterStatus::Refuted => Some(Assessment::False),
                _ => None,
            };
            if expected.is_some_and(|e| e != computed) {
                ev.lints.insert(AssessmentLint::StatusMismatch {
                    defeater: d.id.clone(),
                    declared: d.status,
                    computed,
                });
            }
        }
    }
    for id in &ev.bypassed {
        ev.lints
            .insert(AssessmentLint::ResidualBypassed { node: id.clone() });
    }
    Ok(AssessmentMap {
        nodes: ev.memo,
        lints: ev.lints.into_iter().collect(),
    })
}

struct Evaluator<'a> {
    g: &'a CaseGraph,
    inputs: &'a LeafInputs,
    affecting: BTreeMap<NodeId, Vec<NodeId>>,
    memo: BTreeMap<NodeId, NodeAssessment>,
    bypassed: BTreeSet<NodeId>,
    lints: BTreeSet<AssessmentLint>,
}

impl Evaluator<'_> {
    fn eval(&mut self, id: &NodeId) -> Assessment {
        if let Some(done) = self.memo.get(id) {
            return done.value;
        }
        let result = self.compute(id);
        let value = result.value;
        self.memo.insert(id.clone(), result);
        value
    }

    fn compute(&mut self, id: &NodeId) -> NodeAssessment {
        let g = self.g;
        let Some(node) = g.node(id.as_str()) else {
            return leaf(Assessment::Unsupported);
        };
        match node {
            Node::Evidence(e) => {
                let accepted = self.inputs.accepted.get(id).copied().unwrap_or(e.accepted);
                leaf(if accepted {
                    Assessment::True
                } else {
                    Assessment::Unsupported
                })
            }
            Node::Subcase(s) => leaf(
                self.inputs
                    .subcases
                    .get(id)
                    .copied()
                    .or(s.assessed)
                    .unwrap_or(Assessment::Unsupported),
            ),
            Node::Block(_) => NodeAssessment {
                value: self.step(id),
                cause: Cause::FromStep,
            },
            Node::Claim(_) | Node::Defeater(_) => self.claim_like(id),
        }
    }

    /// Claims and defeaters: override, then exact defeater or own support,
    /// then exploratory defeaters.
    fn claim_like(&mut self, id: &NodeId) -> NodeAssessment {
        let g = self.g;
        if let Some(v) = self.inputs.overrides.get(id) {
            return NodeAssessment {
                value: *v,
                cause: Cause::Override,
            };
        }

        let mut residual_bypass = false;
        let mut base = if let Some(x) = g.exact_defeater_on(id.as_str()) {
            if !g.supporters(id.as_str()).is_empty() {
                self.lints.insert(AssessmentLint::SubcaseIgnored {
                    node: id.clone(),
                    exact_defeater: x.id.clone(),
                });
            }
            let xv = self.eval(&x.id);
            NodeAssessment {
                value: if xv == Assessment::Unsupported {
                    Assessment::Unsupported
                } else {
                    !xv
                },
                cause: Cause::FromDefeater(x.id.clone()),
            }
        } else {
            match g.node(id.as_str()) {
                Some(Node::Claim(c)) => match &c.role {
                    ClaimRole::Assumption { .. } => {
                        let asserted = self.inputs.assumptions.get(id).copied().unwrap_or(true);
                        leaf(if asserted {
                            Assessment::True
                        } else {
                            Assessment::Unsupported
                        })
                    }
                    ClaimRole::ResidualDoubt { .. } => {
                        residual_bypass = true;
                        NodeAssessment {
                            value: Assessment::True,
                            cause: Cause::ResidualBypass,
                        }
                    }
                    _ => self.supported(id),
                },
                Some(Node::Defeater(d)) => {
                    if g.supporters(id.as_str()).is_empty() {
                        // bare defeater: the declared outcome is the only judgment available
                        leaf(match d.status {
                            DefeaterStatus::Sustained => Assessment::True,
                            DefeaterStatus::Refuted => Assessment::False,
                            _ => Assessment::Unsupported,
                        })
                    } else {
                        self.supported(id)
                    }
                }
                _ => leaf(Assessment::Unsupported),
            }
        };

        let exploratory: Vec<NodeId> = self
            .affecting
            .get(id)
            .map(|ds| {
                ds.iter()
                    .filter(|d| {
                        g.node(d.as_str())
                            .and_then(Node::as_defeater)
                            .is_some_and(|d| {
                                d.is_effective() && d.exactness == Exactness::Exploratory
                            })
                    })
                    .cloned()
                    .collect()
            })
            .unwrap_or_default();
        let mut exonerated_by = None;
        for d in &exploratory {
            match self.eval(d) {
                Assessment::False => {
                    exonerated_by.get_or_insert_with(|| d.clone());
                }
                Assessment::True | Assessment::Unsupported => {
                    residual_bypass = false;
                    base = NodeAssessment {
                        value: Assessment::Unsupported,
                        cause: Cause::FromDefeater(d.clone()),
                    };
                    exonerated_by = None;
                    break;
                }
            }
        }
        if let Some(d) = exonerated_by {
            base.cause = Cause::Exonerated(d);
        }
        if residual_bypass {
            self.bypassed.insert(id.clone());
        }
        base
    }

    /// A claim justified by its blocks; disagreeing blocks leave it unsupported.
    fn supported(&mut self, id: &NodeId) -> NodeAssessment {
        let blocks = self.g.supporters(id.as_str());
        let mut values = blocks
            .iter()
            .map(|b| self.eval(b))
            .collect::<Vec<_>>()
            .into_iter();
        let value = match values.next() {
            None => Assessment::Unsupported,
            Some(first) => {
                if values.all(|v| v == first) {
                    first
                } else {
                    Assessment::Unsupported
                }
            }
        };
        NodeAssessment {
            value,
            cause: Cause::FromStep,
        }
    }

    fn step(&mut self, id: &NodeId) -> Assessment {
        let Some(b) = self.g.node(id.as_str()).and_then(Node::as_block) else {
            return Assessment::Unsupported;
        };
        let side = match &b.sideclaim {
            Some(s) => {
                let v = self.eval(s);
                if self.bypassed.contains(s) {
                    Assessment::True
                } else {
                    v
                }
            }
            None => Assessment::True,
        };
        let mut subs = Vec::with_capacity(b.subclaims.len());
        for s in &b.subclaims {
            let v = self.eval(s);
            if !self.bypassed.contains(s) {
                subs.push(v);
            }
        }
        let value = match b.mode {
            BlockMode::Conjunctive => {
                if side == Assessment::True && subs.iter().all(|v| *v == Assessment::True) {
                    Assessment::True
                } else {
                    // a FALSE antecedent must not be propagated as FALSE
                    Assessment::Unsupported
                }
            }
            BlockMode::Disjunctive => {
                if side != Assessment::True {
                    Assessment::Unsupported
                } else if subs.contains(&Assessment::True) {
                    Assessment::True
                } else if !subs.is_empty() && subs.iter().all(|v| *v == Assessment::False) {
                    Assessment::False
                } else {
                    Assessment::Unsupported
                }
            }
        };
        if b.kind == BlockKind::EvidenceIncorporation && !self.inputs.concurs(id.as_str()) {
            return Assessment::Unsupported;
        }
        value
    }
}

fn leaf(value: Assessment) -> NodeAssessment {
    NodeAssessment {
        value,
        cause: Cause::FromLeaf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnosis {
    /// The defeater is sustained: revise the argument or the system.
    ReviseArgument,
    /// The defeater is unsupported: its subcase needs more work.
    SubcaseNeedsWork,
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Diagnosis::ReviseArgument => "revise argument/system",
            Diagnosis::SubcaseNeedsWork => "defeater subcase needs work",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveDefeater {
    pub defeater: NodeId,
    pub affected: NodeId,
    pub assessment: Assessment,
    pub diagnosis: Diagnosis,
}

/// Defeaters assessed TRUE or UNSUPPORTED, excluding addressed and residual
/// ones. An exact defeater assessed TRUE is a completed negation step of the
/// argument rather than an open challenge, so only exact defeaters that are
/// UNSUPPORTED are listed.
pub fn active_defeaters(g: &CaseGraph, m: &AssessmentMap) -> Vec<ActiveDefeater> {
    g.defeaters()
        .filter(|d| d.is_effective())
        .filter_map(|d| {
            let assessment = m.get(d.id.as_str())?;
            let diagnosis = match assessment {
                Assessment::True if d.exactness == Exactness::Exact => return None,
                Assessment::True => Diagnosis::ReviseArgument,
                Assessment::Unsupported => Diagnosis::SubcaseNeedsWork,
                Assessment::False => return None,
            };
            let affected =
                crate::structure::affected_claim(g, &d.target).unwrap_or_else(|_| d.target.clone());
            Some(ActiveDefeater {
                defeater: d.id.clone(),
                affected,
                assessment,
                diagnosis,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum UnsoundReason {
    StructuralFindings {
        count: usize,
    },
    TopNotTrue {
        top: NodeId,
        assessment: Option<Assessment>,
    },
    ActiveDefeater {
        defeater: NodeId,
        affected: NodeId,
    },
    StepLacksConcurrence {
        block: NodeId,
    },
    EvidenceNotConfirmed {
        evidence: NodeId,
    },
}

impl fmt::Display for UnsoundReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnsoundReason::StructuralFindings { count } => {
                write!(f, "{count} structural finding(s)")
            }
            UnsoundReason::TopNotTrue { top, assessment } => match assessment {
                Some(a) => write!(f, "top claim `{top}` is {a}"),
                None => write!(f, "top claim `{top}` was not assessed"),
            },
            UnsoundReason::ActiveDefeater { defeater, affected } => {
                write!(f, "active defeater `{defeater}` on `{affected}`")
            }
            UnsoundReason::StepLacksConcurrence { block } => {
                write!(f, "step `{block}` lacks concurrence")
            }
            UnsoundReason::EvidenceNotConfirmed { evidence } => write!(
                f,
                "evidence `{evidence}` has no positive confirmation measure on record"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reasons", rename_all = "kebab-case")]
pub enum Soundness {
    Sound,
    NotSound(Vec<UnsoundReason>),
}

impl Soundness {
    pub fn is_sound(&self) -> bool {
        matches!(self, Soundness::Sound)
    }
}

/// Evidence has a positive confirmation assessment when at least one ratio
/// measure is computable from its elicitation and every computable one is > 0.
pub fn evidence_confirmed(e: &crate::model::EvidenceNode) -> bool {
    let Some(el) = &e.elicitation else {
        return false;
    };
    let values: Vec<_> = el
        .measures(measures::DEFAULT_BASE)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|m| m.measure != Measure::Carnap)
        .collect();
    !values.is_empty() && values.iter().all(|m| m.value.is_positive())
}

/// The full soundness gate. `m` may be `None` when assessment was impossible.
pub fn soundness_gate(g: &CaseGraph, m: Option<&AssessmentMap>, inputs: &LeafInputs) -> Soundness {
    let mut reasons = Vec::new();
    let findings = structural_check(g);
    if !findings.is_empty() {
        reasons.push(UnsoundReason::StructuralFindings {
            count: findings.len(),
        });
    }
    let top = m.and_then(|m| m.get(g.top().as_str()));
    if top != Some(Assessment::True) {
        reasons.push(UnsoundReason::TopNotTrue {
            top: g.top().clone(),
            assessment: top,
        });
    }
    if let Some(m) = m {
        for a in active_defeaters(g, m) {
            reasons.push(UnsoundReason::ActiveDefeater {
                defeater: a.defeater,
                affected: a.affected,
            });
        }
    }
    for b in g.blocks() {
        if !inputs.concurs(b.id.as_str()) {
            reasons.push(UnsoundReason::StepLacksConcurrence {
                block: b.id.clone(),
            });
        }
    }
    for e in g.evidence() {
        if !evidence_confirmed(e) {
            reasons.push(UnsoundReason::EvidenceNotConfirmed {
                evidence: e.id.clone(),
            });
        }
    }
    if reasons.is_empty() {
        Soundness::Sound
    } else {
        Soundness::NotSound(reasons)
    }
}
