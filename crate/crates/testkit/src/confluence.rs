//! Confluence oracle for three-valued validity.
//!
//! Each node has one rule that may fire as soon as enough of its inputs are
//! known. Rules short-circuit where the outcome is already forced (a
//! conjunctive step with one bad antecedent, a claim with one live
//! exploratory defeater, ...). Every firing order is explored; the oracle
//! succeeds only if all of them end in the same complete assignment.

use std::collections::{BTreeMap, HashSet};

use a2_core::model::{BlockKind, BlockMode, ClaimRole, DefeaterStatus, Exactness, Node};
use a2_core::validity::Assessment;
use a2_core::{CaseGraph, LeafInputs, NodeId};

use Assessment::{False as F, True as T, Unsupported as U};

/// A fired value; `bypass` marks a residual leaf that steps skip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Val {
    v: Assessment,
    bypass: bool,
}

fn val(v: Assessment) -> Option<Val> {
    Some(Val { v, bypass: false })
}

enum Rule {
    Fixed(Assessment),
    Step {
        mode: BlockMode,
        side: Option<usize>,
        subs: Vec<usize>,
        concurred: bool,
    },
    Claim {
        override_: Option<Assessment>,
        exploratory: Vec<usize>,
        exact: Option<usize>,
        base: Base,
    },
}

enum Base {
    Fixed(Assessment),
    Residual,
    Blocks(Vec<usize>),
}

struct Oracle {
    ids: Vec<NodeId>,
    rules: Vec<Rule>,
}

/// The claim a defeater on `target` calls into question.
fn affected(g: &CaseGraph, target: &NodeId) -> Option<NodeId> {
    match g.node(target.as_str())? {
        Node::Claim(_) | Node::Defeater(_) => Some(target.clone()),
        Node::Block(b) => Some(b.parent.clone()),
        Node::Evidence(_) | Node::Subcase(_) => {
            let mut parents: Vec<&NodeId> = g
                .blocks()
                .filter(|b| b.antecedents().any(|a| a == target))
                .map(|b| &b.id)
                .collect();
            parents.sort();
            let b = parents.first()?;
            Some(g.node(b.as_str())?.as_block()?.parent.clone())
        }
    }
}

fn live(status: DefeaterStatus) -> bool {
    !matches!(status, DefeaterStatus::Addressed | DefeaterStatus::Residual)
}

impl Oracle {
    fn new(g: &CaseGraph, inputs: &LeafInputs) -> Oracle {
        let ids: Vec<NodeId> = g.ids().cloned().collect();
        let index: BTreeMap<&NodeId, usize> =
            ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let ix = |id: &NodeId| index[id];

        let mut exploratory: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        let mut exact: BTreeMap<NodeId, usize> = BTreeMap::new();
        for n in g.nodes() {
            if let Node::Defeater(d) = n {
                if !live(d.status) {
                    continue;
                }
                match d.exactness {
                    Exactness::Exact => {
                        exact.insert(d.target.clone(), ix(&d.id));
                    }
                    Exactness::Exploratory => {
                        if let Some(a) = affected(g, &d.target) {
                            exploratory.entry(a).or_default().push(ix(&d.id));
                        }
                    }
                }
            }
        }
        let blocks_of = |id: &NodeId| -> Vec<usize> {
            g.blocks()
                .filter(|b| &b.parent == id)
                .map(|b| ix(&b.id))
                .collect()
        };

        let rules = ids
            .iter()
            .map(|id| match g.node(id.as_str()).unwrap() {
                Node::Evidence(e) => {
                    let accepted = inputs.accepted.get(id).copied().unwrap_or(e.accepted);
                    Rule::Fixed(if accepted { T } else { U })
                }
                Node::Subcase(s) => {
                    Rule::Fixed(inputs.subcases.get(id).copied().or(s.assessed).unwrap_or(U))
                }
                Node::Block(b) => Rule::Step {
                    mode: b.mode,
                    side: b.sideclaim.as_ref().map(ix),
                    subs: b.subclaims.iter().map(ix).collect(),
                    concurred: b.kind != BlockKind::EvidenceIncorporation
                        || inputs
                            .concurrence
                            .get(id)
                            .copied()
                            .unwrap_or(inputs.concur_all),
                },
                n => {
                    let base = match n {
                        Node::Claim(c) => match c.role {
                            ClaimRole::Assumption { .. } => Base::Fixed(
                                if inputs.assumptions.get(id).copied().unwrap_or(true) {
                                    T
                                } else {
                                    U
                                },
                            ),
                            ClaimRole::ResidualDoubt { .. } => Base::Residual,
                            _ => Base::Blocks(blocks_of(id)),
                        },
                        Node::Defeater(d) => {
                            let blocks = blocks_of(id);
                            if blocks.is_empty() {
                                Base::Fixed(match d.status {
                                    DefeaterStatus::Sustained => T,
                                    DefeaterStatus::Refuted => F,
                                    _ => U,
                                })
                            } else {
                                Base::Blocks(blocks)
                            }
                        }
                        _ => unreachable!(),
                    };
                    Rule::Claim {
                        override_: inputs.overrides.get(id).copied(),
                        exploratory: exploratory.get(id).cloned().unwrap_or_default(),
                        exact: exact.get(id).copied(),
                        base,
                    }
                }
            })
            .collect();
        Oracle { ids, rules }
    }

    /// The value node `i` takes given what is known, if already forced.
    fn fire(&self, i: usize, s: &[Option<Val>]) -> Option<Val> {
        match &self.rules[i] {
            Rule::Fixed(v) => val(*v),
            Rule::Step {
                mode,
                side,
                subs,
                concurred,
            } => {
                if !concurred {
                    return val(U);
                }
                // bypassed residuals vanish from the step
                let side = match side {
                    None => Some(T),
                    Some(j) => s[*j].map(|x| if x.bypass { T } else { x.v }),
                };
                let known: Vec<Assessment> = subs
                    .iter()
                    .filter_map(|j| s[*j])
                    .filter(|x| !x.bypass)
                    .map(|x| x.v)
                    .collect();
                let complete = subs.iter().all(|j| s[*j].is_some());
                if side.is_some_and(|v| v != T) {
                    return val(U);
                }
                match mode {
                    BlockMode::Conjunctive => {
                        if known.iter().any(|v| *v != T) {
                            val(U)
                        } else if complete && side.is_some() {
                            val(T)
                        } else {
                            None
                        }
                    }
                    BlockMode::Disjunctive => {
                        side?;
                        if known.contains(&T) {
                            val(T)
                        } else if !complete {
                            None
                        } else if !known.is_empty() && known.iter().all(|v| *v == F) {
                            val(F)
                        } else {
                            val(U)
                        }
                    }
                }
            }
            Rule::Claim {
                override_,
                exploratory,
                exact,
                base,
            } => {
                if let Some(v) = override_ {
                    return val(*v);
                }
                if exploratory.iter().any(|d| s[*d].is_some_and(|x| x.v != F)) {
                    return val(U);
                }
                let b = match exact {
                    Some(x) => s[*x].map(|x| Val {
                        v: if x.v == U { U } else { !x.v },
                        bypass: false,
                    }),
                    None => match base {
                        Base::Fixed(v) => val(*v),
                        Base::Residual => Some(Val { v: T, bypass: true }),
                        Base::Blocks(bs) => {
                            let known: Vec<Assessment> =
                                bs.iter().filter_map(|j| s[*j]).map(|x| x.v).collect();
                            if bs.is_empty() || known.windows(2).any(|w| w[0] != w[1]) {
                                val(U)
                            } else if known.len() == bs.len() {
                                val(known[0])
                            } else {
                                None
                            }
                        }
                    },
                }?;
                if b.v == U {
                    // demotion would give the same value
                    return Some(b);
                }
                if exploratory.iter().all(|d| s[*d].is_some()) {
                    Some(b)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Debug)]
pub enum OracleError {
    /// Some firing order got stuck before every node was assessed.
    Stuck(Vec<NodeId>),
    /// Two firing orders ended in different assignments.
    Diverged {
        left: BTreeMap<NodeId, Assessment>,
        right: BTreeMap<NodeId, Assessment>,
    },
}

/// Explore every rule firing order and return the unique final assignment.
pub fn confluence_oracle(
    g: &CaseGraph,
    inputs: &LeafInputs,
) -> Result<BTreeMap<NodeId, Assessment>, OracleError> {
    let o = Oracle::new(g, inputs);
    let n = o.ids.len();
    let mut seen: HashSet<Vec<Option<Val>>> = HashSet::new();
    let mut stack = vec![vec![None; n]];
    let mut result: Option<Vec<Option<Val>>> = None;
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let mut fired = false;
        for i in 0..n {
            if state[i].is_some() {
                continue;
            }
            if let Some(v) = o.fire(i, &state) {
                fired = true;
                let mut next = state.clone();
                next[i] = Some(v);
                stack.push(next);
            }
        }
        if fired {
            continue;
        }
        let to_map = |s: &[Option<Val>]| -> BTreeMap<NodeId, Assessment> {
            o.ids
                .iter()
                .zip(s)
                .filter_map(|(id, v)| v.map(|v| (id.clone(), v.v)))
                .collect()
        };
        if state.iter().any(Option::is_none) {
            return Err(OracleError::Stuck(
                o.ids
                    .iter()
                    .zip(&state)
                    .filter(|(_, v)| v.is_none())
                    .map(|(id, _)| id.clone())
                    .collect(),
            ));
        }
        match &result {
            None => result = Some(state),
            Some(r) if *r == state => {}
            Some(r) => {
                return Err(OracleError::Diverged {
                    left: to_map(r),
                    right: to_map(&state),
                })
            }
        }
    }
    let r = result.expect("at least one terminal state");
    Ok(o.ids
        .iter()
        .zip(r)
        .map(|(id, v)| (id.clone(), v.unwrap().v))
        .collect())
}
