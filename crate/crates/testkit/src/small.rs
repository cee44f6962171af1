//! Small random cases (a dozen nodes or so) exercising every validity rule:
//! conjunctive and disjunctive steps, all leaf kinds, exploratory and exact
//! defeaters with and without subcases, concurrence and overrides.

use std::fmt::Write as _;

use a2_core::validity::Assessment;
use a2_core::{LeafInputs, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct SmallCase {
    pub text: String,
    pub inputs: LeafInputs,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Claim,
    Assumption,
    Residual,
    Subcase,
    Evidence,
    Block,
    Defeater,
}

struct Gen<'r, R> {
    rng: &'r mut R,
    max: usize,
    lines: Vec<String>,
    nodes: Vec<(String, Kind)>,
    /// Claims and defeaters still owed a supporting block.
    open: Vec<String>,
    exact_targets: Vec<String>,
    inputs: LeafInputs,
}

const STATUSES: [&str; 6] = [
    "doubt",
    "investigating",
    "sustained",
    "refuted",
    "addressed",
    "residual",
];

impl<R: Rng> Gen<'_, R> {
    fn add(&mut self, prefix: &str, kind: Kind) -> String {
        let id = format!("{prefix}{}", self.nodes.len());
        self.nodes.push((id.clone(), kind));
        id
    }

    fn room(&self) -> usize {
        // every open claim still needs an incorporation block and evidence
        self.max
            .saturating_sub(self.nodes.len() + 2 * self.open.len())
    }

    fn assessed(&mut self) -> &'static str {
        [
            "",
            " assessed true",
            " assessed false",
            " assessed unsupported",
        ][self.rng.gen_range(0..4)]
    }

    fn leaf_antecedent(&mut self) -> String {
        // reuse an existing leaf sometimes, to share subclaims
        let reusable: Vec<String> = self
            .nodes
            .iter()
            .filter(|(_, k)| matches!(k, Kind::Assumption | Kind::Residual | Kind::Subcase))
            .map(|(id, _)| id.clone())
            .collect();
        if !reusable.is_empty() && self.rng.gen_bool(0.15) {
            return reusable.choose(self.rng).unwrap().clone();
        }
        match self.rng.gen_range(0..3) {
            0 => {
                let id = self.add("A", Kind::Assumption);
                self.lines.push(format!("assumption {id} \"a\" prob 0.9;"));
                if self.rng.gen_bool(0.15) {
                    self.inputs
                        .assumptions
                        .insert(NodeId::new(&id).unwrap(), false);
                }
                id
            }
            1 => {
                let id = self.add("R", Kind::Residual);
                self.lines.push(format!(
                    "residual {id} \"r\" likelihood 0.1 consequence 0.01;"
                ));
                id
            }
            _ => {
                let id = self.add("S", Kind::Subcase);
                let a = self.assessed();
                self.lines.push(format!("subcase {id} \"s\"{a};"));
                id
            }
        }
    }

    /// `after` antecedents of the same step are still to be placed.
    fn antecedent(&mut self, after: usize) -> String {
        if self.room() >= 3 + after && self.rng.gen_bool(0.35) {
            let id = self.add("C", Kind::Claim);
            self.lines.push(format!("claim {id} \"c\";"));
            self.open.push(id.clone());
            id
        } else {
            self.leaf_antecedent()
        }
    }

    fn concurrence(&mut self, block: &str) {
        if self.rng.gen_bool(0.85) {
            self.inputs
                .concurrence
                .insert(NodeId::new(block).unwrap(), true);
        }
    }

    fn incorporate(&mut self, parent: &str) {
        let e = self.add("E", Kind::Evidence);
        let b = self.add("B", Kind::Block);
        let accepted = if self.rng.gen_bool(0.8) {
            ""
        } else {
            " accepted false;"
        };
        self.lines.push(format!(
            "evidence {e} {{ description \"e\"; assembly \"a\"; posterior 0.9;{accepted} }}"
        ));
        self.lines.push(format!(
            "block incorporation {b} {{ parent {parent}; sub {e}; justification \"j\"; }}"
        ));
        self.concurrence(&b);
    }

    /// Support `parent` with an incorporation or a general step.
    fn support(&mut self, parent: &str) {
        // the parent's reservation was released when it left `open`
        let room = self.room();
        if room < 3 || self.rng.gen_bool(0.3) {
            self.incorporate(parent);
            return;
        }
        let b = self.add("B", Kind::Block);
        let kinds = ["decomposition", "calculation", "substitution", "concretion"];
        let kind = *kinds.choose(self.rng).unwrap();
        let disjunctive = kind == "decomposition" && self.rng.gen_bool(0.35);
        let max_subs = if matches!(kind, "decomposition" | "calculation") {
            3
        } else {
            1
        };
        let n = self.rng.gen_range(1..=max_subs).min(room - 1);
        let side = if room >= 2 + n && self.rng.gen_bool(0.35) {
            Some(self.antecedent(n))
        } else {
            None
        };
        let subs: Vec<String> = (0..n).map(|i| self.antecedent(n - 1 - i)).collect();
        let mut fields = format!("parent {parent}; ");
        if disjunctive {
            fields.push_str("mode disjunctive; ");
        }
        if let Some(s) = side {
            let _ = write!(fields, "side {s}; ");
        }
        let _ = write!(fields, "sub {}; justification \"j\";", subs.join(", "));
        self.lines.push(format!("block {kind} {b} {{ {fields} }}"));
        self.concurrence(&b);
    }

    fn defeater(&mut self) {
        let exact = self.rng.gen_bool(0.35);
        let candidates: Vec<String> = self
            .nodes
            .iter()
            .filter(|(id, k)| {
                !exact
                    || (matches!(
                        k,
                        Kind::Claim | Kind::Assumption | Kind::Residual | Kind::Defeater
                    ) && !self.exact_targets.contains(id))
            })
            .map(|(id, _)| id.clone())
            .collect();
        let Some(target) = candidates.choose(self.rng).cloned() else {
            return;
        };
        let d = self.add("D", Kind::Defeater);
        if exact {
            self.exact_targets.push(target.clone());
        }
        let status = *STATUSES.choose(self.rng).unwrap();
        self.lines.push(format!(
            "defeater {d} {} {{ targets {target}; claim \"d\"; status {status}; }}",
            if exact { "exact" } else { "exploratory" }
        ));
        let room = self.room();
        if room >= 2 && self.rng.gen_bool(0.5) {
            if room >= 3 && self.rng.gen_bool(0.5) {
                // a small subcase: one or two subcase leaves under one step
                let b = self.add("B", Kind::Block);
                let n = if room >= 4 && self.rng.gen_bool(0.5) {
                    2
                } else {
                    1
                };
                let subs: Vec<String> = (0..n)
                    .map(|_| {
                        let s = self.add("S", Kind::Subcase);
                        let a = self.assessed();
                        self.lines.push(format!("subcase {s} \"s\"{a};"));
                        s
                    })
                    .collect();
                let mode = if n == 2 && self.rng.gen_bool(0.5) {
                    "mode disjunctive; "
                } else {
                    ""
                };
                self.lines.push(format!(
                    "block decomposition {b} {{ parent {d}; {mode}sub {}; justification \"j\"; }}",
                    subs.join(", ")
                ));
                self.concurrence(&b);
            } else {
                self.incorporate(&d);
            }
        }
    }
}

/// A random structurally valid case with at most `max_nodes` nodes.
pub fn small_case(rng: &mut impl Rng, max_nodes: usize) -> SmallCase {
    assert!(max_nodes >= 3);
    let mut g = Gen {
        rng,
        max: max_nodes,
        lines: Vec::new(),
        nodes: Vec::new(),
        open: Vec::new(),
        exact_targets: Vec::new(),
        inputs: LeafInputs::default(),
    };
    let top = g.add("T", Kind::Claim);
    g.lines.push(format!("claim {top} \"top\" top;"));
    g.open.push(top);
    while let Some(c) = g.open.pop() {
        g.support(&c);
    }
    while g.nodes.len() < g.max && g.rng.gen_bool(0.7) {
        g.defeater();
    }
    if g.rng.gen_bool(0.1) {
        let claims: Vec<String> = g
            .nodes
            .iter()
            .filter(|(_, k)| *k == Kind::Claim)
            .map(|(id, _)| id.clone())
            .collect();
        let c = claims.choose(g.rng).unwrap().clone();
        let v =
            [Assessment::True, Assessment::False, Assessment::Unsupported][g.rng.gen_range(0..3)];
        g.inputs.overrides.insert(NodeId::new(c).unwrap(), v);
    }
    let mut text = String::from("case \"small\" {\n");
    for l in &g.lines {
        let _ = writeln!(text, "  {l}");
    }
    text.push_str("}\n");
    SmallCase {
        text,
        inputs: g.inputs,
        nodes: g.nodes.len(),
    }
}
