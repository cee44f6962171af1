//! Random tree-shaped arguments with numeric leaf confidences, plus the
//! leaf-product and leaf-doubt oracles computed on the generator's own tree.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::num;

#[derive(Debug, Clone)]
pub enum Leaf {
    Assumption,
    Evidence { id: String },
    Subcase,
}

/// Node of the generated tree. Claims and subcases are antecedents; an
/// evidence leaf is a claim supported by one incorporation block.
#[derive(Debug, Clone)]
pub enum Tree {
    Leaf {
        id: String,
        kind: Leaf,
        /// Present for evidence leaves: the incorporation block id.
        block: Option<String>,
        value: f64,
    },
    Claim {
        id: String,
        block: Box<Step>,
    },
}

#[derive(Debug, Clone)]
pub struct Step {
    pub id: String,
    pub kind: &'static str,
    pub side: Option<Tree>,
    pub subs: Vec<Tree>,
}

#[derive(Debug, Clone)]
pub struct TreeCase {
    pub text: String,
    pub top: Tree,
    /// Confidence inputs for subcases, which carry no value in the text.
    pub subcases: BTreeMap<String, f64>,
    pub nodes: usize,
}

impl Tree {
    pub fn id(&self) -> &str {
        match self {
            Tree::Leaf { id, .. } | Tree::Claim { id, .. } => id,
        }
    }

    /// Leaf confidences below this node, one entry per leaf.
    pub fn leaves(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<f64>) {
        match self {
            Tree::Leaf { value, .. } => out.push(*value),
            Tree::Claim { block, .. } => {
                for t in block.side.iter().chain(&block.subs) {
                    t.collect(out);
                }
            }
        }
    }

    pub fn leaf_product(&self) -> f64 {
        self.leaves().iter().product()
    }

    /// max(0, 1 − total leaf doubt).
    pub fn leaf_doubt(&self) -> f64 {
        (1.0 - self.leaves().iter().map(|t| 1.0 - t).sum::<f64>()).max(0.0)
    }

    /// Calls `f` with every claim, leaf and block id and the subtree whose
    /// leaves determine its confidence.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a Tree)) {
        match self {
            Tree::Leaf { id, block, .. } => {
                f(id, self);
                if let Some(b) = block {
                    f(b, self);
                }
            }
            Tree::Claim { id, block } => {
                f(id, self);
                f(&block.id, self);
                for t in block.side.iter().chain(&block.subs) {
                    t.visit(f);
                }
            }
        }
    }

    /// (block id, antecedent id, subtree) for every step edge, including
    /// incorporation steps and their evidence.
    pub fn antecedents(&self) -> Vec<(&str, &str, &Tree)> {
        let mut out = Vec::new();
        self.antecedents_into(&mut out);
        out
    }

    fn antecedents_into<'a>(&'a self, out: &mut Vec<(&'a str, &'a str, &'a Tree)>) {
        match self {
            Tree::Leaf {
                kind: Leaf::Evidence { id },
                block: Some(b),
                ..
            } => out.push((b, id, self)),
            Tree::Leaf { .. } => {}
            Tree::Claim { block, .. } => {
                for t in block.side.iter().chain(&block.subs) {
                    out.push((&block.id, t.id(), t));
                    t.antecedents_into(out);
                }
            }
        }
    }

    /// Leaf product of the top tree with `excised` counted as certain.
    pub fn product_without(&self, excised: &Tree) -> f64 {
        if std::ptr::eq(self, excised) {
            return 1.0;
        }
        match self {
            Tree::Leaf { value, .. } => *value,
            Tree::Claim { block, .. } => block
                .side
                .iter()
                .chain(&block.subs)
                .map(|t| t.product_without(excised))
                .product(),
        }
    }
}

struct Gen<'r, R> {
    rng: &'r mut R,
    counter: usize,
    budget: isize,
    subcases: BTreeMap<String, f64>,
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("{prefix}{}", self.counter)
    }

    fn value(&mut self) -> f64 {
        if self.rng.gen_bool(0.1) {
            1.0
        } else {
            // two decimals keep the text exact; max 0.99 keeps leaves below 1
            f64::from(self.rng.gen_range(5u32..=99)) / 100.0
        }
    }

    fn leaf(&mut self) -> Tree {
        let value = self.value();
        match self.rng.gen_range(0..3) {
            0 => {
                self.budget -= 1;
                Tree::Leaf {
                    id: self.fresh("A"),
                    kind: Leaf::Assumption,
                    block: None,
                    value,
                }
            }
            1 => {
                self.budget -= 1;
                let id = self.fresh("S");
                self.subcases.insert(id.clone(), value);
                Tree::Leaf {
                    id,
                    kind: Leaf::Subcase,
                    block: None,
                    value,
                }
            }
            _ => {
                self.budget -= 3;
                Tree::Leaf {
                    id: self.fresh("C"),
                    kind: Leaf::Evidence {
                        id: self.fresh("E"),
                    },
                    block: Some(self.fresh("BI")),
                    value,
                }
            }
        }
    }

    /// A claim with one supporting step. Costs at least two nodes.
    fn claim(&mut self, depth: usize) -> Tree {
        let id = self.fresh("C");
        let block = self.fresh("B");
        self.budget -= 2;
        let kinds = ["decomposition", "calculation", "substitution", "concretion"];
        let kind = kinds[self.rng.gen_range(0..kinds.len())];
        let max_subs = if matches!(kind, "decomposition" | "calculation") {
            3
        } else {
            1
        };
        let n = self.rng.gen_range(1..=max_subs);
        let side = if self.rng.gen_bool(0.3) {
            Some(self.antecedent(depth + 1))
        } else {
            None
        };
        let subs = (0..n).map(|_| self.antecedent(depth + 1)).collect();
        Tree::Claim {
            id,
            block: Box::new(Step {
                id: block,
                kind,
                side,
                subs,
            }),
        }
    }

    fn antecedent(&mut self, depth: usize) -> Tree {
        // a claim needs room for itself, its step and one more leaf,
        // plus slack for the siblings still to be generated
        if self.budget > 12 && depth < 6 && self.rng.gen_bool(0.55) {
            self.claim(depth)
        } else {
            self.leaf()
        }
    }
}

/// A random tree case with at most `max_nodes` nodes.
pub fn tree_case(rng: &mut impl Rng, max_nodes: usize) -> TreeCase {
    loop {
        let mut g = Gen {
            rng: &mut *rng,
            counter: 0,
            budget: max_nodes as isize - 3,
            subcases: BTreeMap::new(),
        };
        let top = g.claim(0);
        let subcases = std::mem::take(&mut g.subcases);
        let mut body = String::new();
        let mut nodes = 0;
        write_tree(&top, true, &mut body, &mut nodes);
        if nodes > max_nodes {
            continue;
        }
        let text = format!("case \"random tree\" {{\n{body}}}\n");
        return TreeCase {
            text,
            top,
            subcases,
            nodes,
        };
    }
}

fn write_tree(t: &Tree, top: bool, o: &mut String, nodes: &mut usize) {
    match t {
        Tree::Leaf {
            id,
            kind,
            block,
            value,
        } => {
            match kind {
                Leaf::Assumption => {
                    *nodes += 1;
                    let _ = writeln!(
                        o,
                        "  assumption {id} \"assumption {id}\" prob {};",
                        num(*value)
                    );
                }
                Leaf::Subcase => {
                    *nodes += 1;
                    let _ = writeln!(o, "  subcase {id} \"subcase {id}\";");
                }
                Leaf::Evidence { id: e } => {
                    *nodes += 3;
                    let b = block.as_deref().unwrap_or_default();
                    let _ = writeln!(o, "  claim {id} \"useful claim {id}\";");
                    let _ = writeln!(
                    o,
                    "  evidence {e} {{ description \"evidence {e}\"; assembly \"ev/{e}\"; posterior {}; }}",
                    num(*value)
                );
                    let _ = writeln!(o, "  block incorporation {b} {{ parent {id}; sub {e}; justification \"j\"; }}");
                }
            }
        }
        Tree::Claim { id, block } => {
            *nodes += 2;
            let _ = writeln!(
                o,
                "  claim {id} \"claim {id}\"{};",
                if top { " top" } else { "" }
            );
            let mut fields = format!("parent {id}; ");
            if let Some(s) = &block.side {
                let _ = write!(fields, "side {}; ", s.id());
            }
            let subs: Vec<&str> = block.subs.iter().map(Tree::id).collect();
            let _ = write!(fields, "sub {}; justification \"j\";", subs.join(", "));
            let _ = writeln!(o, "  block {} {} {{ {fields} }}", block.kind, block.id);
            for s in block.side.iter().chain(&block.subs) {
                write_tree(s, false, o, nodes);
            }
        }
    }
}
