//! Graphviz export. The style table is documented in docs/style.md.

use std::fmt::Write as _;

use crate::confidence::ConfidenceMap;
use crate::model::{CaseGraph, ClaimRole, DefeaterStatus, Exactness, Node};
use crate::validity::{Assessment, AssessmentMap};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

fn shape(n: &Node) -> (&'static str, &'static str) {
    match n {
        Node::Claim(c) => match c.role {
            ClaimRole::Assumption { .. } => ("box", "rounded,filled"),
            ClaimRole::ResidualDoubt { .. } => ("box", "dashed,filled"),
            _ => ("box", "filled"),
        },
        Node::Block(_) => ("diamond", "filled"),
        Node::Evidence(_) => ("note", "filled"),
        Node::Defeater(d) if d.status == DefeaterStatus::Addressed => ("octagon", "dashed,filled"),
        Node::Defeater(_) => ("octagon", "filled"),
        Node::Subcase(_) => ("folder", "filled"),
    }
}

fn fill(a: Option<Assessment>) -> &'static str {
    match a {
        Some(Assessment::True) => "palegreen",
        Some(Assessment::False) => "lightcoral",
        Some(Assessment::Unsupported) => "lightgray",
        None => "white",
    }
}

fn text_of(n: &Node) -> &str {
    match n {
        Node::Claim(c) => &c.text,
        Node::Block(b) => b.kind.keyword(),
        Node::Evidence(e) => &e.description,
        Node::Defeater(d) => &d.claim,
        Node::Subcase(s) => &s.text,
    }
}

/// One DOT node per case node; edges run from a claim to its supporting
/// block, from a block to its antecedents and from a defeater to its target.
pub fn render_dot(g: &CaseGraph, m: &AssessmentMap, c: Option<&ConfidenceMap>) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "digraph \"{}\" {{", escape(g.title()));
    o.push_str("  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n");
    for n in g.nodes() {
        let id = n.id();
        let (shape, style) = shape(n);
        let mut label = format!("{}\n{}", id, text_of(n));
        if let Some(v) = c.and_then(|c| c.value(id.as_str())) {
            let _ = write!(label, "\n[{v:.4}]");
        }
        let _ = writeln!(
            o,
            "  \"{}\" [shape={shape}, style=\"{style}\", fillcolor={}, label=\"{}\"];",
            escape(id.as_str()),
            fill(m.get(id.as_str())),
            escape(&label)
        );
    }
    for n in g.nodes() {
        match n {
            Node::Block(b) => {
                let _ = writeln!(
                    o,
                    "  \"{}\" -> \"{}\";",
                    escape(b.parent.as_str()),
                    escape(b.id.as_str())
                );
                if let Some(s) = &b.sideclaim {
                    let _ = writeln!(
                        o,
                        "  \"{}\" -> \"{}\" [style=dotted, label=\"side\"];",
                        escape(b.id.as_str()),
                        escape(s.as_str())
                    );
                }
                for s in &b.subclaims {
                    let _ = writeln!(
                        o,
                        "  \"{}\" -> \"{}\";",
                        escape(b.id.as_str()),
                        escape(s.as_str())
                    );
                }
            }
            Node::Defeater(d) => {
                let mut attrs = vec!["color=firebrick".to_string()];
                if d.exactness == Exactness::Exact {
                    attrs.push("arrowhead=tee".into());
                    attrs.push("label=\"exact\"".into());
                }
                if d.status == DefeaterStatus::Addressed {
                    attrs.push("style=dashed".into());
                }
                let _ = writeln!(
                    o,
                    "  \"{}\" -> \"{}\" [{}];",
                    escape(d.id.as_str()),
                    escape(d.target.as_str()),
                    attrs.join(", ")
                );
            }
            _ => {}
        }
    }
    o.push_str("}\n");
    o
}
