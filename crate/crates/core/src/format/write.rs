//! Canonical DSL serialization.

use std::fmt::Write as _;

use crate::measures::{Elicitation, Judgment};
use crate::model::{BlockMode, CaseGraph, ClaimRole, Node};

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Shortest decimal that reads back to the same value.
pub(crate) fn number(v: f64) -> String {
    format!("{v}")
}

fn judgment(j: Judgment) -> String {
    match j {
        Judgment::Numeric(v) => number(v),
        Judgment::Qualitative(l) => l.keyword().to_string(),
    }
}

fn elicit(out: &mut String, e: &Elicitation) {
    out.push_str("    elicit {");
    for (field, j) in e.entries() {
        let _ = write!(out, " {} {};", field.keyword(), judgment(j));
    }
    out.push_str(" }\n");
}

pub(crate) fn to_dsl(g: &CaseGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "case {} {{", quote(g.title()));
    for node in g.nodes() {
        match node {
            Node::Claim(c) => match &c.role {
                ClaimRole::Assumption { prob } => {
                    let _ = write!(
                        out,
                        "  assumption {} {} prob {}",
                        c.id,
                        quote(&c.text),
                        number(*prob)
                    );
                    if let Some(j) = &c.justification {
                        let _ = write!(out, " justification {}", quote(j));
                    }
                    out.push_str(";\n");
                }
                ClaimRole::ResidualDoubt {
                    likelihood,
                    consequence,
                    class,
                } => {
                    let _ = write!(
                        out,
                        "  residual {} {} likelihood {} consequence {}",
                        c.id,
                        quote(&c.text),
                        number(*likelihood),
                        number(*consequence)
                    );
                    if let Some(k) = class {
                        let _ = write!(out, " class {}", quote(k));
                    }
                    out.push_str(";\n");
                }
                role => {
                    let _ = write!(out, "  claim {} {}", c.id, quote(&c.text));
                    match role {
                        ClaimRole::Top => out.push_str(" top"),
                        ClaimRole::Side => out.push_str(" side"),
                        _ => {}
                    }
                    if let Some(j) = &c.justification {
                        let _ = write!(out, " justification {}", quote(j));
                    }
                    out.push_str(";\n");
                }
            },
            Node::Evidence(e) => {
                let _ = writeln!(out, "  evidence {} {{", e.id);
                let _ = writeln!(out, "    description {};", quote(&e.description));
                let _ = writeln!(out, "    assembly {};", quote(&e.assembly));
                if let Some(p) = e.posterior {
                    let _ = writeln!(out, "    posterior {};", number(p));
                }
                if !e.accepted {
                    out.push_str("    accepted false;\n");
                }
                if let Some(el) = &e.elicitation {
                    elicit(&mut out, el);
                }
                out.push_str("  }\n");
            }
            Node::Block(b) => {
                let _ = writeln!(out, "  block {} {} {{", b.kind.keyword(), b.id);
                let _ = writeln!(out, "    parent {};", b.parent);
                if b.mode == BlockMode::Disjunctive {
                    out.push_str("    mode disjunctive;\n");
                }
                if let Some(s) = &b.sideclaim {
                    let _ = writeln!(out, "    side {s};");
                }
                let subs: Vec<&str> = b.subclaims.iter().map(|s| s.as_str()).collect();
                let _ = writeln!(out, "    sub {};", subs.join(", "));
                let _ = writeln!(out, "    justification {};", quote(&b.justification));
                out.push_str("  }\n");
            }
            Node::Defeater(d) => {
                let _ = writeln!(out, "  defeater {} {} {{", d.id, d.exactness.keyword());
                let _ = writeln!(out, "    targets {};", d.target);
                if !d.claim.is_empty() {
                    let _ = writeln!(out, "    claim {};", quote(&d.claim));
                }
                let _ = writeln!(out, "    status {};", d.status.keyword());
                if let Some(n) = &d.narrative {
                    let _ = writeln!(out, "    narrative {};", quote(n));
                }
                out.push_str("  }\n");
            }
            Node::Subcase(s) => {
                let _ = write!(out, "  subcase {} {}", s.id, quote(&s.text));
                if let Some(x) = &s.external {
                    let _ = write!(out, " external {}", quote(x));
                }
                if let Some(a) = s.assessed {
                    let _ = write!(out, " assessed {}", a.keyword());
                }
                out.push_str(";\n");
            }
        }
    }
    out.push_str("}\n");
    out
}
