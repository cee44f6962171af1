//! Expected outcomes for the validity rule-table fixtures, taken from the
//! rule examples: each row is (node, value, node whose defeater decided it).

use std::path::PathBuf;

use a2_core::validity::Assessment::{self, False as F, True as T, Unsupported as U};

pub struct RuleCase {
    pub rule: &'static str,
    pub file: &'static str,
    pub expect: &'static [(&'static str, Assessment)],
    /// (claim, defeater) pairs where the claim's cause must be that defeater;
    /// `exonerated` marks an exoneration rather than a demotion or negation.
    pub decided_by: &'static [(&'static str, &'static str, bool)],
}

pub const RULE_TABLE: &[RuleCase] = &[
    RuleCase {
        rule: "classical TRUE propagation",
        file: "rules/true_propagation.a2",
        expect: &[("W", T), ("S1", T), ("S2", T), ("B", T), ("C", T)],
        decided_by: &[],
    },
    RuleCase {
        rule: "UNSUPPORTED propagation",
        file: "rules/unsupported_propagation.a2",
        expect: &[("S1", T), ("S2", U), ("B", U), ("C", U)],
        decided_by: &[],
    },
    RuleCase {
        rule: "FALSE antecedent gives UNSUPPORTED",
        file: "rules/denying_antecedent.a2",
        expect: &[("W", T), ("S1", F), ("B", U), ("C", U)],
        decided_by: &[],
    },
    RuleCase {
        rule: "exoneration",
        file: "rules/exoneration.a2",
        expect: &[("BD", F), ("D", F), ("C", T)],
        decided_by: &[("C", "D", true)],
    },
    RuleCase {
        rule: "bare-doubt demotion",
        file: "rules/bare_doubt.a2",
        expect: &[("S", T), ("D", U), ("C", U)],
        decided_by: &[("C", "D", false)],
    },
    RuleCase {
        rule: "exact-defeater negation",
        file: "rules/exact_negation.a2",
        expect: &[("XQ", T), ("Q", F), ("XR", U), ("R", U), ("B", U), ("P", U)],
        decided_by: &[("Q", "XQ", false), ("R", "XR", false)],
    },
    RuleCase {
        rule: "exact-defeater negation (eliminative)",
        file: "eliminative.a2",
        expect: &[("BX", F), ("X", F), ("P", T)],
        decided_by: &[("P", "X", false)],
    },
];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every case file under the fixtures directory, relative, sorted.
pub fn fixture_corpus() -> Vec<String> {
    fn walk(dir: &std::path::Path, prefix: &str, out: &mut Vec<String>) {
        let Ok(entries) = std::fs::read_dir(dir) else {
            return;
        };
        for e in entries.flatten() {
            let name = e.file_name().to_string_lossy().into_owned();
            let rel = if prefix.is_empty() {
                name.clone()
            } else {
                format!("{prefix}/{name}")
            };
            if e.path().is_dir() {
                walk(&e.path(), &rel, out);
            } else if name.ends_with(".a2") || name.ends_with(".json") {
                out.push(rel);
            }
        }
    }
    let mut out = Vec::new();
    walk(&fixtures_dir(), "", &mut out);
    out.sort();
    out
}
