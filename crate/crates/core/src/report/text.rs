use std::fmt::Write as _;

use super::{CaseReport, ConfidenceSection, SoundnessLabel, ValiditySection};
use crate::confidence::Provenance;
use crate::risk::RiskVerdict;

fn provenance(p: Provenance) -> String {
    match p {
        Provenance::Leaf => "leaf".into(),
        Provenance::Propagated => "propagated".into(),
        Provenance::Overridden => "overridden".into(),
        Provenance::ResidualBypass => "residual bypass".into(),
        Provenance::NotApplicable(why) => format!("not applicable: {why}"),
    }
}

/// A part of the plain-text report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    Structure,
    Validity,
    ActiveDefeaters,
    Soundness,
    Confidence,
    Measures,
    Risks,
    Lints,
}

impl Section {
    pub const ALL: [Section; 8] = [
        Section::Structure,
        Section::Validity,
        Section::ActiveDefeaters,
        Section::Soundness,
        Section::Confidence,
        Section::Measures,
        Section::Risks,
        Section::Lints,
    ];
}

/// Plain-text report; sections in fixed order, rows in node-id order.
pub fn render_text(r: &CaseReport) -> String {
    render_sections(r, &Section::ALL)
}

/// The report header followed by `sections`, always in report order. The
/// verdict line heads the header only when the soundness section is included.
pub fn render_sections(r: &CaseReport, sections: &[Section]) -> String {
    let mut o = String::new();
    if sections.contains(&Section::Soundness) {
        let _ = writeln!(
            o,
            "{}",
            match r.soundness {
                SoundnessLabel::Sound => "SOUND",
                SoundnessLabel::NotSound => "NOT SOUND",
            }
        );
    }
    let _ = writeln!(o, "case: {}", r.title);
    let _ = writeln!(o, "top claim: {}", r.top);
    let mut sections = sections.to_vec();
    sections.sort();
    sections.dedup();
    for s in sections {
        match s {
            Section::Structure => structure(&mut o, r),
            Section::Validity => validity(&mut o, r),
            Section::ActiveDefeaters => active(&mut o, r),
            Section::Soundness => soundness(&mut o, r),
            Section::Confidence => confidence(&mut o, r),
            Section::Measures => measures(&mut o, r),
            Section::Risks => risks(&mut o, r),
            Section::Lints => lints(&mut o, r),
        }
    }
    o
}

fn structure(o: &mut String, r: &CaseReport) {
    o.push_str("\nstructure\n");
    if r.structural_findings.is_empty() {
        o.push_str("  no structural findings\n");
    } else {
        for f in &r.structural_findings {
            let _ = writeln!(o, "  - {f}");
        }
    }
}

fn validity(o: &mut String, r: &CaseReport) {
    o.push_str("\nvalidity\n");
    match &r.validity {
        ValiditySection::Assessed { nodes } => {
            let width = nodes.keys().map(|k| k.as_str().len()).max().unwrap_or(0);
            for (id, a) in nodes {
                let _ = writeln!(
                    o,
                    "  {:width$}  {:11}  {}",
                    id.as_str(),
                    a.value.to_string(),
                    a.cause
                );
            }
        }
        ValiditySection::NotAssessed { reason } => {
            let _ = writeln!(o, "  not assessed: {reason}");
        }
    }
}

fn active(o: &mut String, r: &CaseReport) {
    o.push_str("\nactive defeaters\n");
    if r.active_defeaters.is_empty() {
        o.push_str("  none\n");
    } else {
        for d in &r.active_defeaters {
            let _ = writeln!(
                o,
                "  - {} on {}: {} ({})",
                d.defeater, d.affected, d.assessment, d.diagnosis
            );
        }
    }
}

fn soundness(o: &mut String, r: &CaseReport) {
    o.push_str("\nsoundness\n");
    match r.soundness {
        SoundnessLabel::Sound => o.push_str("  sound\n"),
        SoundnessLabel::NotSound => {
            o.push_str("  not sound\n");
            for reason in &r.soundness_reasons {
                let _ = writeln!(o, "  - {reason}");
            }
        }
    }
}

fn confidence(o: &mut String, r: &CaseReport) {
    for section in &r.confidence {
        let _ = writeln!(o, "\nconfidence ({})", section.method());
        let _ = writeln!(o, "  caveat: {}", r.confidence_caveat);
        match section {
            ConfidenceSection::Evaluated { map } => {
                let width = map
                    .nodes
                    .keys()
                    .map(|k| k.as_str().len())
                    .max()
                    .unwrap_or(0);
                for (id, c) in &map.nodes {
                    let value = c
                        .value
                        .map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
                    let _ = writeln!(
                        o,
                        "  {:width$}  {:>6}  {}",
                        id.as_str(),
                        value,
                        provenance(c.provenance)
                    );
                }
            }
            ConfidenceSection::NotEvaluated { reason, .. } => {
                let _ = writeln!(o, "  not evaluated: {reason}");
            }
        }
    }
}

fn measures(o: &mut String, r: &CaseReport) {
    o.push_str("\nconfirmation measures\n");
    if r.measures.is_empty() {
        o.push_str("  no elicitations\n");
    }
    for m in &r.measures {
        let _ = writeln!(o, "  {}", m.node);
        for v in &m.measures {
            match v.base {
                Some(b) => {
                    let _ = writeln!(o, "    {:8} {} (base {})", v.measure.name(), v.value, b);
                }
                None => {
                    let _ = writeln!(o, "    {:8} {}", v.measure.name(), v.value);
                }
            }
        }
        for e in &m.errors {
            let _ = writeln!(o, "    error: {e}");
        }
        for f in &m.findings {
            let _ = writeln!(o, "    inconsistent: {f}");
        }
    }
}

fn risks(o: &mut String, r: &CaseReport) {
    o.push_str("\nresidual risks\n");
    let ledger = &r.risks.ledger;
    if ledger.entries.is_empty() && ledger.unscored.is_empty() {
        o.push_str("  no residual doubts\n");
    }
    for e in &ledger.entries {
        let _ = writeln!(
            o,
            "  {}  risk {}  {}  class {}",
            e.entry.node,
            e.risk,
            e.category,
            e.entry.class_label()
        );
    }
    for c in &ledger.classes {
        let _ = writeln!(
            o,
            "  class {}: {} entr{}, total {}, {}",
            c.class,
            c.count,
            if c.count == 1 { "y" } else { "ies" },
            c.total,
            c.category
        );
    }
    for n in &ledger.unscored {
        let _ = writeln!(o, "  {n}  unscored residual defeater");
    }
    match &r.risks.verdict {
        RiskVerdict::Acceptable => o.push_str("  final gate: acceptable\n"),
        RiskVerdict::Unacceptable(offenders) => {
            o.push_str("  final gate: unacceptable\n");
            for off in offenders {
                let _ = writeln!(o, "  - {off}");
            }
        }
    }
}

fn lints(o: &mut String, r: &CaseReport) {
    if !r.lints.is_empty() {
        o.push_str("\nlints\n");
        for l in &r.lints {
            let _ = writeln!(o, "  [{}] {}", l.code, l.message);
        }
    }
}
