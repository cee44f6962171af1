//! Case reports: one evaluation of every perspective, rendered as text,
//! JSON or DOT.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::confidence::{
    propagate_confidence, structure_sensitivity_report, ConfidenceInput, ConfidenceMap, Method,
    Precondition,
};
use crate::measures::{cross_check, ConsistencyFinding, MeasureResult, DEFAULT_BASE};
use crate::model::{CaseGraph, EvidenceNode, NodeId};
use crate::risk::{final_gate_for, ledger_for, RiskLedger, RiskThresholds, RiskVerdict};
use crate::structure::{structural_check, StructuralFinding};
use crate::validity::{
    active_defeaters, assess_validity, soundness_gate, ActiveDefeater, LeafInputs, NodeAssessment,
    Soundness, UnsoundReason,
};

mod dot;
mod text;

pub use dot::render_dot;
pub use text::{render_sections, render_text, Section};

pub const CONFIDENCE_CAVEAT: &str =
    "absolute confidence values carry little significance; use them to compare alternatives";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    pub leaf: LeafInputs,
    pub confidence: ConfidenceInput,
    pub methods: Vec<Method>,
    pub exploratory: bool,
    pub base: f64,
    /// Tolerance for elicitation consistency checks.
    pub tolerance: f64,
    pub thresholds: RiskThresholds,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            leaf: LeafInputs::default(),
            confidence: ConfidenceInput::default(),
            methods: vec![Method::Product, Method::Doubts],
            exploratory: false,
            base: DEFAULT_BASE,
            tolerance: 1e-6,
            thresholds: RiskThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ValiditySection {
    Assessed {
        nodes: BTreeMap<NodeId, NodeAssessment>,
    },
    NotAssessed {
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SoundnessLabel {
    Sound,
    NotSound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ConfidenceSection {
    Evaluated {
        #[serde(flatten)]
        map: ConfidenceMap,
    },
    NotEvaluated {
        method: Method,
        reason: String,
    },
}

impl ConfidenceSection {
    pub fn method(&self) -> Method {
        match self {
            ConfidenceSection::Evaluated { map } => map.method,
            ConfidenceSection::NotEvaluated { method, .. } => *method,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceMeasures {
    pub node: NodeId,
    pub measures: Vec<MeasureResult>,
    /// Measures whose inputs were present but outside their domain.
    pub errors: Vec<String>,
    pub findings: Vec<ConsistencyFinding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskSection {
    pub ledger: RiskLedger,
    pub verdict: RiskVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lint {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub title: String,
    pub top: NodeId,
    pub structural_findings: Vec<StructuralFinding>,
    pub validity: ValiditySection,
    pub active_defeaters: Vec<ActiveDefeater>,
    pub soundness: SoundnessLabel,
    pub soundness_reasons: Vec<UnsoundReason>,
    pub confidence: Vec<ConfidenceSection>,
    pub confidence_caveat: String,
    pub measures: Vec<EvidenceMeasures>,
    pub risks: RiskSection,
    pub lints: Vec<Lint>,
}

impl CaseReport {
    pub fn is_sound(&self) -> bool {
        self.soundness == SoundnessLabel::Sound
    }

    pub fn confidence_map(&self, method: Method) -> Option<&ConfidenceMap> {
        self.confidence.iter().find_map(|s| match s {
            ConfidenceSection::Evaluated { map } if map.method == method => Some(map),
            _ => None,
        })
    }
}

/// Evaluate `g` under `cfg`. A pure function of its arguments.
pub fn build_report(g: &CaseGraph, cfg: &ReportConfig) -> CaseReport {
    let structural_findings = structural_check(g);
    let mut lints = Vec::new();

    let assessment = assess_validity(g, &cfg.leaf).ok();
    let validity = match &assessment {
        Some(m) => {
            for l in &m.lints {
                let code = match l {
                    crate::validity::AssessmentLint::StatusMismatch { .. } => "status-mismatch",
                    crate::validity::AssessmentLint::SubcaseIgnored { .. } => "subcase-ignored",
                    crate::validity::AssessmentLint::ResidualBypassed { .. } => "residual-bypassed",
                };
                lints.push(Lint {
                    code: code.into(),
                    message: l.to_string(),
                });
            }
            ValiditySection::Assessed {
                nodes: m.nodes.clone(),
            }
        }
        None => ValiditySection::NotAssessed {
            reason: format!("{} structural finding(s)", structural_findings.len()),
        },
    };
    let active = assessment
        .as_ref()
        .map(|m| active_defeaters(g, m))
        .unwrap_or_default();
    let (soundness, soundness_reasons) = match soundness_gate(g, assessment.as_ref(), &cfg.leaf) {
        Soundness::Sound => (SoundnessLabel::Sound, Vec::new()),
        Soundness::NotSound(r) => (SoundnessLabel::NotSound, r),
    };

    let pre = if cfg.exploratory {
        Precondition::Exploratory
    } else {
        Precondition::Sound(&cfg.leaf)
    };
    let mut confidence = Vec::new();
    for &method in &cfg.methods {
        match propagate_confidence(g, &cfg.confidence, method, pre) {
            Ok(map) => {
                for l in &map.lints {
                    let code = match l {
                        crate::confidence::ConfidenceLint::DoubtClamped { .. } => "doubt-clamped",
                        crate::confidence::ConfidenceLint::SharedSubclaim { .. } => {
                            "shared-subclaim"
                        }
                        crate::confidence::ConfidenceLint::ResidualBypassed { .. } => {
                            "residual-bypassed"
                        }
                        crate::confidence::ConfidenceLint::MultipleSupport { .. } => {
                            "multiple-support"
                        }
                        crate::confidence::ConfidenceLint::Exploratory => "exploratory",
                    };
                    lints.push(Lint {
                        code: code.into(),
                        message: format!("{method}: {l}"),
                    });
                }
                if method == Method::Product {
                    if let Ok(s) = structure_sensitivity_report(g, &cfg.confidence) {
                        let raising: Vec<_> =
                            s.excisions.iter().filter(|e| e.increases()).collect();
                        let best = raising
                            .iter()
                            .max_by(|a, b| a.top_after.total_cmp(&b.top_after));
                        if let Some(e) = best {
                            lints.push(Lint {
                                code: "excision".into(),
                                message: format!(
                                    "excising any of {} antecedent subtree(s) would raise top confidence; removing `{}` from `{}` gives {:.4} -> {:.4}",
                                    raising.len(),
                                    e.antecedent,
                                    e.block,
                                    e.top_before,
                                    e.top_after
                                ),
                            });
                        }
                    }
                }
                confidence.push(ConfidenceSection::Evaluated { map });
            }
            Err(e) => confidence.push(ConfidenceSection::NotEvaluated {
                method,
                reason: e.to_string(),
            }),
        }
    }

    let measures = g
        .evidence()
        .filter_map(|e| evidence_measures(e, cfg.base, cfg.tolerance))
        .collect();

    let ledger = ledger_for(g, &cfg.thresholds);
    let verdict = final_gate_for(&ledger);

    lints.sort();
    lints.dedup();
    CaseReport {
        title: g.title().to_string(),
        top: g.top().clone(),
        structural_findings,
        validity,
        active_defeaters: active,
        soundness,
        soundness_reasons,
        confidence,
        confidence_caveat: CONFIDENCE_CAVEAT.to_string(),
        measures,
        risks: RiskSection { ledger, verdict },
        lints,
    }
}

/// Measures and consistency findings for one evidence node; `None` if it
/// has no elicitation.
pub fn evidence_measures(e: &EvidenceNode, base: f64, tolerance: f64) -> Option<EvidenceMeasures> {
    let el = e.elicitation.as_ref()?;
    let mut measures = Vec::new();
    let mut errors = Vec::new();
    for r in el.measures(base) {
        match r {
            Ok(m) => measures.push(m),
            Err(err) => errors.push(err.to_string()),
        }
    }
    Some(EvidenceMeasures {
        node: e.id.clone(),
        measures,
        errors,
        findings: cross_check(el, tolerance),
    })
}

pub fn render_report_json(r: &CaseReport) -> String {
    let mut s = serde_json::to_string_pretty(r).unwrap_or_default();
    s.push('\n');
    s
}
