//! Residual-risk ledger: scoring, severity categories and the final gate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CaseGraph, ClaimRole, DefeaterStatus, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub node: NodeId,
    pub likelihood: f64,
    pub consequence: f64,
    /// Grouping label; the node id when absent.
    pub class: Option<String>,
}

impl ResidualEntry {
    pub fn class_label(&self) -> &str {
        self.class.as_deref().unwrap_or(self.node.as_str())
    }
}

pub fn score_residual(e: &ResidualEntry) -> f64 {
    e.likelihood * e.consequence
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskThresholds {
    pub individual: f64,
    pub class: f64,
    pub negligible: f64,
}

impl Default for RiskThresholds {
    fn default() -> Self {
        RiskThresholds {
            individual: 0.01,
            class: 0.05,
            negligible: 0.0005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid risk thresholds: {0}")]
pub struct ThresholdError(pub String);

impl RiskThresholds {
    pub fn validate(&self) -> Result<(), ThresholdError> {
        let RiskThresholds {
            individual,
            class,
            negligible,
        } = *self;
        if !(negligible > 0.0 && negligible <= individual) {
            return Err(ThresholdError(format!(
                "need 0 < negligible ({negligible}) <= individual ({individual})"
            )));
        }
        if class.partial_cmp(&individual).is_none_or(|o| o.is_lt()) || !class.is_finite() {
            return Err(ThresholdError(format!(
                "need class ({class}) >= individual ({individual})"
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        RiskThresholds {
            individual: self.individual * k,
            class: self.class * k,
            negligible: self.negligible * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskCategory {
    Negligible,
    Manageable,
    Minor,
    Significant,
}

impl fmt::Display for RiskCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RiskCategory::Negligible => "Negligible",
            RiskCategory::Manageable => "Manageable",
            RiskCategory::Minor => "Minor",
            RiskCategory::Significant => "Significant",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorizedEntry {
    pub entry: ResidualEntry,
    pub risk: f64,
    pub category: RiskCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub class: String,
    pub count: usize,
    pub total: f64,
    /// Σ risks within the class threshold.
    pub within_threshold: bool,
    /// Manageable when the class holds Minor entries and stays within threshold, else the worst entry category.
    pub category: RiskCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskLedger {
    pub thresholds: RiskThresholds,
    pub entries: Vec<CategorizedEntry>,
    pub classes: Vec<ClassVerdict>,
    /// Defeaters marked residual that have not been given a residual-doubt node with scores.
    pub unscored: Vec<NodeId>,
}

pub fn categorize(entries: &[ResidualEntry], t: &RiskThresholds) -> RiskLedger {
    let mut totals: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for e in entries {
        let slot = totals.entry(e.class_label()).or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += score_residual(e);
    }
    let within = |class: &str| totals.get(class).is_some_and(|(_, sum)| *sum <= t.class);

    let mut out: Vec<CategorizedEntry> = entries
        .iter()
        .map(|e| {
            let risk = score_residual(e);
            let category = if risk > t.individual {
                RiskCategory::Significant
            } else if risk <= t.negligible && within(e.class_label()) {
                RiskCategory::Negligible
            } else {
                RiskCategory::Minor
            };
            CategorizedEntry {
                entry: e.clone(),
                risk,
                category,
            }
        })
        .collect();
    out.sort_by(|a, b| a.entry.node.cmp(&b.entry.node));

    let classes = totals
        .iter()
        .map(|(class, (count, total))| {
            let worst = out
                .iter()
                .filter(|c| c.entry.class_label() == *class)
                .map(|c| c.category)
                .max()
                .unwrap_or(RiskCategory::Negligible);
            let within_threshold = *total <= t.class;
            let category = match worst {
                RiskCategory::Minor if within_threshold => RiskCategory::Manageable,
                other => other,
            };
            ClassVerdict {
                class: class.to_string(),
                count: *count,
                total: *total,
                within_threshold,
                category,
            }
        })
        .collect();

    RiskLedger {
        thresholds: *t,
        entries: out,
        classes,
        unscored: Vec::new(),
    }
}

/// Residual-doubt leaves of `g` as ledger entries, plus defeaters whose
/// status is residual (these carry no scores).
pub fn ledger_entries(g: &CaseGraph) -> (Vec<ResidualEntry>, Vec<NodeId>) {
    let entries = g
        .claims()
        .filter_map(|c| match &c.role {
            ClaimRole::ResidualDoubt {
                likelihood,
                consequence,
                class,
            } => Some(ResidualEntry {
                node: c.id.clone(),
                likelihood: *likelihood,
                consequence: *consequence,
                class: class.clone(),
            }),
            _ => None,
        })
        .collect();
    let unscored = g
        .defeaters()
        .filter(|d| d.status == DefeaterStatus::Residual)
        .map(|d| d.id.clone())
        .collect();
    (entries, unscored)
}

pub fn ledger_for(g: &CaseGraph, t: &RiskThresholds) -> RiskLedger {
    let (entries, unscored) = ledger_entries(g);
    let mut ledger = categorize(&entries, t);
    ledger.unscored = unscored;
    ledger
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "offender", rename_all = "kebab-case")]
pub enum Offender {
    Significant { node: NodeId, risk: f64 },
    Class { class: String, total: f64 },
    Unscored { node: NodeId },
}

impl fmt::Display for Offender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Offender::Significant { node, risk } => {
                write!(f, "`{node}` is Significant (risk {risk})")
            }
            Offender::Class { class, total } => {
                write!(
                    f,
                    "class `{class}` of Minor doubts exceeds the class threshold (total {total})"
                )
            }
            Offender::Unscored { node } => write!(
                f,
                "residual defeater `{node}` has no likelihood/consequence"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "offenders", rename_all = "kebab-case")]
pub enum RiskVerdict {
    Acceptable,
    Unacceptable(Vec<Offender>),
}

impl RiskVerdict {
    pub fn is_acceptable(&self) -> bool {
        matches!(self, RiskVerdict::Acceptable)
    }
}

pub fn final_gate_for(ledger: &RiskLedger) -> RiskVerdict {
    let mut offenders = Vec::new();
    for e in &ledger.entries {
        if e.category == RiskCategory::Significant {
            offenders.push(Offender::Significant {
                node: e.entry.node.clone(),
                risk: e.risk,
            });
        }
    }
    for c in &ledger.classes {
        let has_minor = ledger
            .entries
            .iter()
            .any(|e| e.category == RiskCategory::Minor && e.entry.class_label() == c.class);
        if has_minor && !c.within_threshold {
            offenders.push(Offender::Class {
                class: c.class.clone(),
                total: c.total,
            });
        }
    }
    for n in &ledger.unscored {
        offenders.push(Offender::Unscored { node: n.clone() });
    }
    if offenders.is_empty() {
        RiskVerdict::Acceptable
    } else {
        RiskVerdict::Unacceptable(offenders)
    }
}

pub fn final_gate(entries: &[ResidualEntry], t: &RiskThresholds) -> RiskVerdict {
    final_gate_for(&categorize(entries, t))
}
