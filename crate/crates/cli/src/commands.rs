use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use a2_core::confidence::{propagate_confidence, validate_input, Method, Precondition};
use a2_core::format::{parse_case_named, serialize_case, Format};
use a2_core::report::{
    build_report, render_dot, render_report_json, render_sections, render_text, CaseReport,
    ConfidenceSection, EvidenceMeasures, ReportConfig, Section, ValiditySection,
};
use a2_core::validity::AssessmentMap;
use a2_core::{assess_validity, structural_check, Assessment, CaseGraph, LeafInputs, Node};
use a2_service::{Inputs, Service};
use serde_json::{json, Value};

use crate::config::{load_config, load_thresholds, FileConfig};
use crate::{CaseFormat, Cli, Command, Concur, OutputFormat};

pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

type Result<T> = std::result::Result<T, String>;

/// Flags and config merged; flags win.
struct Settings {
    format: OutputFormat,
    input_format: Option<Format>,
    inputs: Inputs,
    base: Option<f64>,
    tolerance: Option<f64>,
    method: Option<String>,
    port: Option<u16>,
    persist: Option<std::path::PathBuf>,
}

fn case_format(f: CaseFormat) -> Format {
    match f {
        CaseFormat::Dsl => Format::Dsl,
        CaseFormat::Json => Format::Json,
    }
}

fn settings(cli: &Cli) -> Result<Settings> {
    let file = match &cli.config {
        Some(p) => load_config(p)?,
        None => FileConfig::default(),
    };
    let format = match (cli.format, file.format.as_deref()) {
        (Some(f), _) => f,
        (None, None | Some("text")) => OutputFormat::Text,
        (None, Some("json")) => OutputFormat::Json,
        (None, Some(other)) => {
            return Err(format!(
                "config: unknown format `{other}` (expected text or json)"
            ))
        }
    };
    let input_format = match (cli.input_format, file.input_format.as_deref()) {
        (Some(f), _) => Some(case_format(f)),
        (None, None) => None,
        (None, Some("dsl")) => Some(Format::Dsl),
        (None, Some("json")) => Some(Format::Json),
        (None, Some(other)) => {
            return Err(format!(
                "config: unknown input_format `{other}` (expected dsl or json)"
            ))
        }
    };
    let mut inputs = match cli.inputs.as_ref().or(file.inputs.as_ref()) {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => Inputs::default(),
    };
    if file.concur_all == Some(true) {
        inputs.leaf.concur_all = true;
    }
    if let Some(x) = file.exploratory {
        inputs.exploratory = x;
    }
    inputs.thresholds = file.thresholds.apply(inputs.thresholds);
    Ok(Settings {
        format,
        input_format,
        inputs,
        base: file.base,
        tolerance: file.tolerance,
        method: file.method,
        port: file.port,
        persist: file.persist,
    })
}

fn load_case(path: &Path, format: Option<Format>) -> Result<CaseGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let name = path.display().to_string();
    let format = format.unwrap_or_else(|| Format::from_path(&name));
    match parse_case_named(&name, &text, format) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                eprintln!("{w}");
            }
            Ok(parsed.graph)
        }
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            Err(format!("{name}: {} error(s)", diags.len()))
        }
    }
}

fn check_inputs(g: &CaseGraph, inputs: &Inputs) -> Result<()> {
    inputs.thresholds.validate().map_err(|e| e.to_string())?;
    validate_input(g, &inputs.confidence).map_err(|e| format!("inputs: {e}"))?;
    let leaf = &inputs.leaf;
    let named = leaf
        .concurrence
        .keys()
        .chain(leaf.accepted.keys())
        .chain(leaf.assumptions.keys())
        .chain(leaf.subcases.keys())
        .chain(leaf.overrides.keys());
    for id in named {
        if !g.contains(id.as_str()) {
            return Err(format!("inputs: unknown node `{id}`"));
        }
    }
    Ok(())
}

fn report_config(s: &Settings, concur: &Concur) -> ReportConfig {
    let mut leaf = s.inputs.leaf.clone();
    if concur.concur_all {
        leaf.concur_all = true;
    }
    let mut cfg = ReportConfig {
        leaf,
        confidence: s.inputs.confidence.clone(),
        exploratory: s.inputs.exploratory,
        thresholds: s.inputs.thresholds,
        ..ReportConfig::default()
    };
    if let Some(b) = s.base {
        cfg.base = b;
    }
    if let Some(t) = s.tolerance {
        cfg.tolerance = t;
    }
    cfg
}

fn pick(r: &CaseReport, keys: &[&str]) -> Value {
    let full = serde_json::to_value(r).unwrap_or(Value::Null);
    let mut out = serde_json::Map::new();
    for k in keys {
        out.insert(
            (*k).to_string(),
            full.get(*k).cloned().unwrap_or(Value::Null),
        );
    }
    Value::Object(out)
}

fn emit(format: OutputFormat, r: &CaseReport, sections: &[Section], keys: &[&str]) -> String {
    match format {
        OutputFormat::Text => render_sections(r, sections),
        OutputFormat::Json => pretty(&pick(r, keys)),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap_or_default() + "\n"
}

/// Evidence passes when some measure that counts for soundness is
/// computable, every such measure is positive and the elicitation is
/// consistent.
fn evidence_passes(m: Option<&EvidenceMeasures>) -> bool {
    let Some(m) = m else { return false };
    let counted: Vec<_> = m
        .measures
        .iter()
        .filter(|v| v.measure.counts_for_soundness())
        .collect();
    !counted.is_empty()
        && counted.iter().all(|v| v.value.is_positive())
        && m.errors.is_empty()
        && m.findings.is_empty()
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let s = settings(cli)?;
    match &cli.command {
        Command::Check { case } => {
            let g = load_case(case, s.input_format)?;
            let findings = structural_check(&g);
            let text = match s.format {
                OutputFormat::Json => pretty(&json!({ "structural_findings": findings })),
                OutputFormat::Text if findings.is_empty() => "no structural findings\n".to_string(),
                OutputFormat::Text => findings.iter().map(|f| format!("- {f}\n")).collect(),
            };
            Ok(Outcome {
                text,
                pass: findings.is_empty(),
            })
        }
        Command::Validity { case, concur } => {
            let g = load_case(case, s.input_format)?;
            check_inputs(&g, &s.inputs)?;
            let r = build_report(&g, &report_config(&s, concur));
            let top_true = match &r.validity {
                ValiditySection::Assessed { nodes } => {
                    nodes.get(&r.top).map(|a| a.value) == Some(Assessment::True)
                }
                ValiditySection::NotAssessed { .. } => false,
            };
            Ok(Outcome {
                text: emit(
                    s.format,
                    &r,
                    &[Section::Validity, Section::ActiveDefeaters],
                    &["validity", "active_defeaters"],
                ),
                pass: top_true && r.active_defeaters.is_empty(),
            })
        }
        Command::Sound { case, concur } => {
            let g = load_case(case, s.input_format)?;
            check_inputs(&g, &s.inputs)?;
            let r = build_report(&g, &report_config(&s, concur));
            let text = match s.format {
                OutputFormat::Text => render_text(&r),
                OutputFormat::Json => render_report_json(&r),
            };
            Ok(Outcome {
                text,
                pass: r.is_sound(),
            })
        }
        Command::Confidence {
            case,
            method,
            exploratory,
            concur,
        } => {
            let g = load_case(case, s.input_format)?;
            check_inputs(&g, &s.inputs)?;
            let method: Method = method
                .as_deref()
                .or(s.method.as_deref())
                .unwrap_or("product")
                .parse()?;
            let mut cfg = report_config(&s, concur);
            cfg.methods = vec![method];
            cfg.exploratory |= *exploratory;
            let r = build_report(&g, &cfg);
            let pass = r
                .confidence
                .iter()
                .all(|c| matches!(c, ConfidenceSection::Evaluated { .. }));
            Ok(Outcome {
                text: emit(
                    s.format,
                    &r,
                    &[Section::Confidence],
                    &["confidence", "confidence_caveat"],
                ),
                pass,
            })
        }
        Command::Measures { case, node, base } => {
            let g = load_case(case, s.input_format)?;
            let mut cfg = report_config(&s, &Concur::default());
            if let Some(b) = base {
                cfg.base = *b;
            }
            if !(cfg.base.is_finite() && cfg.base > 1.0) {
                return Err(format!("log base must exceed 1, got {}", cfg.base));
            }
            let scope: Vec<String> = match node {
                Some(id) => match g.node(id) {
                    Some(Node::Evidence(_)) => vec![id.clone()],
                    Some(_) => return Err(format!("`{id}` is not an evidence node")),
                    None => return Err(format!("no node `{id}`")),
                },
                None => g
                    .nodes()
                    .filter(|n| matches!(n, Node::Evidence(_)))
                    .map(|n| n.id().to_string())
                    .collect(),
            };
            let mut r = build_report(&g, &cfg);
            r.measures
                .retain(|m| scope.iter().any(|id| id == m.node.as_str()));
            let by_node: BTreeMap<&str, &EvidenceMeasures> =
                r.measures.iter().map(|m| (m.node.as_str(), m)).collect();
            let pass = scope
                .iter()
                .all(|id| evidence_passes(by_node.get(id.as_str()).copied()));
            Ok(Outcome {
                text: emit(s.format, &r, &[Section::Measures], &["measures"]),
                pass,
            })
        }
        Command::Risks { case, thresholds } => {
            let g = load_case(case, s.input_format)?;
            let mut cfg = report_config(&s, &Concur::default());
            if let Some(p) = thresholds {
                cfg.thresholds = load_thresholds(p)?.apply(cfg.thresholds);
            }
            cfg.thresholds.validate().map_err(|e| e.to_string())?;
            let r = build_report(&g, &cfg);
            Ok(Outcome {
                text: emit(s.format, &r, &[Section::Risks], &["risks"]),
                pass: r.risks.verdict.is_acceptable(),
            })
        }
        Command::Export {
            case, dot, concur, ..
        } => {
            let g = load_case(case, s.input_format)?;
            check_inputs(&g, &s.inputs)?;
            let cfg = report_config(&s, concur);
            let text = if *dot {
                export_dot(&g, &cfg)
            } else {
                render_report_json(&build_report(&g, &cfg))
            };
            Ok(Outcome { text, pass: true })
        }
        Command::Fmt { case, to } => {
            let name = case.display().to_string();
            let from = s.input_format.unwrap_or_else(|| Format::from_path(&name));
            let g = load_case(case, Some(from))?;
            let to = to.map(case_format).unwrap_or(from);
            Ok(Outcome {
                text: serialize_case(&g, to),
                pass: true,
            })
        }
        Command::Serve {
            port,
            case,
            persist,
            concur,
        } => {
            let mut defaults = s.inputs.clone();
            defaults.thresholds.validate().map_err(|e| e.to_string())?;
            if concur.concur_all {
                defaults.leaf.concur_all = true;
            }
            let svc = match case {
                Some(p) => {
                    let g = load_case(p, s.input_format)?;
                    check_inputs(&g, &defaults)?;
                    Service::with_case(g, defaults)
                }
                None => {
                    // node-specific inputs need a case to refer to
                    defaults = Inputs {
                        leaf: LeafInputs {
                            concur_all: defaults.leaf.concur_all,
                            ..LeafInputs::default()
                        },
                        thresholds: defaults.thresholds,
                        exploratory: defaults.exploratory,
                        ..Inputs::default()
                    };
                    Service::new(defaults)
                }
            };
            let svc = match persist.as_ref().or(s.persist.as_ref()) {
                Some(p) => svc.persist_to(p),
                None => svc,
            };
            let addr = SocketAddr::from(([127, 0, 0, 1], port.or(s.port).unwrap_or(8080)));
            let rt =
                tokio::runtime::Runtime::new().map_err(|e| format!("cannot start runtime: {e}"))?;
            rt.block_on(a2_service::serve(Arc::new(svc), addr))
                .map_err(|e| format!("serve on {addr}: {e}"))?;
            Ok(Outcome {
                text: String::new(),
                pass: true,
            })
        }
    }
}

fn export_dot(g: &CaseGraph, cfg: &ReportConfig) -> String {
    let m = assess_validity(g, &cfg.leaf).unwrap_or(AssessmentMap {
        nodes: BTreeMap::new(),
        lints: Vec::new(),
    });
    let pre = if cfg.exploratory {
        Precondition::Exploratory
    } else {
        Precondition::Sound(&cfg.leaf)
    };
    let c = propagate_confidence(g, &cfg.confidence, Method::Product, pre).ok();
    render_dot(g, &m, c.as_ref())
}
