use std::collections::BTreeMap;
use std::sync::Arc;

use a2_core::confidence::{
    propagate_confidence, validate_input, ConfidenceError, Method, Precondition,
};
use a2_core::format::{parse_case_named, serialize_case, CaseDocument, Format};
use a2_core::measures::{ElicitField, Elicitation, Judgment, QualitativeLevel};
use a2_core::model::{DefeaterNode, DefeaterStatus, Exactness, Node};
use a2_core::report::{build_report, evidence_measures, render_dot, ReportConfig};
use a2_core::risk::{final_gate_for, ledger_for};
use a2_core::validity::{active_defeaters, AssessmentMap, Soundness};
use a2_core::{assess_validity, soundness_gate, structural_check, CaseGraph, NodeId};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{ApiError, Inputs, Request, Response, Service, Snapshot};

type Result<T> = std::result::Result<T, ApiError>;

pub(crate) fn dispatch(svc: &Service, req: &Request<'_>) -> Response {
    let segments: Vec<&str> = req.path.trim_matches('/').split('/').collect();
    let (allow, outcome) = match segments.as_slice() {
        ["api", "case"] => (
            "GET, PUT",
            match req.method {
                "GET" => get_case(&svc.snapshot()),
                "PUT" => put_case(svc, req),
                _ => Err(not_allowed()),
            },
        ),
        ["api", "inputs"] => (
            "GET, PUT",
            match req.method {
                "GET" => {
                    let s = svc.snapshot();
                    Ok((200, json!({ "revision": s.revision, "inputs": s.inputs })))
                }
                "PUT" => put_inputs(svc, req),
                _ => Err(not_allowed()),
            },
        ),
        ["api", "assessment", "validity"] => ("GET", read(req, || validity(&svc.snapshot()))),
        ["api", "assessment", "confidence"] => {
            ("GET", read(req, || confidence(&svc.snapshot(), req.query)))
        }
        ["api", "nodes", id, "measures"] => (
            "GET",
            read(req, || measures(&svc.snapshot(), id, req.query)),
        ),
        ["api", "nodes", id, "elicitation"] => (
            "PATCH",
            write(req, "PATCH", || patch_elicitation(svc, req, id)),
        ),
        ["api", "nodes", id, "override"] => (
            "PATCH",
            write(req, "PATCH", || patch_override(svc, req, id)),
        ),
        ["api", "defeaters"] => ("POST", write(req, "POST", || post_defeater(svc, req))),
        ["api", "defeaters", id] => (
            "PATCH, DELETE",
            match req.method {
                "PATCH" => patch_defeater(svc, req, id),
                "DELETE" => delete_defeater(svc, req, id),
                _ => Err(not_allowed()),
            },
        ),
        ["api", "risks"] => ("GET", read(req, || risks(&svc.snapshot()))),
        ["api", "report"] => ("GET", read(req, || report(&svc.snapshot(), req.query))),
        ["api", "export", "dot"] => {
            let allow = "GET";
            if req.method != "GET" {
                return respond(svc, Err(not_allowed()), Some(allow));
            }
            let s = svc.snapshot();
            return match dot(&s) {
                Ok(text) => Response {
                    status: 200,
                    content_type: "text/vnd.graphviz",
                    body: text,
                    revision: s.revision,
                    allow: None,
                },
                Err(e) => respond(svc, Err(e), None),
            };
        }
        _ => {
            return respond(
                svc,
                Err(ApiError::not_found(
                    "not-found",
                    format!("no endpoint at {}", req.path),
                )),
                None,
            )
        }
    };
    respond(svc, outcome, Some(allow))
}

fn respond(svc: &Service, outcome: Result<(u16, Value)>, allow: Option<&'static str>) -> Response {
    let revision = svc.snapshot().revision;
    match outcome {
        Ok((status, body)) => Response {
            status,
            content_type: "application/json",
            body: body.to_string() + "\n",
            revision: body
                .get("revision")
                .and_then(Value::as_u64)
                .unwrap_or(revision),
            allow: None,
        },
        Err(e) => Response {
            status: e.status,
            content_type: "application/json",
            body: serde_json::to_string(&e).unwrap_or_default() + "\n",
            revision,
            allow: if e.status == 405 { allow } else { None },
        },
    }
}

fn not_allowed() -> ApiError {
    ApiError::new(
        405,
        "method-not-allowed",
        "method not allowed on this endpoint",
    )
}

fn read(req: &Request<'_>, f: impl FnOnce() -> Result<(u16, Value)>) -> Result<(u16, Value)> {
    if req.method != "GET" {
        return Err(not_allowed());
    }
    f()
}

fn write(
    req: &Request<'_>,
    method: &str,
    f: impl FnOnce() -> Result<(u16, Value)>,
) -> Result<(u16, Value)> {
    if req.method != method {
        return Err(not_allowed());
    }
    f()
}

fn query(q: &str) -> BTreeMap<String, String> {
    form_urlencoded::parse(q.as_bytes()).into_owned().collect()
}

fn flag(q: &BTreeMap<String, String>, key: &str) -> Result<Option<bool>> {
    match q.get(key).map(String::as_str) {
        None => Ok(None),
        Some("" | "true" | "1") => Ok(Some(true)),
        Some("false" | "0") => Ok(Some(false)),
        Some(v) => Err(ApiError::new(
            400,
            "bad-query",
            format!("`{key}` must be true or false, got `{v}`"),
        )),
    }
}

fn case(s: &Snapshot) -> Result<&Arc<CaseGraph>> {
    s.case
        .as_ref()
        .ok_or_else(|| ApiError::not_found("no-case", "no case is loaded; PUT /api/case first"))
}

fn json_body<T: DeserializeOwned>(req: &Request<'_>) -> Result<T> {
    let ct = req.content_type.unwrap_or("");
    if media_type(ct) != "application/json" {
        return Err(ApiError::new(
            415,
            "unsupported-media-type",
            format!("expected application/json, got `{ct}`"),
        ));
    }
    serde_json::from_slice(req.body).map_err(|e| ApiError::bad_request(e.to_string()))
}

fn media_type(ct: &str) -> String {
    ct.split(';')
        .next()
        .unwrap_or("")
        .trim()
        .to_ascii_lowercase()
}

fn node_id(id: &str) -> Result<NodeId> {
    NodeId::new(id).map_err(|_| ApiError::not_found("unknown-node", format!("no node `{id}`")))
}

// ---- mutation plumbing ----

enum Change {
    Case(CaseGraph),
    Inputs(Inputs),
    Both(CaseGraph, Inputs),
}

/// Apply one mutation under the session lock, honouring If-Match and
/// write-through persistence. Returns the new revision.
fn mutate(
    svc: &Service,
    req: &Request<'_>,
    f: impl FnOnce(&Snapshot) -> Result<Change>,
) -> Result<u64> {
    let mut st = svc.lock();
    if let Some(tag) = req.if_match {
        let want = parse_etag(tag)?;
        if want != st.revision {
            return Err(ApiError::new(
                409,
                "revision-conflict",
                format!(
                    "If-Match names revision {want}, current revision is {}",
                    st.revision
                ),
            ));
        }
    }
    let change = f(&st)?;
    let (case, inputs) = match change {
        Change::Case(g) => (Some(g), None),
        Change::Inputs(i) => (None, Some(i)),
        Change::Both(g, i) => (Some(g), Some(i)),
    };
    if let (Some(g), Some(path)) = (&case, &svc.persist) {
        let text = serialize_case(g, Format::from_path(&path.to_string_lossy()));
        std::fs::write(path, text).map_err(|e| {
            ApiError::new(
                500,
                "persist-failed",
                format!("cannot write {}: {e}", path.display()),
            )
        })?;
    }
    if let Some(g) = case {
        st.case = Some(Arc::new(g));
    }
    if let Some(i) = inputs {
        st.inputs = i;
    }
    st.revision += 1;
    Ok(st.revision)
}

fn parse_etag(tag: &str) -> Result<u64> {
    let t = tag.trim();
    let t = t.strip_prefix("W/").unwrap_or(t).trim_matches('"');
    t.parse().map_err(|_| {
        ApiError::new(
            400,
            "bad-if-match",
            format!("If-Match must name a revision, got `{tag}`"),
        )
    })
}

/// Rebuild `g` with `edit`, rejecting results a parser would also reject.
fn rebuild(g: &CaseGraph, edit: impl FnOnce(&mut Vec<Node>)) -> Result<CaseGraph> {
    let g = g
        .rebuild(edit)
        .map_err(|e| ApiError::unprocessable("invalid-case", e.to_string()).with_details(&[e]))?;
    let local: Vec<_> = structural_check(&g)
        .into_iter()
        .filter(|f| f.is_block_local())
        .collect();
    if !local.is_empty() {
        let message = local
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        return Err(ApiError::unprocessable("invalid-case", message).with_details(&local));
    }
    Ok(g)
}

fn check_inputs(g: &CaseGraph, inputs: &Inputs) -> Result<()> {
    inputs
        .thresholds
        .validate()
        .map_err(|e| ApiError::unprocessable("invalid-thresholds", e.0))?;
    validate_input(g, &inputs.confidence)
        .map_err(|e| ApiError::unprocessable("invalid-input", e.to_string()))?;
    let leaf = &inputs.leaf;
    let ids = leaf
        .concurrence
        .keys()
        .chain(leaf.accepted.keys())
        .chain(leaf.assumptions.keys())
        .chain(leaf.subcases.keys())
        .chain(leaf.overrides.keys());
    for id in ids {
        if !g.contains(id.as_str()) {
            return Err(ApiError::unprocessable(
                "invalid-input",
                format!("input names unknown node `{id}`"),
            ));
        }
    }
    Ok(())
}

// ---- case and inputs ----

fn get_case(s: &Snapshot) -> Result<(u16, Value)> {
    let g = case(s)?;
    // the body is the JSON case form plus the revision it reflects
    let mut doc = serde_json::to_value(CaseDocument::from_graph(g))
        .map_err(|e| ApiError::new(500, "internal", e.to_string()))?;
    if let Some(o) = doc.as_object_mut() {
        o.insert("revision".into(), json!(s.revision));
    }
    Ok((200, doc))
}

fn put_case(svc: &Service, req: &Request<'_>) -> Result<(u16, Value)> {
    let ct = req.content_type.unwrap_or("");
    let mt = media_type(ct);
    let format = match mt.as_str() {
        "application/json" => Format::Json,
        "text/plain" | "text/x-a2" => Format::Dsl,
        _ => {
            return Err(ApiError::new(
                415,
                "unsupported-media-type",
                format!("send the case as application/json or text/plain, got `{ct}`"),
            ))
        }
    };
    let text =
        std::str::from_utf8(req.body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let parsed = parse_case_named("request", text, format).map_err(|d| ApiError::parse(&d))?;
    let warnings: Vec<String> = parsed.warnings.iter().map(ToString::to_string).collect();
    let defaults = svc.defaults.clone();
    let revision = mutate(svc, req, |_| Ok(Change::Both(parsed.graph, defaults)))?;
    Ok((200, json!({ "revision": revision, "warnings": warnings })))
}

fn put_inputs(svc: &Service, req: &Request<'_>) -> Result<(u16, Value)> {
    let inputs: Inputs = json_body(req)?;
    let revision = mutate(svc, req, |s| {
        check_inputs(case(s)?, &inputs)?;
        Ok(Change::Inputs(inputs))
    })?;
    Ok((200, json!({ "revision": revision })))
}

// ---- evaluations ----

fn validity(s: &Snapshot) -> Result<(u16, Value)> {
    let g = case(s)?;
    let m = assess_validity(g, &s.inputs.leaf).map_err(|e| {
        let findings = structural_check(g);
        ApiError::unprocessable("precondition-violated", e.to_string()).with_details(&findings)
    })?;
    let active = active_defeaters(g, &m);
    let (soundness, reasons) = match soundness_gate(g, Some(&m), &s.inputs.leaf) {
        Soundness::Sound => ("sound", Vec::new()),
        Soundness::NotSound(r) => ("not-sound", r),
    };
    Ok((
        200,
        json!({
            "revision": s.revision,
            "nodes": m.nodes,
            "lints": m.lints,
            "active_defeaters": active,
            "soundness": soundness,
            "soundness_reasons": reasons,
        }),
    ))
}

fn confidence_error(e: ConfidenceError) -> ApiError {
    let code = match &e {
        ConfidenceError::StructuralFindings(_) | ConfidenceError::PreconditionViolated(_) => {
            "precondition-violated"
        }
        ConfidenceError::MissingInput { .. } => "missing-input",
        _ => "invalid-input",
    };
    let err = ApiError::unprocessable(code, e.to_string());
    match e {
        ConfidenceError::PreconditionViolated(r) => err.with_details(&r),
        ConfidenceError::StructuralFindings(f) => err.with_details(&f),
        _ => err,
    }
}

fn confidence(s: &Snapshot, q: &str) -> Result<(u16, Value)> {
    let q = query(q);
    let method: Method = match q.get("method") {
        None => Method::Product,
        Some(m) => m.parse().map_err(|_| {
            ApiError::new(
                400,
                "bad-query",
                format!("unknown method `{m}`; use product or doubts"),
            )
        })?,
    };
    let exploratory = flag(&q, "exploratory")?.unwrap_or(s.inputs.exploratory);
    let g = case(s)?;
    let pre = if exploratory {
        Precondition::Exploratory
    } else {
        Precondition::Sound(&s.inputs.leaf)
    };
    let map =
        propagate_confidence(g, &s.inputs.confidence, method, pre).map_err(confidence_error)?;
    Ok((
        200,
        json!({
            "revision": s.revision,
            "method": map.method,
            "nodes": map.nodes,
            "lints": map.lints,
            "caveat": a2_core::report::CONFIDENCE_CAVEAT,
        }),
    ))
}

fn measures(s: &Snapshot, id: &str, q: &str) -> Result<(u16, Value)> {
    let q = query(q);
    let base = match q.get("base") {
        None => a2_core::measures::DEFAULT_BASE,
        Some(b) => b.parse::<f64>().map_err(|_| {
            ApiError::new(
                400,
                "bad-query",
                format!("`base` must be a number, got `{b}`"),
            )
        })?,
    };
    if !(base.is_finite() && base > 1.0) {
        return Err(ApiError::unprocessable(
            "domain-error",
            format!("log base must exceed 1, got {base}"),
        ));
    }
    let g = case(s)?;
    let node = g
        .node(id)
        .ok_or_else(|| ApiError::not_found("unknown-node", format!("no node `{id}`")))?;
    let e = node.as_evidence().ok_or_else(|| {
        ApiError::unprocessable("not-evidence", format!("`{id}` is not an evidence node"))
    })?;
    let (measures, errors, findings) = match evidence_measures(e, base, 1e-6) {
        Some(m) => (json!(m.measures), json!(m.errors), json!(m.findings)),
        None => (json!([]), json!([]), json!([])),
    };
    Ok((
        200,
        json!({
            "revision": s.revision,
            "node": id,
            "base": base,
            "elicitation": e.elicitation,
            "measures": measures,
            "errors": errors,
            "findings": findings,
        }),
    ))
}

fn risks(s: &Snapshot) -> Result<(u16, Value)> {
    let g = case(s)?;
    let ledger = ledger_for(g, &s.inputs.thresholds);
    let verdict = final_gate_for(&ledger);
    Ok((
        200,
        json!({ "revision": s.revision, "ledger": ledger, "verdict": verdict }),
    ))
}

fn report_config(s: &Snapshot) -> ReportConfig {
    ReportConfig {
        leaf: s.inputs.leaf.clone(),
        confidence: s.inputs.confidence.clone(),
        exploratory: s.inputs.exploratory,
        thresholds: s.inputs.thresholds,
        ..ReportConfig::default()
    }
}

fn report(s: &Snapshot, q: &str) -> Result<(u16, Value)> {
    let q = query(q);
    let g = case(s)?;
    let mut cfg = report_config(s);
    if let Some(x) = flag(&q, "exploratory")? {
        cfg.exploratory = x;
    }
    let r = build_report(g, &cfg);
    Ok((200, json!({ "revision": s.revision, "report": r })))
}

fn dot(s: &Snapshot) -> Result<String> {
    let g = case(s)?;
    let m = assess_validity(g, &s.inputs.leaf).unwrap_or(AssessmentMap {
        nodes: BTreeMap::new(),
        lints: Vec::new(),
    });
    let pre = if s.inputs.exploratory {
        Precondition::Exploratory
    } else {
        Precondition::Sound(&s.inputs.leaf)
    };
    let c = propagate_confidence(g, &s.inputs.confidence, Method::Product, pre).ok();
    Ok(render_dot(g, &m, c.as_ref()))
}

// ---- node edits ----

fn level_or_number(field: &str, v: &Value) -> Result<Option<Judgment>> {
    match v {
        Value::Null => Ok(None),
        Value::Number(n) => {
            let p = n.as_f64().unwrap_or(f64::NAN);
            if (0.0..=1.0).contains(&p) {
                Ok(Some(Judgment::Numeric(p)))
            } else {
                Err(ApiError::unprocessable("domain-error", format!("{field} must lie in [0,1], got {p}")))
            }
        }
        Value::String(s) => QualitativeLevel::from_keyword(s).map(|l| Some(Judgment::Qualitative(l))).ok_or_else(|| {
            ApiError::unprocessable(
                "domain-error",
                format!("unknown level `{s}`; expected certain, very_confident, confident, neutral, surprised or very_surprised"),
            )
        }),
        _ => Err(ApiError::bad_request(format!("{field} must be a number, a level name or null"))),
    }
}

fn patch_elicitation(svc: &Service, req: &Request<'_>, id: &str) -> Result<(u16, Value)> {
    let body: serde_json::Map<String, Value> = json_body(req)?;
    let mut updates = Vec::new();
    for (k, v) in &body {
        let field = ElicitField::from_keyword(k).ok_or_else(|| {
            ApiError::bad_request(format!(
                "unknown field `{k}`; expected prior, posterior, likelihood, likelihood_not or marginal"
            ))
        })?;
        updates.push((field, level_or_number(k, v)?));
    }
    let nid = node_id(id)?;
    let revision = mutate(svc, req, |s| {
        let g = case(s)?;
        match g.node(id) {
            None => {
                return Err(ApiError::not_found(
                    "unknown-node",
                    format!("no node `{id}`"),
                ))
            }
            Some(Node::Evidence(_)) => {}
            Some(_) => {
                return Err(ApiError::unprocessable(
                    "not-evidence",
                    format!("`{id}` is not an evidence node"),
                ))
            }
        }
        let g = rebuild(g, |decls| {
            for n in decls.iter_mut() {
                if let Node::Evidence(e) = n {
                    if e.id == nid {
                        let el = e.elicitation.get_or_insert_with(Elicitation::default);
                        for (f, v) in &updates {
                            el.set(*f, *v);
                        }
                        if el.is_empty() {
                            e.elicitation = None;
                        }
                    }
                }
            }
        })?;
        Ok(Change::Case(g))
    })?;
    Ok((200, json!({ "revision": revision })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideBody {
    value: Option<f64>,
}

fn patch_override(svc: &Service, req: &Request<'_>, id: &str) -> Result<(u16, Value)> {
    let body: OverrideBody = json_body(req)?;
    let nid = node_id(id)?;
    let revision = mutate(svc, req, |s| {
        let g = case(s)?;
        if !g.contains(id) {
            return Err(ApiError::not_found(
                "unknown-node",
                format!("no node `{id}`"),
            ));
        }
        let mut inputs = s.inputs.clone();
        match body.value {
            Some(v) => inputs.confidence.overrides.insert(nid, v),
            None => inputs.confidence.overrides.remove(&nid),
        };
        validate_input(g, &inputs.confidence).map_err(confidence_error)?;
        Ok(Change::Inputs(inputs))
    })?;
    Ok((200, json!({ "revision": revision })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DefeaterPatch {
    status: Option<DefeaterStatus>,
    exactness: Option<Exactness>,
    target: Option<String>,
    claim: Option<String>,
    narrative: Option<Option<String>>,
}

fn defeater_of<'g>(g: &'g CaseGraph, id: &str) -> Result<&'g DefeaterNode> {
    match g.node(id) {
        None => Err(ApiError::not_found(
            "unknown-node",
            format!("no defeater `{id}`"),
        )),
        Some(n) => n.as_defeater().ok_or_else(|| {
            ApiError::unprocessable("not-defeater", format!("`{id}` is not a defeater"))
        }),
    }
}

fn target_id(t: &str) -> Result<NodeId> {
    NodeId::new(t).map_err(|e| {
        ApiError::unprocessable("invalid-case", format!("invalid target id `{}`", e.0))
    })
}

fn patch_defeater(svc: &Service, req: &Request<'_>, id: &str) -> Result<(u16, Value)> {
    let body: DefeaterPatch = json_body(req)?;
    let target = body.target.as_deref().map(target_id).transpose()?;
    let revision = mutate(svc, req, |s| {
        let g = case(s)?;
        let mut d = defeater_of(g, id)?.clone();
        if let Some(v) = body.status {
            d.status = v;
        }
        if let Some(v) = body.exactness {
            d.exactness = v;
        }
        if let Some(v) = target {
            d.target = v;
        }
        if let Some(v) = body.claim {
            d.claim = v;
        }
        if let Some(v) = body.narrative {
            d.narrative = v;
        }
        let g = rebuild(g, |decls| {
            for n in decls.iter_mut() {
                if n.id() == &d.id {
                    *n = Node::Defeater(d.clone());
                }
            }
        })?;
        Ok(Change::Case(g))
    })?;
    Ok((200, json!({ "revision": revision })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewDefeater {
    id: Option<String>,
    target: String,
    #[serde(default)]
    exactness: Exactness,
    #[serde(default)]
    claim: String,
    #[serde(default)]
    status: DefeaterStatus,
    narrative: Option<String>,
}

fn post_defeater(svc: &Service, req: &Request<'_>) -> Result<(u16, Value)> {
    let body: NewDefeater = json_body(req)?;
    let given = body
        .id
        .as_deref()
        .map(|i| {
            NodeId::new(i)
                .map_err(|_| ApiError::unprocessable("invalid-case", format!("invalid id `{i}`")))
        })
        .transpose()?;
    let target = target_id(&body.target)?;
    let mut new_id = None;
    let revision = mutate(svc, req, |s| {
        let g = case(s)?;
        let id = match given {
            Some(i) => i,
            None => (1..)
                .map(|n| format!("D{n}"))
                .find(|i| !g.contains(i))
                .and_then(|i| NodeId::new(i).ok())
                .ok_or_else(|| ApiError::new(500, "internal", "no free defeater id"))?,
        };
        let d = DefeaterNode {
            id: id.clone(),
            claim: body.claim,
            target,
            exactness: body.exactness,
            status: body.status,
            narrative: body.narrative,
        };
        let g = rebuild(g, |decls| decls.push(Node::Defeater(d)))?;
        new_id = Some(id);
        Ok(Change::Case(g))
    })?;
    Ok((201, json!({ "revision": revision, "id": new_id })))
}

fn delete_defeater(svc: &Service, req: &Request<'_>, id: &str) -> Result<(u16, Value)> {
    let revision = mutate(svc, req, |s| {
        let g = case(s)?;
        let d = defeater_of(g, id)?;
        let holders: Vec<String> = g
            .supporters(id)
            .iter()
            .chain(g.defeaters_on(id))
            .map(ToString::to_string)
            .collect();
        if !holders.is_empty() {
            return Err(ApiError::unprocessable(
                "in-use",
                format!(
                    "`{id}` is referenced by {}; remove those first",
                    holders.join(", ")
                ),
            ));
        }
        let gone = d.id.clone();
        let g = rebuild(g, |decls| decls.retain(|n| n.id() != &gone))?;
        let mut inputs = s.inputs.clone();
        inputs.leaf.overrides.remove(&gone);
        Ok(Change::Both(g, inputs))
    })?;
    Ok((200, json!({ "revision": revision })))
}
