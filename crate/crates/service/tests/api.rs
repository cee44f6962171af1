use std::path::PathBuf;
use std::sync::Arc;

use a2_core::format::{parse_case, Format};
use a2_service::{Inputs, Request, Response, Service};
use serde_json::{json, Value};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn loaded(name: &str) -> Service {
    let svc = Service::new(Inputs::default());
    let r = svc.handle(&Request::new("PUT", "/api/case").text(&fixture(name)));
    assert_eq!(r.status, 200, "{}", r.body);
    svc
}

fn get(svc: &Service, path: &str) -> Response {
    svc.handle(&Request::new("GET", path))
}

fn send(svc: &Service, method: &str, path: &str, body: Value) -> Response {
    let text = body.to_string();
    svc.handle(&Request::new(method, path).json(&text))
}

fn concur_all(svc: &Service) {
    let inputs = json!({ "leaf": { "concur_all": true } });
    let r = send(svc, "PUT", "/api/inputs", inputs);
    assert_eq!(r.status, 200, "{}", r.body);
}

fn validity_of(svc: &Service, node: &str) -> Value {
    let r = get(svc, "/api/assessment/validity");
    assert_eq!(r.status, 200, "{}", r.body);
    r.json_body()["nodes"][node]["value"].clone()
}

fn code(r: &Response) -> String {
    r.json_body()["code"].as_str().unwrap_or("").to_string()
}

#[test]
fn put_case_starts_at_revision_one() {
    let svc = Service::new(Inputs::default());
    assert_eq!(code(&get(&svc, "/api/case")), "no-case");
    let r = svc.handle(&Request::new("PUT", "/api/case").text(&fixture("sound.a2")));
    assert_eq!(r.status, 200);
    assert_eq!(r.json_body()["revision"], 1);
    assert_eq!(r.revision, 1);
    let doc = get(&svc, "/api/case").json_body();
    assert_eq!(doc["revision"], 1);
    assert_eq!(doc["case"]["title"], "Controller timing");
}

#[test]
fn json_and_dsl_uploads_agree() {
    let a = loaded("sound.a2");
    let b = Service::new(Inputs::default());
    let r = b.handle(&Request::new("PUT", "/api/case").json(&fixture("sound.json")));
    assert_eq!(r.status, 200, "{}", r.body);
    let ga = a.snapshot().case.unwrap();
    let gb = b.snapshot().case.unwrap();
    assert!(ga.isomorphic(&gb, 0.0));
}

#[test]
fn refuting_a_bare_doubt_restores_the_claim() {
    let svc = loaded("bare_doubt.a2");
    concur_all(&svc);
    assert_eq!(validity_of(&svc, "TC"), "unsupported");
    let active = get(&svc, "/api/assessment/validity").json_body()["active_defeaters"].clone();
    assert_eq!(active.as_array().unwrap().len(), 1);

    let r = send(
        &svc,
        "PATCH",
        "/api/defeaters/D1",
        json!({ "status": "refuted" }),
    );
    assert_eq!(r.status, 200, "{}", r.body);
    assert_eq!(validity_of(&svc, "TC"), "true");
    let v = get(&svc, "/api/assessment/validity").json_body();
    assert_eq!(v["active_defeaters"], json!([]));
    assert_eq!(v["soundness"], "sound");
}

#[test]
fn elicitation_patch_feeds_measures() {
    let svc = loaded("bare_doubt.a2");
    let r = send(
        &svc,
        "PATCH",
        "/api/nodes/E1/elicitation",
        json!({ "prior": "neutral", "posterior": "confident" }),
    );
    assert_eq!(r.status, 200, "{}", r.body);
    let m = get(&svc, "/api/nodes/E1/measures").json_body();
    let keynes = m["measures"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["measure"] == "keynes")
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((keynes - 0.2553).abs() < 5e-5, "{keynes}");
    assert_eq!(m["base"], 10.0);

    let natural = get(&svc, "/api/nodes/E1/measures?base=2.718281828459045").json_body();
    let k = natural["measures"][0]["value"].as_f64().unwrap();
    assert!((k - 1.8f64.ln()).abs() < 1e-9, "{k}");
}

#[test]
fn elicitation_null_clears_a_field() {
    let svc = loaded("sound.a2");
    let r = send(
        &svc,
        "PATCH",
        "/api/nodes/E2/elicitation",
        json!({ "likelihood": null, "marginal": null }),
    );
    assert_eq!(r.status, 200, "{}", r.body);
    let el = &get(&svc, "/api/nodes/E2/measures").json_body()["elicitation"];
    assert!(el.get("likelihood").is_none_or(Value::is_null), "{el}");
    assert_eq!(el["prior"], 0.5);
}

#[test]
fn elicitation_rejects_bad_values() {
    let svc = loaded("sound.a2");
    for body in [json!({ "prior": 1.5 }), json!({ "prior": "sure" })] {
        let r = send(&svc, "PATCH", "/api/nodes/E1/elicitation", body);
        assert_eq!(r.status, 422, "{}", r.body);
    }
    let r = send(
        &svc,
        "PATCH",
        "/api/nodes/E1/elicitation",
        json!({ "colour": 0.5 }),
    );
    assert_eq!(r.status, 400);
    let r = send(
        &svc,
        "PATCH",
        "/api/nodes/TC/elicitation",
        json!({ "prior": 0.5 }),
    );
    assert_eq!((r.status, code(&r)), (422, "not-evidence".into()));
    let r = send(
        &svc,
        "PATCH",
        "/api/nodes/NOPE/elicitation",
        json!({ "prior": 0.5 }),
    );
    assert_eq!(r.status, 404);
    assert_eq!(svc.snapshot().revision, 1);
}

#[test]
fn measures_errors() {
    let svc = loaded("sound.a2");
    assert_eq!(get(&svc, "/api/nodes/E1/measures?base=1").status, 422);
    assert_eq!(get(&svc, "/api/nodes/E1/measures?base=x").status, 400);
    assert_eq!(get(&svc, "/api/nodes/ZZ/measures").status, 404);
    assert_eq!(code(&get(&svc, "/api/nodes/TC/measures")), "not-evidence");
}

#[test]
fn confidence_endpoint() {
    let svc = loaded("sound.a2");
    let r = get(&svc, "/api/assessment/confidence?method=product");
    assert_eq!(
        (r.status, code(&r)),
        (422, "precondition-violated".into()),
        "{}",
        r.body
    );
    concur_all(&svc);
    let p = get(&svc, "/api/assessment/confidence?method=product").json_body();
    assert!((p["nodes"]["TC"]["value"].as_f64().unwrap() - 0.72).abs() < 1e-12);
    assert!(p["caveat"].as_str().unwrap().contains("compare"));
    let d = get(&svc, "/api/assessment/confidence?method=doubts").json_body();
    assert!((d["nodes"]["TC"]["value"].as_f64().unwrap() - 0.7).abs() < 1e-12);
    assert_eq!(
        get(&svc, "/api/assessment/confidence?method=mean").status,
        400
    );

    let open = loaded("bare_doubt.a2");
    concur_all(&open);
    assert_eq!(get(&open, "/api/assessment/confidence").status, 422);
    assert_eq!(
        get(&open, "/api/assessment/confidence?exploratory=true").status,
        200
    );
}

#[test]
fn override_is_validated() {
    let svc = loaded("sound.a2");
    concur_all(&svc);
    let r = send(
        &svc,
        "PATCH",
        "/api/nodes/S/override",
        json!({ "value": 0.5 }),
    );
    assert_eq!(r.status, 200, "{}", r.body);
    let p = get(&svc, "/api/assessment/confidence").json_body();
    assert!((p["nodes"]["TC"]["value"].as_f64().unwrap() - 0.45).abs() < 1e-12);
    assert_eq!(
        send(
            &svc,
            "PATCH",
            "/api/nodes/S/override",
            json!({ "value": 2.0 })
        )
        .status,
        422
    );
    assert_eq!(
        send(
            &svc,
            "PATCH",
            "/api/nodes/E1/override",
            json!({ "value": 0.5 })
        )
        .status,
        422
    );
    assert_eq!(
        send(
            &svc,
            "PATCH",
            "/api/nodes/S/override",
            json!({ "value": null })
        )
        .status,
        200
    );
    let p = get(&svc, "/api/assessment/confidence").json_body();
    assert!((p["nodes"]["TC"]["value"].as_f64().unwrap() - 0.72).abs() < 1e-12);
}

#[test]
fn defeater_lifecycle() {
    let svc = loaded("sound.a2");
    concur_all(&svc);
    let r = send(
        &svc,
        "POST",
        "/api/defeaters",
        json!({ "target": "BS", "claim": "Inputs may be unrepresentative" }),
    );
    assert_eq!(r.status, 201, "{}", r.body);
    assert_eq!(r.json_body()["id"], "D1");
    assert_eq!(validity_of(&svc, "TC"), "unsupported");

    let r = send(
        &svc,
        "POST",
        "/api/defeaters",
        json!({ "target": "NOWHERE" }),
    );
    assert_eq!(r.status, 422, "{}", r.body);
    let r = send(
        &svc,
        "POST",
        "/api/defeaters",
        json!({ "target": "E1", "exactness": "exact" }),
    );
    assert_eq!(r.status, 422, "{}", r.body);

    let r = svc.handle(&Request::new("DELETE", "/api/defeaters/D1"));
    assert_eq!(r.status, 200, "{}", r.body);
    assert_eq!(validity_of(&svc, "TC"), "true");
    assert_eq!(
        svc.handle(&Request::new("DELETE", "/api/defeaters/D1"))
            .status,
        404
    );
}

#[test]
fn deleting_a_referenced_defeater_is_refused() {
    let svc = loaded("exoneration.a2");
    let r = svc.handle(&Request::new("DELETE", "/api/defeaters/D1"));
    assert_eq!((r.status, code(&r)), (422, "in-use".into()), "{}", r.body);
}

#[test]
fn risks_and_report_and_dot() {
    let svc = loaded("residuals_10.a2");
    let r = get(&svc, "/api/risks").json_body();
    assert_eq!(r["ledger"]["entries"].as_array().unwrap().len(), 10);
    assert_eq!(r["verdict"]["verdict"], "acceptable");

    let r = get(&svc, "/api/report").json_body();
    assert_eq!(r["report"]["title"], svc.snapshot().case.unwrap().title());

    let d = get(&svc, "/api/export/dot");
    assert_eq!(d.content_type, "text/vnd.graphviz");
    assert!(d.body.starts_with("digraph"));
}

#[test]
fn parse_errors_carry_a_span() {
    let svc = Service::new(Inputs::default());
    let r = svc.handle(
        &Request::new("PUT", "/api/case").text("case \"x\" {\n  claim TC \"t\" top\n  bogus;\n}\n"),
    );
    assert_eq!(
        (r.status, code(&r)),
        (400, "parse-error".into()),
        "{}",
        r.body
    );
    let span = &r.json_body()["span"];
    assert_eq!(span["line"], 3, "{span}");
    assert_eq!(svc.snapshot().revision, 0);
}

#[test]
fn error_statuses() {
    let svc = loaded("sound.a2");
    let mut req = Request::new("PUT", "/api/case");
    req.content_type = Some("application/xml");
    req.body = b"<case/>";
    assert_eq!(svc.handle(&req).status, 415);
    assert_eq!(get(&svc, "/api/nothing").status, 404);
    let r = svc.handle(&Request::new("DELETE", "/api/case"));
    assert_eq!((r.status, r.allow), (405, Some("GET, PUT")));
    assert_eq!(
        send(&svc, "PUT", "/api/inputs", json!({ "bogus": 1 })).status,
        400
    );
    assert_eq!(
        send(
            &svc,
            "PUT",
            "/api/inputs",
            json!({ "leaf": { "concurrence": { "ZZ": true } } })
        )
        .status,
        422
    );
    let r = svc.handle(
        &Request::new("PUT", "/api/inputs")
            .json("{}")
            .if_match("\"7\""),
    );
    assert_eq!((r.status, code(&r)), (409, "revision-conflict".into()));
    let r = svc.handle(
        &Request::new("PUT", "/api/inputs")
            .json("{}")
            .if_match("latest"),
    );
    assert_eq!(r.status, 400);
    let r = svc.handle(
        &Request::new("PUT", "/api/inputs")
            .json("{}")
            .if_match("\"1\""),
    );
    assert_eq!((r.status, r.revision), (200, 2));
}

#[test]
fn concurrent_writers_get_distinct_revisions() {
    let svc = Arc::new(loaded("sound.a2"));
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let svc = svc.clone();
            std::thread::spawn(move || {
                (0..25)
                    .map(|j| {
                        let v = 0.5 + 0.001 * f64::from(i * 25 + j);
                        let r = send(
                            &svc,
                            "PATCH",
                            "/api/nodes/E1/elicitation",
                            json!({ "posterior": v }),
                        );
                        assert_eq!(r.status, 200);
                        r.revision
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let mut all: Vec<u64> = handles
        .into_iter()
        .flat_map(|h| h.join().unwrap())
        .collect();
    all.sort_unstable();
    assert_eq!(all, (2..=201).collect::<Vec<_>>());
    assert_eq!(svc.snapshot().revision, 201);
}

#[test]
fn persisted_case_reproduces_after_restart() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("case.a2");
    let svc = Service::new(Inputs::default()).persist_to(&path);
    svc.handle(&Request::new("PUT", "/api/case").text(&fixture("bare_doubt.a2")));
    send(
        &svc,
        "PATCH",
        "/api/defeaters/D1",
        json!({ "status": "refuted" }),
    );
    send(
        &svc,
        "PATCH",
        "/api/nodes/E2/elicitation",
        json!({ "prior": 0.4 }),
    );

    let text = std::fs::read_to_string(&path).unwrap();
    let restored = parse_case(&text, Format::Dsl).unwrap().graph;
    let again = Service::with_case(restored, Inputs::default());
    assert!(svc
        .snapshot()
        .case
        .unwrap()
        .isomorphic(&again.snapshot().case.unwrap(), 0.0));
    concur_all(&svc);
    concur_all(&again);
    for path in [
        "/api/assessment/validity",
        "/api/nodes/E2/measures",
        "/api/risks",
        "/api/export/dot",
    ] {
        let (a, b) = (get(&svc, path), get(&again, path));
        let strip = |r: &Response| {
            let mut v = r.json_body();
            if let Some(o) = v.as_object_mut() {
                o.remove("revision");
            }
            if v.is_null() {
                r.body.clone()
            } else {
                v.to_string()
            }
        };
        assert_eq!(strip(&a), strip(&b), "{path}");
    }
}

#[test]
fn failed_persistence_leaves_state_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("case.json");
    let svc = Service::new(Inputs::default()).persist_to(&path);
    let r = svc.handle(&Request::new("PUT", "/api/case").text(&fixture("sound.a2")));
    assert_eq!(r.status, 500, "{}", r.body);
    assert_eq!(svc.snapshot().revision, 0);
    assert!(svc.snapshot().case.is_none());
}

#[tokio::test]
async fn router_serves_requests() {
    use http_body_util::BodyExt;
    use tower::ServiceExt;

    let svc = Arc::new(loaded("sound.a2"));
    let app = a2_service::router(svc);
    let req = axum::http::Request::builder()
        .method("PATCH")
        .uri("/api/nodes/E1/elicitation")
        .header("content-type", "application/json")
        .header("if-match", "\"1\"")
        .body(axum::body::Body::from(
            r#"{"prior":"neutral","posterior":"confident"}"#,
        ))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), 200);
    assert_eq!(resp.headers()["etag"], "\"2\"");

    let req = axum::http::Request::builder()
        .uri("/api/nodes/E1/measures?base=10")
        .body(axum::body::Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["content-type"], "application/json");
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert!((v["measures"][0]["value"].as_f64().unwrap() - 0.2553).abs() < 5e-5);
}
