use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use spi_discovery::monotone::{fixtures, BitVector, Dnf, TruthTable};
use spi_discovery_service::{router, SessionStore, DEFAULT_TTL};
use tower::ServiceExt;

fn app() -> Router {
    router(Arc::new(SessionStore::new(None, DEFAULT_TTL)), None)
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, Method::POST, uri, Some(&body.to_string())).await
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, Method::GET, uri, None).await
}

async fn create_flat_reference(app: &Router) -> String {
    let (status, body) = post(app, "/sessions", json!({"kind": "flat", "n": 5, "chain_order": "reference"})).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["id"].as_str().unwrap().to_string()
}

/// Answers pending questions from the table until the session completes or
/// `limit` answers were given. Returns the last response.
async fn replay(app: &Router, id: &str, oracle: impl Fn(&str) -> bool, limit: usize) -> (usize, Value) {
    let (_, mut state) = get(app, &format!("/sessions/{id}")).await;
    let mut pending = state["question"]["vector"].as_str().map(str::to_owned);
    let mut count = 0;
    while let Some(q) = pending.take() {
        if count == limit {
            break;
        }
        let (status, body) = post(
            app,
            &format!("/sessions/{id}/answer"),
            json!({"vector": q, "value": u8::from(oracle(&q))}),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        count += 1;
        pending = body["next_question"]["vector"].as_str().map(str::to_owned);
        state = body;
    }
    (count, state)
}

fn table_oracle(t: TruthTable) -> impl Fn(&str) -> bool {
    move |q| t.get(&q.parse::<BitVector>().unwrap()).unwrap()
}

#[tokio::test]
async fn flat_session_starts_at_the_first_reference_case() {
    let app = app();
    let (status, body) = post(&app, "/sessions", json!({"kind": "flat", "n": 5, "chain_order": "reference"})).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["question"]["vector"], "01100");
    assert_eq!(body["id"].as_str().unwrap().len(), 32);
    assert!(body["question"]["text"].as_str().unwrap().contains("x2 = 1"));
}

#[tokio::test]
async fn answer_reports_propagation() {
    let app = app();
    let id = create_flat_reference(&app).await;
    let (status, body) = post(&app, &format!("/sessions/{id}/answer"), json!({"vector": "01100", "value": 1})).await;
    assert_eq!(status, StatusCode::OK);
    let spread: Vec<&str> = body["propagated"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[0].as_str().unwrap())
        .collect();
    for v in ["11100", "01110", "01101"] {
        assert!(spread.contains(&v), "{v} missing from {spread:?}");
    }
    assert_eq!(body["next_question"]["vector"], "01010");
    assert_eq!(body["completed"], false);
}

#[tokio::test]
async fn f_fixture_completes_after_13_answers() {
    let app = app();
    let id = create_flat_reference(&app).await;
    let (count, last) = replay(&app, &id, table_oracle(fixtures::f_table()), usize::MAX).await;
    assert_eq!(count, 13);
    assert_eq!(last["completed"], true);
    assert!(last["next_question"].is_null());
    let (status, model) = get(&app, &format!("/sessions/{id}/model")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(model["partial"], false);
    assert_eq!(model["models"][0]["dnf"], "x1x2 ∨ x3 ∨ x1x5 ∨ x2x5 ∨ x4x5");
    assert_eq!(model["question_counts"]["f"], 13);
    assert_eq!(last["model"], model);

    // the returned model reproduces the oracle everywhere
    let dnf = Dnf::parse(model["models"][0]["dnf"].as_str().unwrap(), 5).unwrap();
    let f = fixtures::f_table();
    for (v, x) in f.iter() {
        assert_eq!(dnf.eval(&v).unwrap(), x, "{v}");
    }
}

#[tokio::test]
async fn h_fixture_needs_12() {
    let app = app();
    let id = create_flat_reference(&app).await;
    let (count, _) = replay(&app, &id, table_oracle(fixtures::h_table()), usize::MAX).await;
    assert_eq!(count, 12);
    let (_, model) = get(&app, &format!("/sessions/{id}/model")).await;
    assert_eq!(model["models"][0]["dnf"], "x1 ∨ x2 ∨ x3x4x5");
}

#[tokio::test]
async fn fresh_model_is_partial_and_empty() {
    let app = app();
    let id = create_flat_reference(&app).await;
    let (status, model) = get(&app, &format!("/sessions/{id}/model")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(model["partial"], true);
    assert_eq!(model["models"][0]["dnf"], "⊥");
    assert_eq!(model["models"][0]["terms"], json!([]));
}

#[tokio::test]
async fn sequencing_and_lookup_errors() {
    let app = app();
    let id = create_flat_reference(&app).await;
    let (status, body) = post(&app, &format!("/sessions/{id}/answer"), json!({"vector": "11111", "value": 1})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], "out_of_order");
    assert_eq!(body["expected"], "01100");

    let (status, _) = post(&app, "/sessions/nope/answer", json!({"vector": "01100", "value": 1})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/sessions/nope").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/sessions/nope/model").await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, Method::POST, "/sessions/nope/undo", None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn malformed_bodies_are_400() {
    let app = app();
    for body in [
        json!({"n": 5}),
        json!({"kind": "cube", "n": 5}),
        json!({"kind": "flat"}),
        json!({"kind": "flat", "n": 0}),
        json!({"kind": "flat", "n": 3, "chain_order": "reference"}),
        json!({"kind": "flat", "n": 2, "names": ["a"]}),
    ] {
        let (status, resp) = post(&app, "/sessions", body.clone()).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body} -> {resp}");
        assert_eq!(resp["error"], "bad_request");
    }
    assert_eq!(call(&app, Method::POST, "/sessions", Some("{not json")).await.0, StatusCode::BAD_REQUEST);

    let id = create_flat_reference(&app).await;
    for body in [json!({"vector": "01100"}), json!({"vector": "01100", "value": 2}), json!({"vector": "0110", "value": 1})] {
        let (status, _) = post(&app, &format!("/sessions/{id}/answer"), body.clone()).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
    }
}

#[tokio::test]
async fn contradicting_an_inference_is_422() {
    let app = app();
    let id = create_flat_reference(&app).await;
    post(&app, &format!("/sessions/{id}/answer"), json!({"vector": "01100", "value": true})).await;
    let (status, body) = post(&app, &format!("/sessions/{id}/answer"), json!({"vector": "11100", "value": 0})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "inconsistent");
    assert_eq!(body["conflicting"], json!({"vector": "01100", "value": 1}));
    // the session is unchanged
    let (_, state) = get(&app, &format!("/sessions/{id}")).await;
    assert_eq!(state["subinterviews"][0]["question_count"], 1);
}

#[tokio::test]
async fn undo_restores_the_previous_state() {
    let app = app();
    let id = create_flat_reference(&app).await;
    let (status, body) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], "nothing_to_undo");

    let (_, before) = get(&app, &format!("/sessions/{id}")).await;
    post(&app, &format!("/sessions/{id}/answer"), json!({"vector": "01100", "value": 1})).await;
    let (status, undone) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone["question"]["vector"], "01100");
    let reverted: Vec<&str> = undone["reverted"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(reverted.contains(&"01100") && reverted.contains(&"11100"));
    let (_, after) = get(&app, &format!("/sessions/{id}")).await;
    assert_eq!(after["subinterviews"], before["subinterviews"]);
    assert_eq!(after["question"], before["question"]);

    // two answers, one undo
    let (n, _) = replay(&app, &id, table_oracle(fixtures::f_table()), 2).await;
    assert_eq!(n, 2);
    call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    let (_, state) = get(&app, &format!("/sessions/{id}")).await;
    assert_eq!(state["subinterviews"][0]["asked"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn board_matches_answers() {
    let app = app();
    let id = create_flat_reference(&app).await;
    replay(&app, &id, table_oracle(fixtures::f_table()), usize::MAX).await;
    let (_, state) = get(&app, &format!("/sessions/{id}")).await;
    let board = state["subinterviews"][0]["board"].as_array().unwrap();
    assert_eq!(board.len(), 10);
    let cells: Vec<&Value> = board.iter().flat_map(|row| row.as_array().unwrap()).collect();
    assert_eq!(cells.len(), 32);
    let asked = cells.iter().filter(|c| c["provenance"] == "asked").count();
    let propagated = cells.iter().filter(|c| c["provenance"] == "propagated").count();
    assert_eq!((asked, propagated), (13, 19));
    let f = fixtures::f_table();
    for c in cells {
        let v: BitVector = c["vector"].as_str().unwrap().parse().unwrap();
        assert_eq!(c["value"], u8::from(f.get(&v).unwrap()));
    }
}

#[tokio::test]
async fn hierarchical_session_runs_g_h_f() {
    let app = app();
    let (status, body) = post(&app, "/sessions", json!({"kind": "hierarchical", "chain_order": "reference"})).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["stage"], "g");
    assert_eq!(body["question"]["vector"].as_str().unwrap().len(), 3);
    let id = body["id"].as_str().unwrap().to_string();

    let (g, h, f) = (fixtures::g_table(), fixtures::h_table(), fixtures::f_table());
    let mut stages = Vec::new();
    let mut pending = body["question"].clone();
    let mut last = Value::Null;
    while !pending.is_null() {
        let stage = pending["stage"].as_str().unwrap().to_string();
        let v: BitVector = pending["vector"].as_str().unwrap().parse().unwrap();
        let value = match stage.as_str() {
            "g" => g.get(&v),
            "h" => h.get(&v),
            _ => f.get(&v),
        }
        .unwrap();
        if stages.last() != Some(&stage) {
            stages.push(stage);
        }
        let (status, resp) = post(&app, &format!("/sessions/{id}/answer"), json!({"vector": v.to_string(), "value": value})).await;
        assert_eq!(status, StatusCode::OK, "{resp}");
        pending = resp["next_question"].clone();
        last = resp;
    }
    assert_eq!(stages, ["g", "h", "f"]);
    assert_eq!(last["completed"], true);
    let model = &last["model"];
    let dnfs: Vec<&str> = model["models"].as_array().unwrap().iter().map(|m| m["dnf"].as_str().unwrap()).collect();
    assert_eq!(dnfs, ["w2 ∨ w1w3", "y1 ∨ y2 ∨ y3y4y5", "x1x2 ∨ x3 ∨ x1x5 ∨ x2x5 ∨ x4x5"]);
    assert_eq!(model["question_counts"]["h"], 12);
    assert_eq!(model["question_counts"]["f"], 13);

    // the composed summary against brute-force evaluation of the expert model
    let composed = &model["composed"];
    assert_eq!(composed["unassisted_questions"], 2048);
    let expert = fixtures::expert_model();
    let positives = (0..1u32 << 11)
        .filter(|&b| expert.eval_flat(&BitVector::new(11, b).unwrap()).unwrap())
        .count();
    assert_eq!(composed["positives"], positives as u64);
    let terms: Vec<Vec<usize>> = serde_json::from_value(composed["terms"].clone()).unwrap();
    let dnf = Dnf::from_terms(11, terms).unwrap();
    for b in 0..1u32 << 11 {
        let v = BitVector::new(11, b).unwrap();
        assert_eq!(dnf.eval(&v).unwrap(), expert.eval_flat(&v).unwrap(), "{v}");
    }
}

#[tokio::test]
async fn exhaustive_g_asks_all_eight() {
    let app = app();
    let (_, body) = post(&app, "/sessions", json!({"kind": "hierarchical", "g_mode": "exhaustive"})).await;
    let id = body["id"].as_str().unwrap().to_string();
    let g = fixtures::g_table();
    let mut asked = 0;
    let mut pending = body["question"].clone();
    while pending["stage"] == "g" {
        let v: BitVector = pending["vector"].as_str().unwrap().parse().unwrap();
        let (_, resp) = post(&app, &format!("/sessions/{id}/answer"), json!({"vector": v.to_string(), "value": g.get(&v).unwrap()})).await;
        assert!(resp["propagated"].as_array().unwrap().is_empty());
        asked += 1;
        pending = resp["next_question"].clone();
    }
    assert_eq!(asked, 8);
    assert_eq!(pending["stage"], "h");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn racing_answers_one_wins() {
    let app = app();
    for round in 0..20 {
        let id = create_flat_reference(&app).await;
        let uri = format!("/sessions/{id}/answer");
        let (a, b) = tokio::join!(
            post(&app, &uri, json!({"vector": "01100", "value": 1})),
            post(&app, &uri, json!({"vector": "01100", "value": round % 2})),
        );
        let mut statuses = [a.0, b.0];
        statuses.sort();
        assert_eq!(statuses, [StatusCode::OK, StatusCode::CONFLICT], "round {round}");
        let (_, state) = get(&app, &format!("/sessions/{id}")).await;
        assert_eq!(state["subinterviews"][0]["question_count"], 1);
    }
}

#[tokio::test]
async fn snapshots_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(SessionStore::open(dir.path().to_path_buf(), DEFAULT_TTL).unwrap());
    let app = router(store, None);
    let id = create_flat_reference(&app).await;
    replay(&app, &id, table_oracle(fixtures::f_table()), 5).await;
    let (_, state) = get(&app, &format!("/sessions/{id}")).await;
    let (_, model) = get(&app, &format!("/sessions/{id}/model")).await;
    assert!(dir.path().join(format!("{id}.json")).exists());

    let reopened = Arc::new(SessionStore::open(dir.path().to_path_buf(), DEFAULT_TTL).unwrap());
    let app2 = router(reopened, None);
    let (status, state2) = get(&app2, &format!("/sessions/{id}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state2, state);
    assert_eq!(get(&app2, &format!("/sessions/{id}/model")).await.1, model);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(SessionStore::open(dir.path().to_path_buf(), DEFAULT_TTL).unwrap());
    let app = router(Arc::clone(&store), None);
    let id = create_flat_reference(&app).await;
    let now = spi_discovery_service::now_secs();
    assert_eq!(store.evict_expired(now), 0);
    assert_eq!(store.evict_expired(now + DEFAULT_TTL.as_secs() + 5), 1);
    assert_eq!(get(&app, &format!("/sessions/{id}")).await.0, StatusCode::NOT_FOUND);
    assert!(!dir.path().join(format!("{id}.json")).exists());
}

#[tokio::test]
async fn serves_the_ui_bundle() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>interview</h1>").unwrap();
    let app = router(Arc::new(SessionStore::new(None, DEFAULT_TTL)), Some(dir.path().to_path_buf()));
    let (status, body) = get(&app, "/").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, "<h1>interview</h1>");
    // API routes still win
    assert_eq!(get(&app, "/sessions/x").await.0, StatusCode::NOT_FOUND);
}
