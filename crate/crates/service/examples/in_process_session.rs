//! Drives a flat interview session through the HTTP router without binding
//! a socket, answering from the bundled f table.

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use spi_discovery::monotone::{fixtures, BitVector};
use spi_discovery_service::{router, SessionStore, DEFAULT_TTL};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    serde_json::from_slice(&bytes).unwrap()
}

#[tokio::main(flavor = "current_thread")]
async fn main() {
    let app = router(Arc::new(SessionStore::new(None, DEFAULT_TTL)), None);
    let oracle = fixtures::f_table();

    let created = call(&app, Method::POST, "/sessions", Some(json!({"kind": "flat", "n": 5, "chain_order": "reference"}))).await;
    let id = created["id"].as_str().unwrap().to_string();
    println!("session {id}");

    let state = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    let mut pending = state["question"]["vector"].as_str().map(str::to_owned);
    while let Some(q) = pending.take() {
        let value = oracle.get(&q.parse::<BitVector>().unwrap()).unwrap();
        let body = json!({"vector": q, "value": u8::from(value)});
        let resp = call(&app, Method::POST, &format!("/sessions/{id}/answer"), Some(body)).await;
        println!("{q} = {} (also settled {})", u8::from(value), resp["propagated"].as_array().map_or(0, Vec::len));
        pending = resp["next_question"]["vector"].as_str().map(str::to_owned);
    }

    let model = call(&app, Method::GET, &format!("/sessions/{id}/model"), None).await;
    for m in model["models"].as_array().unwrap() {
        println!("{} = {} after {} questions", m["label"].as_str().unwrap(), m["dnf"].as_str().unwrap(), m["questions"]);
    }
}
