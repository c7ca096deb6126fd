use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use disco::oeis::OfflineFetcher;
use disco::repl::ReplState;
use disco::server::{router, ServerConfig, MAX_INPUT_BYTES, MAX_LOAD_BYTES};

const GCD: &str = include_str!("programs/gcd.disco");

fn config() -> ServerConfig {
    let mut c = ServerConfig::new(Arc::new(OfflineFetcher));
    c.static_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/static").into();
    c
}

async fn send(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req
            .header("content-type", "application/json")
            .body(Body::from(v.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, bytes.to_vec())
}

async fn new_session(app: &Router) -> String {
    let (s, body) = send(app, "POST", "/api/session", None).await;
    assert_eq!(s, StatusCode::OK);
    let v: Value = serde_json::from_slice(&body).unwrap();
    v["sessionId"].as_str().unwrap().to_string()
}

async fn input(app: &Router, id: &str, line: &str) -> (StatusCode, Value) {
    let (s, body) = send(
        app,
        "POST",
        &format!("/api/session/{id}/input"),
        Some(json!({ "line": line })),
    )
    .await;
    (s, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

#[tokio::test]
async fn health_is_ok() {
    let app = router(config());
    let (s, body) = send(&app, "GET", "/api/health", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body, b"ok");
}

#[tokio::test]
async fn static_files_served_at_root() {
    let app = router(config());
    let (s, body) = send(&app, "GET", "/index.html", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("Disco"));
}

#[tokio::test]
async fn input_returns_blocks() {
    let app = router(config());
    let id = new_session(&app).await;
    let (s, v) = input(&app, &id, ":type -2/3").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["blocks"][0]["kind"], "type");
    assert_eq!(v["blocks"][0]["text"], "-2 / 3 : ℚ");

    let (_, v) = input(&app, &id, "x + 3").await;
    assert_eq!(v["blocks"][0]["kind"], "error");
    assert_eq!(
        v["blocks"][0]["docURL"],
        "https://disco-lang.readthedocs.io/en/latest/reference/unbound.html"
    );
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = router(config());
    let (s, _) = input(&app, "deadbeef", "1").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = send(
        &app,
        "POST",
        "/api/session/deadbeef/load",
        Some(json!({ "files": [] })),
    )
    .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn oversized_requests_are_413() {
    let app = router(config());
    let id = new_session(&app).await;
    let (s, _) = input(&app, &id, &"1".repeat(MAX_INPUT_BYTES + 1)).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
    let (s, _) = input(&app, &id, &format!("1{}", " ".repeat(MAX_INPUT_BYTES - 1))).await;
    assert_eq!(s, StatusCode::OK);

    let big = "-- x\n".repeat(MAX_LOAD_BYTES / 5 + 1);
    let (s, _) = send(
        &app,
        "POST",
        &format!("/api/session/{id}/load"),
        Some(json!({ "files": [{ "name": "big.disco", "contents": big }] })),
    )
    .await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn session_cap_is_503() {
    let mut c = config();
    c.max_sessions = 3;
    let app = router(c);
    for _ in 0..3 {
        new_session(&app).await;
    }
    let (s, _) = send(&app, "POST", "/api/session", None).await;
    assert_eq!(s, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let mut c = config();
    c.max_sessions = 1;
    c.idle_timeout = std::time::Duration::from_millis(50);
    let app = router(c);
    let id = new_session(&app).await;
    tokio::time::sleep(std::time::Duration::from_millis(120)).await;
    let (s, _) = input(&app, &id, "1").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    // The expired slot is free again.
    new_session(&app).await;
}

#[tokio::test]
async fn sessions_are_isolated() {
    let app = router(config());
    let a = new_session(&app).await;
    let b = new_session(&app).await;
    assert_ne!(a, b);
    let (s, _) = send(
        &app,
        "POST",
        &format!("/api/session/{a}/load"),
        Some(json!({ "files": [{ "name": "gcd.disco", "contents": GCD }] })),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    let (_, v) = input(&app, &a, "gcd(12, 18)").await;
    assert_eq!(v["blocks"][0]["text"], "6");
    let (_, v) = input(&app, &b, "gcd(12, 18)").await;
    assert_eq!(v["blocks"][0]["kind"], "error");
}

#[tokio::test]
async fn runaway_evaluation_times_out() {
    let mut c = config();
    c.request_timeout = std::time::Duration::from_millis(300);
    let app = router(c);
    let id = new_session(&app).await;
    let src = "loop : N -> N\nloop(n) = loop(n + 1)\n";
    send(
        &app,
        "POST",
        &format!("/api/session/{id}/load"),
        Some(json!({ "files": [{ "name": "loop.disco", "contents": src }] })),
    )
    .await;
    let start = std::time::Instant::now();
    let (s, v) = input(&app, &id, "loop(0)").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["blocks"][0]["kind"], "error");
    assert!(start.elapsed() < std::time::Duration::from_secs(3));
    // The session is still usable afterwards.
    let (_, v) = input(&app, &id, "1 + 1").await;
    assert_eq!(v["blocks"][0]["text"], "2");
}

#[tokio::test]
async fn transcript_matches_local_repl() {
    let lines = [
        ":type -3",
        ":type |-3|",
        ":type \\x. x - 2",
        "(\\x. x - 2) (5/2)",
        ":doc gcd",
        ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ (2g) divides b",
        ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ g divides b",
        "each(3, [1,2,3])",
        ":names",
    ];
    let mut local = ReplState::new(Arc::new(OfflineFetcher));
    let local_load = local.load_sources(&[("gcd.disco".into(), GCD.into())]);

    let app = router(config());
    let id = new_session(&app).await;
    let (_, body) = send(
        &app,
        "POST",
        &format!("/api/session/{id}/load"),
        Some(json!({ "files": [{ "name": "gcd.disco", "contents": GCD }] })),
    )
    .await;
    let remote: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(
        remote["blocks"],
        serde_json::to_value(&local_load.blocks).unwrap()
    );

    for line in lines {
        let want = serde_json::to_value(local.exec(line)).unwrap();
        let (_, got) = input(&app, &id, line).await;
        assert_eq!(got["blocks"], want, "{line}");
    }
}
