mod common;

use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rlfc::png::{decode_rgb, StdCodecs};
use rlfc::service::{router, AppState};
use rlfc_core::container::{parse_header, parse_sections};
use rlfc_core::render::LightSlab;
use rlfc_core::{compress, DecoderState};
use tower::ServiceExt;

fn app_for(stream: Vec<u8>) -> Router {
    let dec = DecoderState::init(stream, &StdCodecs).unwrap();
    let (sc, tc) = dec.grid_dims();
    let (w, h) = dec.image_dims();
    router(Arc::new(AppState::new(dec, LightSlab::regular(sc, tc, w, h))))
}

fn synthetic_stream() -> Vec<u8> {
    compress(&synthetic(), &params(80, 4, 2, 3), &StdCodecs).unwrap().0
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    let res = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = res.status();
    (status, to_bytes(res.into_body(), usize::MAX).await.unwrap().to_vec())
}

#[tokio::test]
async fn info_transcribes_the_header() {
    let app = app_for(synthetic_stream());
    let (st, body) = get(&app, "/api/info").await;
    assert_eq!(st, StatusCode::OK);
    let v: serde_json::Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(v["grid"], serde_json::json!([8, 8]));
    assert_eq!(v["image"], serde_json::json!([64, 64]));
    assert_eq!(v["tree_height"], 3);
    assert_eq!(v["params"]["block_threshold"], 80);
    assert_eq!(v["aperture"], serde_json::json!([0.0, 0.0, 7.0, 7.0]));
}

#[tokio::test]
async fn image_matches_cli_decode() {
    let dir = tempfile::tempdir().unwrap();
    let stream = synthetic_stream();
    let path = dir.path().join("lf.rlfc");
    std::fs::write(&path, &stream).unwrap();
    let out = dir.path().join("dec");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_rlfc"))
        .args(["decode", path.to_str().unwrap(), "-o", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let app = app_for(stream);
    let (st, body) = get(&app, "/api/image?s=3&t=2").await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(body, std::fs::read(out.join("s03_t02.png")).unwrap());
}

#[tokio::test]
async fn view_at_integer_poses_equals_image() {
    let app = app_for(synthetic_stream());
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..5 {
        let (s, t) = (rng.random_range(0..8), rng.random_range(0..8));
        let (_, view) = get(&app, &format!("/api/view?s={s}&t={t}&w=64&h=64")).await;
        let (_, img) = get(&app, &format!("/api/image?s={s}&t={t}")).await;
        assert_eq!(decode_rgb(&view).unwrap(), decode_rgb(&img).unwrap(), "({s},{t})");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_views_match_serial() {
    let app = app_for(synthetic_stream());
    let uris: Vec<String> = (0..64)
        .map(|i| format!("/api/view?s={}&t={}&w=48&h=40&level={}", (i % 15) as f64 * 0.5, (i / 15) as f64 * 1.5, i % 4))
        .collect();
    let mut serial = Vec::new();
    for u in &uris {
        serial.push(get(&app, u).await);
    }
    let tasks: Vec<_> = uris
        .iter()
        .cloned()
        .map(|u| {
            let app = app.clone();
            tokio::spawn(async move { get(&app, &u).await })
        })
        .collect();
    for (i, t) in tasks.into_iter().enumerate() {
        let got = t.await.unwrap();
        assert_eq!(got.0, StatusCode::OK);
        assert_eq!(got, serial[i], "{}", uris[i]);
    }
}

#[tokio::test]
async fn bad_requests() {
    let app = app_for(synthetic_stream());
    for uri in [
        "/api/view?s=7.5",
        "/api/view?t=-1",
        "/api/view?level=4",
        "/api/view?w=0",
        "/api/view?w=2000&h=2000",
        "/api/view?s=abc",
        "/api/view?focus=0",
        "/api/image?s=8&t=0",
        "/api/image?s=1",
    ] {
        assert_eq!(get(&app, uri).await.0, StatusCode::BAD_REQUEST, "{uri}");
    }
    assert_eq!(get(&app, "/api/nope").await.0, StatusCode::NOT_FOUND);
    let (st, body) = get(&app, "/api/view?level=3&focus=2.5").await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(decode_rgb(&body).unwrap().width, 64);
}

#[tokio::test]
async fn static_page_and_cors() {
    let app = app_for(synthetic_stream());
    let (st, body) = get(&app, "/").await;
    assert_eq!(st, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("/api/view"));
    let req = Request::get("/api/info").header("origin", "http://localhost:5173").body(Body::empty()).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    assert_eq!(res.headers()["access-control-allow-origin"], "*");
}

#[tokio::test]
async fn assets_directory_is_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>custom</p>").unwrap();
    let dec = DecoderState::init(synthetic_stream(), &StdCodecs).unwrap();
    let mut state = AppState::new(dec, LightSlab::regular(8, 8, 64, 64));
    state.assets = Some(dir.path().to_path_buf());
    let app = router(Arc::new(state));
    assert_eq!(get(&app, "/").await.1, b"<p>custom</p>");
    assert_eq!(get(&app, "/missing.js").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/info").await.0, StatusCode::OK);
}

#[tokio::test]
async fn corrupt_record_is_a_server_error() {
    let mut stream = synthetic_stream();
    let h = parse_header(&stream).unwrap();
    let sec = &parse_sections(&stream, &h).unwrap()[0];
    let bitmap_len = h.layout().bitmap_len();
    let blk = (0..sec.offsets.len()).find(|&b| stream[sec.record_range(b).start] & 1 == 1).unwrap();
    let at = sec.record_range(blk).start + bitmap_len;
    stream[at] = 200;
    let app = app_for(stream);
    let (st, body) = get(&app, "/api/image?s=0&t=0").await;
    assert_eq!(st, StatusCode::INTERNAL_SERVER_ERROR);
    assert!(!body.is_empty());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn serves_over_tcp() {
    let dec = DecoderState::init(synthetic_stream(), &StdCodecs).unwrap();
    let app = router(Arc::new(AppState::new(dec, LightSlab::regular(8, 8, 64, 64))));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    let body = tokio::task::spawn_blocking(move || {
        use std::io::{Read, Write};
        let mut s = std::net::TcpStream::connect(addr).unwrap();
        s.write_all(b"GET /api/info HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n").unwrap();
        let mut out = String::new();
        s.read_to_string(&mut out).unwrap();
        out
    })
    .await
    .unwrap();
    assert!(body.starts_with("HTTP/1.1 200"));
    assert!(body.contains("\"grid\":[8,8]"));
}
