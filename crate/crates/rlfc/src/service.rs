//! HTTP view service.
//!
//! `GET /api/info`, `GET /api/view?s=&t=&w=&h=&level=&focus=`,
//! `GET /api/image?s=&t=`, and static viewer assets under `/`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use rlfc_core::render::{CameraPose, LightSlab, RenderOptions};
use rlfc_core::DecoderState;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::parallel::render_view;
use crate::png::encode_rgb;

pub const DEFAULT_MAX_PIXELS: usize = 1024 * 1024;
const INDEX_HTML: &str = include_str!("../assets/index.html");

#[derive(Debug)]
pub struct AppState {
    pub decoder: DecoderState,
    pub slab: LightSlab,
    pub max_pixels: usize,
    /// Serve this directory at `/` instead of the built-in page.
    pub assets: Option<PathBuf>,
}

impl AppState {
    pub fn new(decoder: DecoderState, slab: LightSlab) -> Self {
        AppState { decoder, slab, max_pixels: DEFAULT_MAX_PIXELS, assets: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryInfo {
    pub camera_plane_z: f64,
    pub image_plane_z: f64,
    pub image_plane_extent: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsInfo {
    pub tree_height: u8,
    pub block_size: u8,
    pub pixel_threshold: u16,
    pub block_threshold: u32,
    pub quant_shift: u8,
    pub filter: &'static str,
    pub sigma: f64,
    pub root_codec: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Info {
    pub grid: [usize; 2],
    pub image: [usize; 2],
    pub tree_height: u8,
    pub params: ParamsInfo,
    /// Camera-plane extent `[x0, y0, x1, y1]` in world units.
    pub aperture: [f64; 4],
    pub geometry: GeometryInfo,
    pub max_pixels: usize,
}

pub fn info(app: &AppState) -> Info {
    let d = &app.decoder;
    let p = d.header().params;
    let (sc, tc) = d.grid_dims();
    let (w, h) = d.image_dims();
    let sl = &app.slab;
    let (xs, ys) = (&sl.xs, &sl.ys);
    let span = |a: &[f64]| {
        let (first, last) = (a[0], a[a.len() - 1]);
        (first.min(last), first.max(last))
    };
    let ((x0, x1), (y0, y1)) = (span(xs), span(ys));
    Info {
        grid: [sc, tc],
        image: [w, h],
        tree_height: p.tree_height,
        params: ParamsInfo {
            tree_height: p.tree_height,
            block_size: p.block_size,
            pixel_threshold: p.pixel_threshold,
            block_threshold: p.block_threshold,
            quant_shift: p.quant_shift,
            filter: match p.filter.kind {
                rlfc_core::FilterKind::Uniform => "uniform",
                rlfc_core::FilterKind::Gaussian => "gaussian",
            },
            sigma: p.filter.sigma(),
            root_codec: match p.root_codec {
                rlfc_core::CodecId::Raw => "raw",
                rlfc_core::CodecId::Png => "png",
                rlfc_core::CodecId::Jpeg2000 => "jpeg2000",
            },
        },
        aperture: [x0, y0, x1, y1],
        geometry: GeometryInfo {
            camera_plane_z: sl.geometry.camera_plane_z,
            image_plane_z: sl.geometry.image_plane_z,
            image_plane_extent: sl.geometry.image_plane_extent,
        },
        max_pixels: app.max_pixels,
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
pub struct ViewQuery {
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub w: Option<usize>,
    pub h: Option<usize>,
    pub level: Option<u8>,
    pub focus: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct ImageQuery {
    pub s: usize,
    pub t: usize,
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m).into_response(),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m).into_response(),
        }
    }
}

fn png_response(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "image/png")], bytes).into_response()
}

/// Checks a view request and turns it into a pose and render options.
pub fn view_pose(app: &AppState, q: &ViewQuery) -> Result<(CameraPose, RenderOptions), ApiError> {
    let bad = |m: &str| Err(ApiError::BadRequest(m.into()));
    let (sc, tc) = app.decoder.grid_dims();
    let s = q.s.unwrap_or((sc - 1) as f64 / 2.0);
    let t = q.t.unwrap_or((tc - 1) as f64 / 2.0);
    if !(0.0..=(sc - 1) as f64).contains(&s) || !(0.0..=(tc - 1) as f64).contains(&t) {
        return bad("s or t outside the camera grid");
    }
    let (nw, nh) = app.decoder.image_dims();
    let (w, h) = (q.w.unwrap_or(nw), q.h.unwrap_or(nh));
    if w == 0 || h == 0 || w.checked_mul(h).is_none_or(|p| p > app.max_pixels) {
        return bad("output size out of range");
    }
    let level = q.level.unwrap_or(0);
    if level > app.decoder.tree_height() {
        return bad("level exceeds tree height");
    }
    let g = &app.slab.geometry;
    if let Some(f) = q.focus {
        if !f.is_finite() || f == g.camera_plane_z {
            return bad("focus must be finite and off the camera plane");
        }
    }
    let mut pose = CameraPose::at_grid(&app.slab, s, t);
    pose.width = w;
    pose.height = h;
    Ok((pose, RenderOptions { stop_level: level, focal_z: q.focus, ..Default::default() }))
}

pub fn render_png(app: &AppState, q: &ViewQuery) -> Result<Vec<u8>, ApiError> {
    let (pose, opts) = view_pose(app, q)?;
    let out = render_view(&app.decoder, &app.slab, &pose, &opts).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(encode_rgb(&out.image))
}

pub fn image_png(app: &AppState, q: &ImageQuery) -> Result<Vec<u8>, ApiError> {
    let (sc, tc) = app.decoder.grid_dims();
    if q.s >= sc || q.t >= tc {
        return Err(ApiError::BadRequest("s or t outside the camera grid".into()));
    }
    let img = app.decoder.decode_image((q.s, q.t)).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(encode_rgb(&img))
}

async fn get_info(State(app): State<Arc<AppState>>) -> Json<Info> {
    Json(info(&app))
}

async fn blocking<F>(f: F) -> Result<Response, ApiError>
where
    F: FnOnce() -> Result<Vec<u8>, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map(png_response)
}

async fn get_view(State(app): State<Arc<AppState>>, Query(q): Query<ViewQuery>) -> Result<Response, ApiError> {
    blocking(move || render_png(&app, &q)).await
}

async fn get_image(State(app): State<Arc<AppState>>, Query(q): Query<ImageQuery>) -> Result<Response, ApiError> {
    blocking(move || image_png(&app, &q)).await
}

async fn index() -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "text/html; charset=utf-8")], INDEX_HTML)
}

pub fn router(app: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/api/info", get(get_info))
        .route("/api/view", get(get_view))
        .route("/api/image", get(get_image))
        .with_state(app.clone());
    let api = match &app.assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(index)).route("/index.html", get(index)),
    };
    api.layer(CorsLayer::permissive())
}

pub async fn serve(app: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app)).await
}
