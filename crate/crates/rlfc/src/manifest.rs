//! Light-field manifests: one JSON document naming every image of the grid.
//!
//! ```json
//! {
//!   "s_count": 2, "t_count": 2, "bit_depth": 8,
//!   "geometry": { "camera_plane_z": 0, "image_plane_z": 1, "image_plane_extent": [0, 0, 64, 64] },
//!   "images": [ { "s": 0, "t": 0, "path": "s00_t00.png", "position": [0, 0] }, ... ]
//! }
//! ```
//!
//! `geometry` and `position` are optional; positions default to the integer
//! grid coordinates. Image paths are relative to the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageFormat};
use rlfc_core::lf::regular_positions;
use rlfc_core::render::LightSlab;
use rlfc_core::{LightFieldGrid, PlaneGeometry, RgbImage};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::png::encode_rgb;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub s_count: usize,
    pub t_count: usize,
    #[serde(default = "eight")]
    pub bit_depth: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    pub images: Vec<ManifestEntry>,
}

/// JSON form of [`PlaneGeometry`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub camera_plane_z: f64,
    pub image_plane_z: f64,
    pub image_plane_extent: [f64; 4],
}

impl From<Geometry> for PlaneGeometry {
    fn from(g: Geometry) -> Self {
        PlaneGeometry {
            camera_plane_z: g.camera_plane_z,
            image_plane_z: g.image_plane_z,
            image_plane_extent: g.image_plane_extent,
        }
    }
}

impl From<PlaneGeometry> for Geometry {
    fn from(g: PlaneGeometry) -> Self {
        Geometry {
            camera_plane_z: g.camera_plane_z,
            image_plane_z: g.image_plane_z,
            image_plane_extent: g.image_plane_extent,
        }
    }
}

fn eight() -> u8 {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub s: usize,
    pub t: usize,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 2]>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported bit depth {0}, only 8 is accepted")]
    BitDepth(u8),
    #[error("empty grid")]
    EmptyGrid,
    #[error("image ({s},{t}): file {} is missing", path.display())]
    MissingFile { s: usize, t: usize, path: PathBuf },
    #[error("image ({s},{t}): cannot decode {}: {msg}", path.display())]
    BadImage { s: usize, t: usize, path: PathBuf, msg: String },
    #[error("image ({s},{t}): not 8-bit RGB")]
    NotRgb8 { s: usize, t: usize },
    #[error("image ({s},{t}): resolution {found:?} differs from {expected:?}")]
    ResolutionMismatch { s: usize, t: usize, expected: (u32, u32), found: (u32, u32) },
    #[error("grid cell ({s},{t}) has no image")]
    CellGap { s: usize, t: usize },
    #[error("grid cell ({s},{t}) is listed more than once")]
    DuplicateCell { s: usize, t: usize },
    #[error("entry ({s},{t}) lies outside the grid")]
    OutOfGrid { s: usize, t: usize },
    #[error("invalid layout: {0}")]
    Layout(rlfc_core::Error),
}

impl ManifestError {
    pub fn is_io(&self) -> bool {
        matches!(self, ManifestError::Io { .. } | ManifestError::MissingFile { .. })
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ManifestError + '_ {
    move |source| ManifestError::Io { path: path.to_path_buf(), source }
}

pub fn read_manifest(path: &Path) -> Result<Manifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Loads every image a manifest names into a grid.
pub fn load_manifest(path: &Path) -> Result<LightFieldGrid, ManifestError> {
    let m = read_manifest(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    load_from(&m, base)
}

pub fn load_from(m: &Manifest, base: &Path) -> Result<LightFieldGrid, ManifestError> {
    if m.bit_depth != 8 {
        return Err(ManifestError::BitDepth(m.bit_depth));
    }
    if m.s_count == 0 || m.t_count == 0 {
        return Err(ManifestError::EmptyGrid);
    }
    let mut cells: Vec<Option<&ManifestEntry>> = vec![None; m.s_count * m.t_count];
    for e in &m.images {
        if e.s >= m.s_count || e.t >= m.t_count {
            return Err(ManifestError::OutOfGrid { s: e.s, t: e.t });
        }
        let slot = &mut cells[e.t * m.s_count + e.s];
        if slot.is_some() {
            return Err(ManifestError::DuplicateCell { s: e.s, t: e.t });
        }
        *slot = Some(e);
    }
    if let Some(i) = cells.iter().position(Option::is_none) {
        return Err(ManifestError::CellGap { s: i % m.s_count, t: i / m.s_count });
    }

    let mut images = Vec::with_capacity(cells.len());
    let mut expected = None;
    for e in cells.into_iter().flatten() {
        let (s, t) = (e.s, e.t);
        let full = base.join(&e.path);
        if !full.is_file() {
            return Err(ManifestError::MissingFile { s, t, path: full });
        }
        let bad = |msg: String| ManifestError::BadImage { s, t, path: full.clone(), msg };
        let img = image::ImageReader::open(&full)
            .map_err(|err| bad(err.to_string()))?
            .with_guessed_format()
            .map_err(|err| bad(err.to_string()))?
            .decode()
            .map_err(|err| bad(err.to_string()))?;
        let DynamicImage::ImageRgb8(buf) = img else {
            return Err(ManifestError::NotRgb8 { s, t });
        };
        let found = buf.dimensions();
        match expected {
            None => expected = Some(found),
            Some(exp) if exp != found => {
                return Err(ManifestError::ResolutionMismatch { s, t, expected: exp, found })
            }
            _ => {}
        }
        let (w, h) = found;
        images.push(RgbImage::from_vec(w as usize, h as usize, buf.into_raw()).map_err(ManifestError::Layout)?);
    }

    let (w, h) = (images[0].width, images[0].height);
    let mut positions = regular_positions(m.s_count, m.t_count);
    for e in &m.images {
        if let Some(p) = e.position {
            positions[e.t * m.s_count + e.s] = p;
        }
    }
    let geometry = m.geometry.map_or_else(|| PlaneGeometry::regular(w, h), Into::into);
    LightFieldGrid::with_layout(m.s_count, m.t_count, images, positions, geometry)
        .map_err(ManifestError::Layout)
}

impl Manifest {
    /// Slab geometry and camera axes without loading any image.
    pub fn slab(&self, width: usize, height: usize) -> Result<LightSlab, ManifestError> {
        if self.s_count == 0 || self.t_count == 0 {
            return Err(ManifestError::EmptyGrid);
        }
        let mut positions = regular_positions(self.s_count, self.t_count);
        for e in &self.images {
            if e.s >= self.s_count || e.t >= self.t_count {
                return Err(ManifestError::OutOfGrid { s: e.s, t: e.t });
            }
            if let Some(p) = e.position {
                positions[e.t * self.s_count + e.s] = p;
            }
        }
        let geometry = self.geometry.map_or_else(|| PlaneGeometry::regular(width, height), Into::into);
        LightSlab::from_layout(self.s_count, self.t_count, &positions, geometry, width, height)
            .map_err(ManifestError::Layout)
    }
}

pub fn image_file_name(s: usize, t: usize) -> String {
    format!("s{s:02}_t{t:02}.png")
}

/// Writes every image as PNG plus `manifest.json` into `dir`; returns the
/// manifest path.
pub fn export_grid(grid: &LightFieldGrid, dir: &Path) -> Result<PathBuf, ManifestError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let regular = regular_positions(grid.s_count, grid.t_count);
    let mut entries = Vec::with_capacity(grid.images.len());
    for t in 0..grid.t_count {
        for s in 0..grid.s_count {
            let name = image_file_name(s, t);
            let path = dir.join(&name);
            fs::write(&path, encode_rgb(grid.image(s, t))).map_err(io_err(&path))?;
            let pos = grid.camera_positions[grid.index(s, t)];
            entries.push(ManifestEntry {
                s,
                t,
                path: name.into(),
                position: (pos != regular[grid.index(s, t)]).then_some(pos),
            });
        }
    }
    let geometry = (grid.geometry != PlaneGeometry::regular(grid.width, grid.height)).then_some(grid.geometry.into());
    let m = Manifest { s_count: grid.s_count, t_count: grid.t_count, bit_depth: 8, geometry, images: entries };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&m)?;
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

/// Decodes a single PNG, for callers comparing files directly.
pub fn read_png_rgb(path: &Path) -> Result<RgbImage, ManifestError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Png)
        .map_err(|e| ManifestError::BadImage { s: 0, t: 0, path: path.into(), msg: e.to_string() })?
        .into_rgb8();
    let (w, h) = img.dimensions();
    RgbImage::from_vec(w as usize, h as usize, img.into_raw()).map_err(ManifestError::Layout)
}
