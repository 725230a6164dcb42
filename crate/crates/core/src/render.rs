//! Novel-view synthesis from a light slab.
//!
//! A ray is parameterized by where it crosses the camera plane, giving
//! fractional camera-grid coordinates `(s, t)`, and where it crosses the
//! image plane, giving fractional pixel coordinates `(u, v)` (pixel centres
//! at integers). The colour is the 16-tap quadrilinear blend of the
//! surrounding cameras and pixels, computed in `f64` and rounded half-up.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use crate::color::{ycocgr_to_rgb, YCoCgPixel};
use crate::decoder::DecoderState;
use crate::lf::{check_monotonic, LightFieldGrid, PlaneGeometry, RgbImage};
use crate::{Error, Result};

/// Coordinates within `SNAP` of an integer are treated as that integer.
const SNAP: f64 = 1e-9;

/// Camera-plane sampling plus slab geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct LightSlab {
    pub geometry: PlaneGeometry,
    /// World x of every camera column (`s`).
    pub xs: Vec<f64>,
    /// World y of every camera row (`t`).
    pub ys: Vec<f64>,
    pub width: usize,
    pub height: usize,
}

impl LightSlab {
    pub fn regular(s_count: usize, t_count: usize, width: usize, height: usize) -> Self {
        LightSlab {
            geometry: PlaneGeometry::regular(width, height),
            xs: (0..s_count).map(|s| s as f64).collect(),
            ys: (0..t_count).map(|t| t as f64).collect(),
            width,
            height,
        }
    }

    /// Axis positions are averaged across the other grid axis, which is
    /// exact for separable (rectilinear) camera grids.
    pub fn from_grid(grid: &LightFieldGrid) -> Self {
        Self::from_parts(grid.s_count, grid.t_count, &grid.camera_positions, grid.geometry, grid.width, grid.height)
    }

    /// Like [`LightSlab::from_grid`] for a layout without images.
    pub fn from_layout(
        s_count: usize,
        t_count: usize,
        positions: &[[f64; 2]],
        geometry: PlaneGeometry,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        if s_count == 0 || t_count == 0 || width == 0 || height == 0 {
            return Err(Error::ZeroSizedGrid);
        }
        if positions.len() != s_count * t_count {
            return Err(Error::DimensionMismatch);
        }
        check_monotonic(s_count, t_count, positions)?;
        geometry.validate()?;
        Ok(Self::from_parts(s_count, t_count, positions, geometry, width, height))
    }

    fn from_parts(
        sc: usize,
        tc: usize,
        positions: &[[f64; 2]],
        geometry: PlaneGeometry,
        width: usize,
        height: usize,
    ) -> Self {
        let xs = (0..sc).map(|s| (0..tc).map(|t| positions[t * sc + s][0]).sum::<f64>() / tc as f64).collect();
        let ys = (0..tc).map(|t| (0..sc).map(|s| positions[t * sc + s][1]).sum::<f64>() / sc as f64).collect();
        LightSlab { geometry, xs, ys, width, height }
    }

    pub fn grid_dims(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }

    /// World position of fractional camera coordinates (clamped to the grid).
    pub fn camera_world(&self, s: f64, t: f64) -> [f64; 2] {
        [axis_world(&self.xs, s), axis_world(&self.ys, t)]
    }

    pub fn pixel_to_world(&self, u: f64, v: f64) -> [f64; 2] {
        let [x0, y0, x1, y1] = self.geometry.image_plane_extent;
        [
            x0 + (u + 0.5) * (x1 - x0) / self.width as f64,
            y0 + (v + 0.5) * (y1 - y0) / self.height as f64,
        ]
    }

    pub fn world_to_pixel(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        let [x0, y0, x1, y1] = self.geometry.image_plane_extent;
        let fx = (x - x0) / (x1 - x0);
        let fy = (y - y0) / (y1 - y0);
        if !(-SNAP..=1.0 + SNAP).contains(&fx) || !(-SNAP..=1.0 + SNAP).contains(&fy) {
            return None;
        }
        Some([snap(fx * self.width as f64 - 0.5), snap(fy * self.height as f64 - 0.5)])
    }
}

fn snap(v: f64) -> f64 {
    let r = libm::round(v);
    if (v - r).abs() < SNAP {
        r
    } else {
        v
    }
}

fn axis_world(axis: &[f64], c: f64) -> f64 {
    if axis.len() == 1 {
        return axis[0];
    }
    let c = c.clamp(0.0, (axis.len() - 1) as f64);
    let i = (libm::floor(c) as usize).min(axis.len() - 2);
    let f = c - i as f64;
    axis[i] + (axis[i + 1] - axis[i]) * f
}

/// Inverse of `axis_world` for strictly monotonic axes.
fn axis_coord(axis: &[f64], v: f64) -> Option<f64> {
    let n = axis.len();
    let tol = SNAP * (1.0 + v.abs());
    if n == 1 {
        return ((v - axis[0]).abs() <= tol).then_some(0.0);
    }
    let inc = axis[1] > axis[0];
    let (lo, hi) = if inc { (axis[0], axis[n - 1]) } else { (axis[n - 1], axis[0]) };
    if v < lo - tol || v > hi + tol {
        return None;
    }
    for i in 0..n - 1 {
        let (a, b) = (axis[i], axis[i + 1]);
        let within = if inc { v <= b + tol } else { v >= b - tol };
        if within || i == n - 2 {
            let f = ((v - a) / (b - a)).clamp(0.0, 1.0);
            return Some(snap(i as f64 + f));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: [f64; 3],
    pub dir: [f64; 3],
}

/// Fractional light-field coordinates. `s, t` index the camera grid;
/// `u, v` are pixel coordinates with pixel centres at integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfCoord {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

fn hit_z(ray: &Ray, z: f64) -> [f64; 2] {
    let k = (z - ray.origin[2]) / ray.dir[2];
    [ray.origin[0] + ray.dir[0] * k, ray.origin[1] + ray.dir[1] * k]
}

/// `Ok(None)` when the ray misses the sampled camera grid or image extent.
pub fn ray_to_lf_coords(ray: &Ray, slab: &LightSlab) -> Result<Option<LfCoord>> {
    if ray.dir[2] == 0.0 {
        return Err(Error::ParallelRay);
    }
    let [cx, cy] = hit_z(ray, slab.geometry.camera_plane_z);
    let [ix, iy] = hit_z(ray, slab.geometry.image_plane_z);
    let (Some(s), Some(t)) = (axis_coord(&slab.xs, cx), axis_coord(&slab.ys, cy)) else {
        return Ok(None);
    };
    let Some([u, v]) = slab.world_to_pixel(ix, iy) else {
        return Ok(None);
    };
    Ok(Some(LfCoord { s, t, u, v }))
}

/// Something that can produce light-field pixels.
pub trait PixelSource {
    /// `(s_count, t_count, width, height)`.
    fn dims(&self) -> (usize, usize, usize, usize);
    fn pixel(&mut self, s: usize, t: usize, x: usize, y: usize) -> Result<[u8; 3]>;
}

/// Fully decoded light field.
#[derive(Debug, Clone, Copy)]
pub struct GridSource<'a>(pub &'a LightFieldGrid);

impl PixelSource for GridSource<'_> {
    fn dims(&self) -> (usize, usize, usize, usize) {
        (self.0.s_count, self.0.t_count, self.0.width, self.0.height)
    }

    fn pixel(&mut self, s: usize, t: usize, x: usize, y: usize) -> Result<[u8; 3]> {
        Ok(self.0.image(s, t).pixel(x, y))
    }
}

type BlockKey = (usize, usize, usize, usize);

/// Decodes blocks on demand, memoizing RGB blocks for one frame.
#[derive(Debug)]
pub struct DecodedSource<'a> {
    state: &'a DecoderState,
    stop_level: u8,
    memo: BTreeMap<BlockKey, Vec<u8>>,
}

impl<'a> DecodedSource<'a> {
    pub fn new(state: &'a DecoderState, stop_level: u8) -> Result<Self> {
        if stop_level > state.tree_height() {
            return Err(Error::IndexOutOfRange);
        }
        Ok(DecodedSource { state, stop_level, memo: BTreeMap::new() })
    }

    /// Number of distinct (image, block) pairs decoded so far.
    pub fn decoded_blocks(&self) -> usize {
        self.memo.len()
    }

    fn rgb_block(&mut self, key: BlockKey) -> Result<&[u8]> {
        if !self.memo.contains_key(&key) {
            let (s, t, bx, by) = key;
            let k = self.stop_level;
            let st = self.state;
            let y = st.decode_block_progressive((s, t), (bx, by), 0, k)?;
            let co = st.decode_block_progressive((s, t), (bx, by), 1, k)?;
            let cg = st.decode_block_progressive((s, t), (bx, by), 2, k)?;
            let mut rgb = Vec::with_capacity(y.as_slice().len() * 3);
            for ((&y, &co), &cg) in y.as_slice().iter().zip(co.as_slice()).zip(cg.as_slice()) {
                let (r, g, b) = ycocgr_to_rgb(YCoCgPixel { y, co, cg });
                rgb.extend_from_slice(&[r, g, b]);
            }
            self.memo.insert(key, rgb);
        }
        Ok(&self.memo[&key])
    }
}

impl PixelSource for DecodedSource<'_> {
    fn dims(&self) -> (usize, usize, usize, usize) {
        let (s, t) = self.state.grid_dims();
        let (w, h) = self.state.image_dims();
        (s, t, w, h)
    }

    fn pixel(&mut self, s: usize, t: usize, x: usize, y: usize) -> Result<[u8; 3]> {
        let b = self.state.block_size();
        let block = self.rgb_block((s, t, x / b, y / b))?;
        let i = ((y % b) * b + x % b) * 3;
        Ok([block[i], block[i + 1], block[i + 2]])
    }
}

/// Linear interpolation taps along one axis of length `n`, clamped.
fn taps(c: f64, n: usize) -> [(usize, f64); 2] {
    let c = c.clamp(0.0, (n - 1) as f64);
    let i0 = libm::floor(c) as usize;
    let f = c - i0 as f64;
    let i1 = (i0 + 1).min(n - 1);
    [(i0, 1.0 - f), (i1, f)]
}

fn round_rgb(acc: [f64; 3]) -> [u8; 3] {
    acc.map(|v| libm::floor(v + 0.5).clamp(0.0, 255.0) as u8)
}

/// 16-tap quadrilinear blend; coordinates outside the aperture are clamped.
pub fn sample_quadrilinear<S: PixelSource>(src: &mut S, c: &LfCoord) -> Result<[u8; 3]> {
    let (sc, tc, w, h) = src.dims();
    let mut acc = [0.0f64; 3];
    for (s, ws) in taps(c.s, sc) {
        for (t, wt) in taps(c.t, tc) {
            let wc = ws * wt;
            if wc == 0.0 {
                continue;
            }
            bilinear_into(src, s, t, c.u, c.v, w, h, wc, &mut acc)?;
        }
    }
    Ok(round_rgb(acc))
}

#[allow(clippy::too_many_arguments)]
fn bilinear_into<S: PixelSource>(
    src: &mut S,
    s: usize,
    t: usize,
    u: f64,
    v: f64,
    w: usize,
    h: usize,
    weight: f64,
    acc: &mut [f64; 3],
) -> Result<()> {
    for (x, wx) in taps(u, w) {
        for (y, wy) in taps(v, h) {
            let wgt = weight * wx * wy;
            if wgt == 0.0 {
                continue;
            }
            let p = src.pixel(s, t, x, y)?;
            for k in 0..3 {
                acc[k] += wgt * f64::from(p[k]);
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// Off-axis frustum whose image spans `[x0, y0, x1, y1]` on the image
    /// plane. With the full extent and the eye on a sample camera this
    /// reproduces that camera exactly.
    Window([f64; 4]),
    /// Symmetric pinhole; `fov_y` in degrees.
    Perspective { look: [f64; 3], up: [f64; 3], fov_y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    pub eye: [f64; 3],
    pub projection: Projection,
    pub width: usize,
    pub height: usize,
}

impl CameraPose {
    /// Eye on the camera plane at fractional grid coords, viewing the full
    /// image-plane extent at native resolution.
    pub fn at_grid(slab: &LightSlab, s: f64, t: f64) -> Self {
        let [x, y] = slab.camera_world(s, t);
        CameraPose {
            eye: [x, y, slab.geometry.camera_plane_z],
            projection: Projection::Window(slab.geometry.image_plane_extent),
            width: slab.width,
            height: slab.height,
        }
    }

    pub fn ray(&self, i: usize, j: usize, slab: &LightSlab) -> Ray {
        let (fi, fj) = ((i as f64 + 0.5) / self.width as f64, (j as f64 + 0.5) / self.height as f64);
        let dir = match self.projection {
            Projection::Window([x0, y0, x1, y1]) => {
                let target = [x0 + fi * (x1 - x0), y0 + fj * (y1 - y0), slab.geometry.image_plane_z];
                sub(target, self.eye)
            }
            Projection::Perspective { look, up, fov_y } => {
                let look = normalize(look);
                let right = normalize(cross(up, look));
                let true_up = cross(look, right);
                let half = libm::tan(fov_y.to_radians() / 2.0);
                let aspect = self.width as f64 / self.height as f64;
                let (xn, yn) = ((2.0 * fi - 1.0) * half * aspect, (2.0 * fj - 1.0) * half);
                [0, 1, 2].map(|k| look[k] + xn * right[k] + yn * true_up[k])
            }
        };
        Ray { origin: self.eye, dir }
    }

    pub fn validate(&self, slab: &LightSlab) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::ZeroSizedGrid);
        }
        if self.eye[2] == slab.geometry.image_plane_z {
            return Err(Error::InvalidParams("eye lies on the image plane"));
        }
        Ok(())
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = libm::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    [a[0] / n, a[1] / n, a[2] / n]
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RenderOptions {
    pub stop_level: u8,
    pub background: [u8; 3],
    /// Depth of the in-focus plane; `None` focuses on the image plane.
    pub focal_z: Option<f64>,
}


/// Per-camera refocused sample: the ray's point on the focal plane is
/// reprojected through each of the four nearest cameras.
fn sample_focused<S: PixelSource>(
    src: &mut S,
    slab: &LightSlab,
    c: &LfCoord,
    focal: [f64; 3],
) -> Result<[u8; 3]> {
    let (sc, tc, w, h) = src.dims();
    let g = &slab.geometry;
    let k = (g.image_plane_z - g.camera_plane_z) / (focal[2] - g.camera_plane_z);
    let mut acc = [0.0f64; 3];
    for (s, ws) in taps(c.s, sc) {
        for (t, wt) in taps(c.t, tc) {
            let wc = ws * wt;
            if wc == 0.0 {
                continue;
            }
            let (cx, cy) = (slab.xs[s], slab.ys[t]);
            let q = [cx + (focal[0] - cx) * k, cy + (focal[1] - cy) * k];
            let [x0, y0, x1, y1] = g.image_plane_extent;
            let u = (q[0] - x0) / (x1 - x0) * w as f64 - 0.5;
            let v = (q[1] - y0) / (y1 - y0) * h as f64 - 0.5;
            bilinear_into(src, s, t, snap(u), snap(v), w, h, wc, &mut acc)?;
        }
    }
    Ok(round_rgb(acc))
}

/// Renders rows `rows` of `pose` into `out` (row-major RGB for those rows).
pub fn render_rows<S: PixelSource>(
    src: &mut S,
    slab: &LightSlab,
    pose: &CameraPose,
    opts: &RenderOptions,
    rows: Range<usize>,
    out: &mut [u8],
) -> Result<()> {
    pose.validate(slab)?;
    let focus = opts.focal_z.filter(|&z| z != slab.geometry.image_plane_z);
    let mut k = 0;
    for j in rows {
        for i in 0..pose.width {
            let ray = pose.ray(i, j, slab);
            let rgb = match ray_to_lf_coords(&ray, slab)? {
                None => opts.background,
                Some(c) => match focus {
                    None => sample_quadrilinear(src, &c)?,
                    Some(z) => {
                        let [fx, fy] = hit_z(&ray, z);
                        sample_focused(src, slab, &c, [fx, fy, z])?
                    }
                },
            };
            out[k..k + 3].copy_from_slice(&rgb);
            k += 3;
        }
    }
    Ok(())
}

pub fn render_with<S: PixelSource>(
    src: &mut S,
    slab: &LightSlab,
    pose: &CameraPose,
    opts: &RenderOptions,
) -> Result<RgbImage> {
    let mut img = RgbImage::new(pose.width, pose.height);
    render_rows(src, slab, pose, opts, 0..pose.height, &mut img.data)?;
    Ok(img)
}

/// Renders a view straight from the compressed stream with a per-frame
/// block memo.
pub fn render_view(
    state: &DecoderState,
    slab: &LightSlab,
    pose: &CameraPose,
    opts: &RenderOptions,
) -> Result<RgbImage> {
    let mut src = DecodedSource::new(state, opts.stop_level)?;
    render_with(&mut src, slab, pose, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn slab(s: usize, t: usize) -> LightSlab {
        let mut sl = LightSlab::regular(s, t, 8, 8);
        sl.geometry = PlaneGeometry {
            camera_plane_z: 0.0,
            image_plane_z: 4.0,
            image_plane_extent: [-2.0, -2.0, 6.0, 6.0],
        };
        sl
    }

    #[test]
    fn perpendicular_ray_through_camera() {
        let sl = slab(16, 16);
        let ray = Ray { origin: [3.0, 5.0, -1.0], dir: [0.0, 0.0, 1.0] };
        let c = ray_to_lf_coords(&ray, &sl).unwrap().unwrap();
        assert_eq!((c.s, c.t), (3.0, 5.0));
        // x = 3 on an extent of [-2, 6] over 8 px → (5/8)·8 − 0.5
        assert_eq!((c.u, c.v), (4.5, 6.5));
    }

    #[test]
    fn misses_and_parallel_rays() {
        let sl = slab(4, 4);
        let miss = Ray { origin: [-1.0, 0.0, 0.0], dir: [0.0, 0.0, 1.0] };
        assert_eq!(ray_to_lf_coords(&miss, &sl).unwrap(), None);
        let off_image = Ray { origin: [0.0, 0.0, 0.0], dir: [5.0, 0.0, 1.0] };
        assert_eq!(ray_to_lf_coords(&off_image, &sl).unwrap(), None);
        let par = Ray { origin: [0.0, 0.0, 0.0], dir: [1.0, 0.0, 0.0] };
        assert_eq!(ray_to_lf_coords(&par, &sl), Err(Error::ParallelRay));
    }

    #[test]
    fn oblique_ray_matches_closed_form() {
        let sl = slab(8, 8);
        let ray = Ray { origin: [1.3, 2.1, -3.0], dir: [0.11, 0.07, 1.0] };
        let c = ray_to_lf_coords(&ray, &sl).unwrap().unwrap();
        // Line–plane intersection: p(z) = o + d (z − oz) / dz
        let cam = [1.3 + 0.11 * 3.0, 2.1 + 0.07 * 3.0];
        let img = [1.3 + 0.11 * 7.0, 2.1 + 0.07 * 7.0];
        let u = (img[0] + 2.0) / 8.0 * 8.0 - 0.5;
        let v = (img[1] + 2.0) / 8.0 * 8.0 - 0.5;
        for (got, want) in [(c.s, cam[0]), (c.t, cam[1]), (c.u, u), (c.v, v)] {
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn non_uniform_axis_inversion() {
        let axis = [0.0, 0.5, 2.0, 2.25];
        assert_eq!(axis_coord(&axis, 0.5), Some(1.0));
        assert_eq!(axis_coord(&axis, 1.25), Some(1.5));
        assert_eq!(axis_coord(&axis, 2.3), None);
        let rev = [3.0, 2.0, 0.0];
        assert_eq!(axis_coord(&rev, 1.0), Some(1.5));
        for c in [0.0, 0.3, 1.0, 1.7, 2.9, 3.0] {
            let back = axis_coord(&axis, axis_world(&axis, c)).unwrap();
            assert!((back - c).abs() < 1e-12);
        }
    }

    fn constant_grid(values: &[u8], s: usize, t: usize) -> LightFieldGrid {
        let imgs = values
            .iter()
            .map(|&v| RgbImage::from_vec(4, 4, vec![v; 48]).unwrap())
            .collect();
        LightFieldGrid::new(s, t, imgs).unwrap()
    }

    #[test]
    fn quadrilinear_degenerate_and_midpoint() {
        let mut imgs = vec![];
        for k in 0..4u8 {
            let mut img = RgbImage::new(4, 4);
            for (i, p) in img.data.iter_mut().enumerate() {
                *p = (i as u8).wrapping_mul(7).wrapping_add(k * 50);
            }
            imgs.push(img);
        }
        let lf = LightFieldGrid::new(2, 2, imgs).unwrap();
        let mut src = GridSource(&lf);
        let c = LfCoord { s: 1.0, t: 0.0, u: 2.0, v: 3.0 };
        assert_eq!(sample_quadrilinear(&mut src, &c).unwrap(), lf.image(1, 0).pixel(2, 3));

        let flat = constant_grid(&[10, 20], 2, 1);
        let mut src = GridSource(&flat);
        let c = LfCoord { s: 0.5, t: 0.0, u: 1.3, v: 2.7 };
        // (10 + 20) / 2 with all 16 tap weights hand-evaluated
        assert_eq!(sample_quadrilinear(&mut src, &c).unwrap(), [15, 15, 15]);

        let same = constant_grid(&[42; 4], 2, 2);
        let mut src = GridSource(&same);
        let c = LfCoord { s: 0.37, t: 0.81, u: 0.2, v: 2.9 };
        assert_eq!(sample_quadrilinear(&mut src, &c).unwrap(), [42, 42, 42]);
    }

    #[test]
    fn window_pose_reproduces_sample_camera() {
        let lf = constant_grid(&[1, 2, 3, 4, 5, 6], 3, 2);
        let mut lf = lf;
        for (n, img) in lf.images.iter_mut().enumerate() {
            for (i, p) in img.data.iter_mut().enumerate() {
                *p = (i * 5 + n * 31) as u8;
            }
        }
        let sl = LightSlab::from_grid(&lf);
        for t in 0..2 {
            for s in 0..3 {
                let pose = CameraPose::at_grid(&sl, s as f64, t as f64);
                let img = render_with(&mut GridSource(&lf), &sl, &pose, &RenderOptions::default())
                    .unwrap();
                assert_eq!(&img, lf.image(s, t));
            }
        }
    }

    #[test]
    fn refocus_at_image_plane_is_plain_quadrilinear() {
        let mut lf = constant_grid(&[0; 4], 2, 2);
        for (n, img) in lf.images.iter_mut().enumerate() {
            for (i, p) in img.data.iter_mut().enumerate() {
                *p = (i * 3 + n * 17) as u8;
            }
        }
        let sl = LightSlab::from_grid(&lf);
        let pose = CameraPose::at_grid(&sl, 0.4, 0.7);
        let plain = render_with(&mut GridSource(&lf), &sl, &pose, &RenderOptions::default()).unwrap();
        let mut c = sample_quadrilinear(&mut GridSource(&lf), &LfCoord { s: 0.4, t: 0.7, u: 1.0, v: 1.0 }).unwrap();
        assert_eq!(plain.pixel(1, 1), c);
        // Focus slightly off the image plane shifts per-camera lookups.
        let opts = RenderOptions { focal_z: Some(sl.geometry.image_plane_z), ..Default::default() };
        let same = render_with(&mut GridSource(&lf), &sl, &pose, &opts).unwrap();
        assert_eq!(same, plain);
        let opts = RenderOptions { focal_z: Some(0.5), ..Default::default() };
        let shifted = render_with(&mut GridSource(&lf), &sl, &pose, &opts).unwrap();
        c = shifted.pixel(1, 1);
        let _ = c;
        assert_ne!(shifted, plain);
    }
}
