//! Procedural two-plane light fields for tests and benchmarks.
//!
//! Each camera ray-casts a small scene: a textured background plane behind
//! the image plane and two textured occluders in front of it, so views show
//! real parallax and occlusion edges.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lf::{regular_positions, LightFieldGrid, PlaneGeometry, RgbImage};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub s_count: usize,
    pub t_count: usize,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
}

const IMAGE_Z: f64 = 10.0;
const BACKGROUND_Z: f64 = 12.5;
const DISC_Z: f64 = 8.5;
const SLAB_Z: f64 = 9.2;
const EXTENT_WIDTH: f64 = 16.0;

#[derive(Debug, Clone, Copy)]
struct Wave {
    fx: f64,
    fy: f64,
    phase: f64,
    amp: [f64; 3],
}

#[derive(Debug, Clone)]
struct Scene {
    bg_base: [f64; 3],
    bg_waves: [Wave; 3],
    checker: f64,
    disc_center: [f64; 2],
    disc_radius: f64,
    disc_base: [f64; 3],
    disc_wave: Wave,
    slab_rect: [f64; 4],
    slab_base: [f64; 3],
    slab_wave: Wave,
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn range(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

fn wave(rng: &mut ChaCha8Rng, fmax: f64, amax: f64) -> Wave {
    Wave {
        fx: range(rng, -fmax, fmax),
        fy: range(rng, -fmax, fmax),
        phase: range(rng, 0.0, TAU),
        amp: [range(rng, 0.0, amax), range(rng, 0.0, amax), range(rng, 0.0, amax)],
    }
}

fn color(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [range(rng, 60.0, 190.0), range(rng, 60.0, 190.0), range(rng, 60.0, 190.0)]
}

impl Scene {
    fn new(seed: u64, center: [f64; 2]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bg_base = color(&mut rng);
        let bg_waves = [wave(&mut rng, 0.12, 30.0), wave(&mut rng, 0.12, 30.0), wave(&mut rng, 0.25, 12.0)];
        let checker = range(&mut rng, 10.0, 25.0);
        let disc_center =
            [center[0] + range(&mut rng, -1.5, 1.5), center[1] + range(&mut rng, -1.5, 1.5)];
        let disc_radius = range(&mut rng, 1.2, 2.0);
        let disc_base = color(&mut rng);
        let disc_wave = wave(&mut rng, 0.3, 25.0);
        let sx = center[0] + range(&mut rng, -3.0, 0.0);
        let sy = center[1] + range(&mut rng, 0.5, 2.0);
        let slab_rect = [sx, sy, sx + range(&mut rng, 2.0, 3.5), sy + range(&mut rng, 1.0, 2.0)];
        let slab_base = color(&mut rng);
        let slab_wave = wave(&mut rng, 0.25, 20.0);
        Scene {
            bg_base,
            bg_waves,
            checker,
            disc_center,
            disc_radius,
            disc_base,
            disc_wave,
            slab_rect,
            slab_base,
            slab_wave,
        }
    }

    fn shade(base: [f64; 3], waves: &[Wave], x: f64, y: f64) -> [f64; 3] {
        let mut c = base;
        for w in waves {
            let s = libm::sin(TAU * (w.fx * x + w.fy * y) + w.phase);
            for k in 0..3 {
                c[k] += w.amp[k] * s;
            }
        }
        c
    }

    /// Radiance along the ray from `eye` (on the camera plane) through `p`
    /// (on the image plane).
    fn trace(&self, eye: [f64; 2], p: [f64; 2]) -> [f64; 3] {
        let at = |z: f64| {
            let k = z / IMAGE_Z;
            [eye[0] + (p[0] - eye[0]) * k, eye[1] + (p[1] - eye[1]) * k]
        };
        let [x, y] = at(DISC_Z);
        let (dx, dy) = (x - self.disc_center[0], y - self.disc_center[1]);
        if dx * dx + dy * dy <= self.disc_radius * self.disc_radius {
            return Self::shade(self.disc_base, &[self.disc_wave], x, y);
        }
        let [x, y] = at(SLAB_Z);
        let [x0, y0, x1, y1] = self.slab_rect;
        if (x0..=x1).contains(&x) && (y0..=y1).contains(&y) {
            return Self::shade(self.slab_base, &[self.slab_wave], x, y);
        }
        let [x, y] = at(BACKGROUND_Z);
        let mut c = Self::shade(self.bg_base, &self.bg_waves, x, y);
        let cell = (libm::floor(x / 3.0) + libm::floor(y / 3.0)) as i64;
        let sign = if cell.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        for v in c.iter_mut() {
            *v += sign * self.checker;
        }
        c
    }
}

/// Deterministic procedural light field. Cameras sit at integer grid
/// coordinates; 2×2 supersampling per pixel.
pub fn synthesize_lightfield(spec: &SyntheticSpec) -> Result<LightFieldGrid> {
    if spec.s_count == 0 || spec.t_count == 0 || spec.width == 0 || spec.height == 0 {
        return Err(Error::ZeroSizedGrid);
    }
    let center = [(spec.s_count as f64 - 1.0) / 2.0, (spec.t_count as f64 - 1.0) / 2.0];
    let scene = Scene::new(spec.seed, center);
    let ew = EXTENT_WIDTH;
    let eh = EXTENT_WIDTH * spec.height as f64 / spec.width as f64;
    let extent = [center[0] - ew / 2.0, center[1] - eh / 2.0, center[0] + ew / 2.0, center[1] + eh / 2.0];
    let geometry = PlaneGeometry { camera_plane_z: 0.0, image_plane_z: IMAGE_Z, image_plane_extent: extent };
    let positions = regular_positions(spec.s_count, spec.t_count);
    let (pw, ph) = (ew / spec.width as f64, eh / spec.height as f64);
    let images: Vec<RgbImage> = positions
        .iter()
        .map(|&eye| {
            let mut img = RgbImage::new(spec.width, spec.height);
            for j in 0..spec.height {
                for i in 0..spec.width {
                    let mut acc = [0.0; 3];
                    for (ox, oy) in [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)] {
                        let p = [extent[0] + (i as f64 + ox) * pw, extent[1] + (j as f64 + oy) * ph];
                        let c = scene.trace(eye, p);
                        for k in 0..3 {
                            acc[k] += c[k] / 4.0;
                        }
                    }
                    img.put(i, j, acc.map(|v| libm::round(v).clamp(0.0, 255.0) as u8));
                }
            }
            img
        })
        .collect();
    LightFieldGrid::with_layout(spec.s_count, spec.t_count, images, positions, geometry)
}
