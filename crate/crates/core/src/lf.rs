//! Two-plane light-field model: an S×T grid of cameras on the camera plane,
//! each holding a W×H image of the (u, v) image plane.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Interleaved 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        RgbImage { width, height, data: vec![0; width * height * 3] }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch);
        }
        Ok(RgbImage { width, height, data })
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }
}

/// Light-slab geometry. Both planes are perpendicular to the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneGeometry {
    pub camera_plane_z: f64,
    pub image_plane_z: f64,
    /// `[x0, y0, x1, y1]` on the image plane; pixel `(i, j)` has its centre
    /// at `x0 + (i + 0.5) (x1 - x0) / W`, likewise for y.
    pub image_plane_extent: [f64; 4],
}

impl PlaneGeometry {
    /// Geometry used when nothing better is known: unit camera spacing, image
    /// plane one unit away, one world unit per pixel.
    pub fn regular(width: usize, height: usize) -> Self {
        PlaneGeometry {
            camera_plane_z: 0.0,
            image_plane_z: 1.0,
            image_plane_extent: [0.0, 0.0, width as f64, height as f64],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [x0, y0, x1, y1] = self.image_plane_extent;
        if self.camera_plane_z == self.image_plane_z {
            return Err(Error::InvalidParams("camera and image planes coincide"));
        }
        if !(x1 != x0 && y1 != y0) {
            return Err(Error::InvalidParams("degenerate image-plane extent"));
        }
        Ok(())
    }
}

/// An indexed light field. Image `(s, t)` lives at index `t * s_count + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightFieldGrid {
    pub s_count: usize,
    pub t_count: usize,
    pub width: usize,
    pub height: usize,
    pub images: Vec<RgbImage>,
    pub camera_positions: Vec<[f64; 2]>,
    pub geometry: PlaneGeometry,
}

impl LightFieldGrid {
    /// Builds a grid with cameras at integer grid coordinates.
    pub fn new(s_count: usize, t_count: usize, images: Vec<RgbImage>) -> Result<Self> {
        let positions = regular_positions(s_count, t_count);
        let (w, h) = images.first().map(|i| (i.width, i.height)).unwrap_or((0, 0));
        Self::with_layout(s_count, t_count, images, positions, PlaneGeometry::regular(w, h))
    }

    pub fn with_layout(
        s_count: usize,
        t_count: usize,
        images: Vec<RgbImage>,
        camera_positions: Vec<[f64; 2]>,
        geometry: PlaneGeometry,
    ) -> Result<Self> {
        if s_count == 0 || t_count == 0 {
            return Err(Error::ZeroSizedGrid);
        }
        if images.len() != s_count * t_count || camera_positions.len() != images.len() {
            return Err(Error::DimensionMismatch);
        }
        let (width, height) = (images[0].width, images[0].height);
        if width == 0 || height == 0 {
            return Err(Error::ZeroSizedGrid);
        }
        if images.iter().any(|i| i.width != width || i.height != height) {
            return Err(Error::DimensionMismatch);
        }
        check_monotonic(s_count, t_count, &camera_positions)?;
        geometry.validate()?;
        Ok(LightFieldGrid { s_count, t_count, width, height, images, camera_positions, geometry })
    }

    #[inline]
    pub fn index(&self, s: usize, t: usize) -> usize {
        t * self.s_count + s
    }

    pub fn image(&self, s: usize, t: usize) -> &RgbImage {
        &self.images[self.index(s, t)]
    }

    pub fn pixel_count(&self) -> u64 {
        (self.s_count * self.t_count * self.width * self.height) as u64
    }
}

pub fn camera_position(grid: &LightFieldGrid, s: usize, t: usize) -> Result<[f64; 2]> {
    if s >= grid.s_count || t >= grid.t_count {
        return Err(Error::IndexOutOfRange);
    }
    Ok(grid.camera_positions[grid.index(s, t)])
}

pub fn regular_positions(s_count: usize, t_count: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(s_count * t_count);
    for t in 0..t_count {
        for s in 0..s_count {
            out.push([s as f64, t as f64]);
        }
    }
    out
}

pub(crate) fn check_monotonic(s_count: usize, t_count: usize, pos: &[[f64; 2]]) -> Result<()> {
    let strictly = |a: f64, b: f64, inc: bool| if inc { b > a } else { b < a };
    if s_count > 1 {
        let inc = pos[1][0] > pos[0][0];
        for t in 0..t_count {
            for s in 1..s_count {
                let (a, b) = (pos[t * s_count + s - 1][0], pos[t * s_count + s][0]);
                if !strictly(a, b, inc) {
                    return Err(Error::InvalidParams("camera x not monotonic along s"));
                }
            }
        }
    }
    if t_count > 1 {
        let inc = pos[s_count][1] > pos[0][1];
        for s in 0..s_count {
            for t in 1..t_count {
                let (a, b) = (pos[(t - 1) * s_count + s][1], pos[t * s_count + s][1]);
                if !strictly(a, b, inc) {
                    return Err(Error::InvalidParams("camera y not monotonic along t"));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(s: usize, t: usize) -> LightFieldGrid {
        LightFieldGrid::new(s, t, vec![RgbImage::new(4, 4); s * t]).unwrap()
    }

    #[test]
    fn regular_positions_are_grid_indices() {
        let g = grid(16, 16);
        assert_eq!(camera_position(&g, 3, 5).unwrap(), [3.0, 5.0]);
        assert_eq!(camera_position(&g, 0, 0).unwrap(), [0.0, 0.0]);
        assert_eq!(camera_position(&g, 16, 0), Err(Error::IndexOutOfRange));
    }

    #[test]
    fn stored_positions_are_returned_verbatim() {
        let pos = vec![[0.0, 0.0], [0.37, 0.01], [0.02, 1.9], [0.5, 2.25]];
        let g = LightFieldGrid::with_layout(
            2,
            2,
            vec![RgbImage::new(2, 2); 4],
            pos.clone(),
            PlaneGeometry::regular(2, 2),
        )
        .unwrap();
        assert_eq!(camera_position(&g, 1, 1).unwrap(), [0.5, 2.25]);
    }

    #[test]
    fn rejects_non_monotonic_positions() {
        let pos = vec![[0.0, 0.0], [0.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let r = LightFieldGrid::with_layout(
            2,
            2,
            vec![RgbImage::new(2, 2); 4],
            pos,
            PlaneGeometry::regular(2, 2),
        );
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn rejects_zero_grid_and_mixed_sizes() {
        assert_eq!(LightFieldGrid::new(0, 1, vec![]), Err(Error::ZeroSizedGrid));
        let imgs = vec![RgbImage::new(4, 4), RgbImage::new(2, 2)];
        assert_eq!(LightFieldGrid::new(2, 1, imgs), Err(Error::DimensionMismatch));
    }
}
