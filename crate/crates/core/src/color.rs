//! Lossless YCoCg-R lifting transform.
//!
//! The half-steps use an arithmetic right shift, which floors toward −∞ and
//! keeps the transform exactly invertible for negative intermediates.

use crate::lf::RgbImage;
use crate::plane::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YCoCgPixel {
    pub y: i32,
    pub co: i32,
    pub cg: i32,
}

/// Bias applied to chroma samples before they reach an unsigned root codec.
pub const CHROMA_BIAS: i32 = 256;

#[inline]
pub fn rgb_to_ycocgr(r: u8, g: u8, b: u8) -> YCoCgPixel {
    let (r, g, b) = (i32::from(r), i32::from(g), i32::from(b));
    let co = r - b;
    let t = b + (co >> 1);
    let cg = g - t;
    let y = t + (cg >> 1);
    YCoCgPixel { y, co, cg }
}

/// Inverse of [`rgb_to_ycocgr`]. Returns unclamped components; pixels that
/// came from the forward transform always land in `[0, 255]`.
#[inline]
pub fn ycocgr_to_rgb_i32(p: YCoCgPixel) -> (i32, i32, i32) {
    let t = p.y - (p.cg >> 1);
    let g = p.cg + t;
    let b = t - (p.co >> 1);
    let r = b + p.co;
    (r, g, b)
}

/// Inverse transform, saturating to 8 bits for lossy reconstructions.
#[inline]
pub fn ycocgr_to_rgb(p: YCoCgPixel) -> (u8, u8, u8) {
    let (r, g, b) = ycocgr_to_rgb_i32(p);
    (clamp_u8(r), clamp_u8(g), clamp_u8(b))
}

#[inline]
fn clamp_u8(v: i32) -> u8 {
    v.clamp(0, 255) as u8
}

/// Splits an RGB image into Y, Co, Cg planes.
pub fn image_to_planes(img: &RgbImage) -> [Plane; 3] {
    let (w, h) = (img.width, img.height);
    let mut out = [Plane::new(w, h), Plane::new(w, h), Plane::new(w, h)];
    for (i, px) in img.data.chunks_exact(3).enumerate() {
        let p = rgb_to_ycocgr(px[0], px[1], px[2]);
        out[0].data[i] = p.y as i16;
        out[1].data[i] = p.co as i16;
        out[2].data[i] = p.cg as i16;
    }
    out
}

/// Recombines Y, Co, Cg planes into an RGB image, cropping to `width`×`height`
/// when the planes are larger.
pub fn planes_to_image(planes: &[Plane; 3], width: usize, height: usize) -> RgbImage {
    let mut img = RgbImage::new(width, height);
    for y in 0..height {
        for x in 0..width {
            let p = YCoCgPixel {
                y: planes[0].get(x, y).into(),
                co: planes[1].get(x, y).into(),
                cg: planes[2].get(x, y).into(),
            };
            let (r, g, b) = ycocgr_to_rgb(p);
            img.put(x, y, [r, g, b]);
        }
    }
    img
}
