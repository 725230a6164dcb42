use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// One channel of one view, row-major signed samples.
///
/// Luma fits `[0, 255]`, chroma `[-255, 255]` and residuals roughly twice
/// that, so `i16` covers every plane the codec produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<i16>,
}

impl Plane {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: i16) -> Self {
        Plane { width, height, data: vec![value; width * height] }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<i16>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch);
        }
        Ok(Plane { width, height, data })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i16 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: i16) {
        self.data[y * self.width + x] = v;
    }

    pub fn same_dims(&self, other: &Plane) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Copies the `size`×`size` block at block coordinates `(bx, by)` into
    /// `out`, reading zero outside the plane.
    pub fn read_block(&self, bx: usize, by: usize, size: usize, out: &mut [i32]) {
        let x0 = bx * size;
        let y0 = by * size;
        for dy in 0..size {
            let y = y0 + dy;
            let row = &mut out[dy * size..(dy + 1) * size];
            if y >= self.height {
                row.fill(0);
                continue;
            }
            for (dx, o) in row.iter_mut().enumerate() {
                let x = x0 + dx;
                *o = if x < self.width { i32::from(self.get(x, y)) } else { 0 };
            }
        }
    }
}
