//! Rate and quality measurement.
//!
//! PSNR uses a peak of 255 for every channel. A light field's figure is the
//! mean of its per-image PSNRs. Exact reconstructions have infinite PSNR,
//! reported as `f64::INFINITY`; when only some images are exact, those are
//! counted as [`PSNR_CAP`] dB so the average stays finite.

use alloc::vec::Vec;

use crate::color::image_to_planes;
use crate::lf::LightFieldGrid;
use crate::plane::Plane;
use crate::{Error, Result};

pub const PSNR_INF: f64 = f64::INFINITY;
pub const PSNR_CAP: f64 = 99.0;
const PEAK2: f64 = 255.0 * 255.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub psnr_y: f64,
    pub psnr_co: f64,
    pub psnr_cg: f64,
    pub psnr_ycocg: f64,
    /// Mean over images of the per-image MSE, per channel.
    pub mse: [f64; 3],
    pub bpp: Option<f64>,
}

pub fn mse(reference: &Plane, test: &Plane) -> Result<f64> {
    if !reference.same_dims(test) {
        return Err(Error::DimensionMismatch);
    }
    let sum: u64 = reference
        .data
        .iter()
        .zip(&test.data)
        .map(|(&a, &b)| {
            let d = i64::from(a) - i64::from(b);
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / reference.data.len() as f64)
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        PSNR_INF
    } else {
        10.0 * libm::log10(PEAK2 / mse)
    }
}

pub fn psnr_channel(reference: &Plane, test: &Plane) -> Result<f64> {
    Ok(psnr_from_mse(mse(reference, test)?))
}

/// Mean of per-image PSNRs with the infinity rule described above.
pub fn average_psnr(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().all(|v| v.is_infinite()) {
        return PSNR_INF;
    }
    values.iter().map(|&v| if v.is_infinite() { PSNR_CAP } else { v }).sum::<f64>()
        / values.len() as f64
}

/// `(6·Y + Co + Cg) / 8`.
pub fn combine_ycocg(y: f64, co: f64, cg: f64) -> f64 {
    (6.0 * y + co + cg) / 8.0
}

pub fn psnr_ycocg(reference: &LightFieldGrid, test: &LightFieldGrid) -> Result<QualityReport> {
    if reference.s_count != test.s_count
        || reference.t_count != test.t_count
        || reference.width != test.width
        || reference.height != test.height
    {
        return Err(Error::DimensionMismatch);
    }
    let mut per_channel: [Vec<f64>; 3] = Default::default();
    let mut mse_sum = [0.0; 3];
    for (a, b) in reference.images.iter().zip(&test.images) {
        let (pa, pb) = (image_to_planes(a), image_to_planes(b));
        for c in 0..3 {
            let m = mse(&pa[c], &pb[c])?;
            mse_sum[c] += m;
            per_channel[c].push(psnr_from_mse(m));
        }
    }
    let n = reference.images.len() as f64;
    let [y, co, cg] = [0, 1, 2].map(|c| average_psnr(&per_channel[c]));
    Ok(QualityReport {
        psnr_y: y,
        psnr_co: co,
        psnr_cg: cg,
        psnr_ycocg: combine_ycocg(y, co, cg),
        mse: mse_sum.map(|s| s / n),
        bpp: None,
    })
}

/// Bits per light-field pixel.
pub fn bpp(stream_bytes: usize, pixels: u64) -> f64 {
    8.0 * stream_bytes as f64 / pixels as f64
}
