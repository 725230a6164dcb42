//! Quality reports and parameter sweeps.

use std::io::Write;

use rlfc_core::container::RootCodecs;
use rlfc_core::metrics::{bpp, psnr_ycocg, QualityReport};
use rlfc_core::{compress, DecoderState, EncodingParams, LightFieldGrid};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::parallel::decode_all;

/// Flat, serializable quality figures. Infinite PSNR serializes as `null`
/// in JSON and `inf` in CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityRow {
    pub bpp: f64,
    pub psnr_y: f64,
    pub psnr_co: f64,
    pub psnr_cg: f64,
    pub psnr_ycocg: f64,
    pub mse_y: f64,
    pub mse_co: f64,
    pub mse_cg: f64,
}

impl From<&QualityReport> for QualityRow {
    fn from(q: &QualityReport) -> Self {
        QualityRow {
            bpp: q.bpp.unwrap_or(f64::NAN),
            psnr_y: q.psnr_y,
            psnr_co: q.psnr_co,
            psnr_cg: q.psnr_cg,
            psnr_ycocg: q.psnr_ycocg,
            mse_y: q.mse[0],
            mse_co: q.mse[1],
            mse_cg: q.mse[2],
        }
    }
}

/// Decodes `state` fully and scores it against `reference`.
pub fn quality(state: &DecoderState, reference: &LightFieldGrid) -> CliResult<QualityReport> {
    let (sc, tc) = state.grid_dims();
    let (w, h) = state.image_dims();
    if (sc, tc, w, h) != (reference.s_count, reference.t_count, reference.width, reference.height) {
        return Err(CliError::Verification(format!(
            "stream is {sc}x{tc} of {w}x{h}, reference is {}x{} of {}x{}",
            reference.s_count, reference.t_count, reference.width, reference.height
        )));
    }
    let decoded = decode_all(state, 0)?;
    let mut q = psnr_ycocg(reference, &decoded)?;
    q.bpp = Some(bpp(state.stream().len(), reference.pixel_count()));
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    BlockThreshold,
    BlockSize,
    TreeHeight,
    QuantShift,
}

impl SweepParam {
    pub const NAMES: [&'static str; 4] = ["block_threshold", "block_size", "tree_height", "quant_shift"];

    /// Accepts `block_threshold` or `block-threshold`.
    pub fn parse(name: &str) -> Option<Self> {
        match name.replace('-', "_").as_str() {
            "block_threshold" => Some(SweepParam::BlockThreshold),
            "block_size" => Some(SweepParam::BlockSize),
            "tree_height" => Some(SweepParam::TreeHeight),
            "quant_shift" => Some(SweepParam::QuantShift),
            _ => None,
        }
    }

    pub fn apply(self, base: &EncodingParams, value: u32) -> Option<EncodingParams> {
        let mut p = *base;
        match self {
            SweepParam::BlockThreshold => p.block_threshold = value,
            SweepParam::BlockSize => p.block_size = u8::try_from(value).ok()?,
            SweepParam::TreeHeight => p.tree_height = u8::try_from(value).ok()?,
            SweepParam::QuantShift => p.quant_shift = u8::try_from(value).ok()?,
        }
        p.validate().ok().map(|_| p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<u32>,
    pub base: EncodingParams,
}

impl SweepSpec {
    pub fn new(param: SweepParam, values: Vec<u32>, base: EncodingParams) -> CliResult<Self> {
        if values.is_empty() {
            return Err(CliError::Usage("sweep needs at least one value".into()));
        }
        if let Some(v) = values.iter().find(|&&v| param.apply(&base, v).is_none()) {
            return Err(CliError::Usage(format!("value {v} is not valid for {param:?}")));
        }
        Ok(SweepSpec { param, values, base })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub param_value: u32,
    pub bpp: f64,
    pub psnr_y: f64,
    pub psnr_co: f64,
    pub psnr_cg: f64,
    pub psnr_ycocg: f64,
}

pub fn run_sweep(lf: &LightFieldGrid, spec: &SweepSpec, codecs: &dyn RootCodecs) -> CliResult<Vec<SweepRow>> {
    spec.values
        .iter()
        .map(|&v| {
            let params = spec.param.apply(&spec.base, v).expect("validated in SweepSpec::new");
            let (stream, _) = compress(lf, &params, codecs)?;
            let state = DecoderState::init(stream, codecs)?;
            let q = quality(&state, lf)?;
            Ok(SweepRow {
                param_value: v,
                bpp: q.bpp.unwrap_or(f64::NAN),
                psnr_y: q.psnr_y,
                psnr_co: q.psnr_co,
                psnr_cg: q.psnr_cg,
                psnr_ycocg: q.psnr_ycocg,
            })
        })
        .collect()
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
