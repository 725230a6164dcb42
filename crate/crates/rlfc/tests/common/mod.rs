#![allow(dead_code)]

use std::path::PathBuf;

use rlfc::manifest::load_manifest;
use rlfc::png::StdCodecs;
use rlfc_core::{compress, CodecId, DecoderState, EncodingParams, LightFieldGrid};

pub fn synthetic_manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic/manifest.json")
}

/// The committed 8×8 grid of 64×64 images.
pub fn synthetic() -> LightFieldGrid {
    load_manifest(&synthetic_manifest()).expect("committed synthetic light field")
}

pub fn params(tb: u32, b: u8, s: u8, h: u8) -> EncodingParams {
    EncodingParams { block_threshold: tb, block_size: b, quant_shift: s, tree_height: h, ..Default::default() }
}

pub fn lossless_raw() -> EncodingParams {
    EncodingParams { root_codec: CodecId::Raw, ..EncodingParams::lossless() }
}

pub fn decoder(lf: &LightFieldGrid, p: &EncodingParams) -> DecoderState {
    let (stream, _) = compress(lf, p, &StdCodecs).unwrap();
    DecoderState::init(stream, &StdCodecs).unwrap()
}

pub fn mae(a: &[u8], b: &[u8]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x.abs_diff(y))).sum::<f64>() / a.len() as f64
}
