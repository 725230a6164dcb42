//! Multi-threaded drivers over the single-threaded core.

use rayon::prelude::*;
use rlfc_core::render::{render_rows, CameraPose, DecodedSource, LightSlab, RenderOptions};
use rlfc_core::{DecoderState, LightFieldGrid, Result, RgbImage};

/// Minimum rows per render band; each band owns its block memo.
const MIN_BAND_ROWS: usize = 16;

pub fn decode_all(state: &DecoderState, stop_level: u8) -> Result<LightFieldGrid> {
    let (sc, tc) = state.grid_dims();
    let images = (0..sc * tc)
        .into_par_iter()
        .map(|i| state.decode_image_progressive((i % sc, i / sc), stop_level))
        .collect::<Result<Vec<_>>>()?;
    LightFieldGrid::new(sc, tc, images)
}

/// Output of a banded render plus how many distinct blocks were decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub image: RgbImage,
    pub decoded_blocks: usize,
}

pub fn render_view(
    state: &DecoderState,
    slab: &LightSlab,
    pose: &CameraPose,
    opts: &RenderOptions,
) -> Result<Rendered> {
    let mut image = RgbImage::new(pose.width, pose.height);
    let row_bytes = pose.width * 3;
    // About two bands per worker keeps duplicate block decodes at band edges low.
    let band_rows = pose.height.div_ceil(2 * rayon::current_num_threads()).max(MIN_BAND_ROWS);
    let decoded = image
        .data
        .par_chunks_mut(band_rows * row_bytes)
        .enumerate()
        .map(|(band, out)| {
            let start = band * band_rows;
            let rows = start..start + out.len() / row_bytes;
            let mut src = DecodedSource::new(state, opts.stop_level)?;
            render_rows(&mut src, slab, pose, opts, rows, out)?;
            Ok(src.decoded_blocks())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Rendered { image, decoded_blocks: decoded.iter().sum() })
}
