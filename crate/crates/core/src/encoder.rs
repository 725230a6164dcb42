use alloc::vec::Vec;
use core::time::Duration;

use crate::container::{parse_header, parse_sections, serialize, RootCodecs, HEADER_LEN};
use crate::hierarchy::{build_rkv_tree, build_srv_tree, EncodingParams};
use crate::lf::LightFieldGrid;
use crate::metrics::bpp;
use crate::plane::Plane;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeReport {
    pub stream_bytes: usize,
    /// Per-channel section bits over total light-field pixels.
    pub bpp_channels: [f64; 3],
    /// Whole stream, header included.
    pub bpp_total: f64,
    /// PRESENT blocks per SRV level (index = level), all channels.
    pub present_per_level: Vec<usize>,
    /// Total root-stream bytes per channel, length prefixes included.
    pub root_bytes: [usize; 3],
    /// Filled in by callers that have a clock.
    pub encode_time: Option<Duration>,
}

/// Encoder output plus the planes any decoder will reconstruct.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub stream: Vec<u8>,
    pub report: EncodeReport,
    /// YCoCg-R planes per image, row-major over the camera grid.
    pub reconstruction: Vec<[Plane; 3]>,
}

pub fn compress(
    lf: &LightFieldGrid,
    params: &EncodingParams,
    codecs: &dyn RootCodecs,
) -> Result<(Vec<u8>, EncodeReport)> {
    let e = compress_full(lf, params, codecs)?;
    Ok((e.stream, e.report))
}

pub fn compress_full(
    lf: &LightFieldGrid,
    params: &EncodingParams,
    codecs: &dyn RootCodecs,
) -> Result<Encoded> {
    let tree = build_rkv_tree(lf, params)?;
    let (srv, reconstruction) = build_srv_tree(&tree, params)?;
    let roots: Vec<[Plane; 3]> = tree.roots().nodes.iter().map(|n| n.planes.clone()).collect();
    drop(tree);
    let stream =
        serialize(&roots, &srv, lf.s_count, lf.t_count, lf.width, lf.height, params, codecs)?;

    let header = parse_header(&stream)?;
    let sections = parse_sections(&stream, &header)?;
    let pixels = lf.pixel_count();
    let root_bytes = core::array::from_fn(|c| {
        sections[c].roots.iter().map(|r| r.end - r.start + 4).sum::<usize>()
    });
    let report = EncodeReport {
        stream_bytes: stream.len(),
        bpp_channels: core::array::from_fn(|c| bpp(header.section_lengths[c] as usize, pixels)),
        bpp_total: bpp(stream.len(), pixels),
        present_per_level: srv.present_counts(),
        root_bytes,
        encode_time: None,
    };
    debug_assert!(stream.len() > HEADER_LEN);
    Ok(Encoded { stream, report, reconstruction })
}
