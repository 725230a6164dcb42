//! Random-access decoding.
//!
//! [`DecoderState`] decodes the root RKVs once and otherwise keeps the stream
//! as bytes. A block request reads one offset, walks one record per channel
//! and sums the root block with the dequantized residuals of the image's
//! ancestor chain.

use alloc::vec::Vec;
use core::ops::Range;

use crate::bise::{bise_decode_into, unzigzag};
use crate::color::planes_to_image;
use crate::container::{
    decode_root, parse_header, parse_sections, ChannelSection, RecordCursor, RlfcHeader,
    RootCodecs, TreeLayout,
};
use crate::hierarchy::{dequantize, MAX_BLOCK_SIZE};
use crate::lf::{LightFieldGrid, RgbImage};
use crate::plane::Plane;
use crate::{Error, Result};

/// One decoded `size × size` block in raster order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub size: usize,
    data: [i32; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE],
}

impl Block {
    pub fn as_slice(&self) -> &[i32] {
        &self.data[..self.size * self.size]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.data[y * self.size + x]
    }
}

/// Observes which SRV bytes a decode touches.
pub trait ReadProbe {
    /// `range` is absolute within the stream.
    fn record_read(&mut self, channel: usize, range: Range<usize>);
}

impl ReadProbe for () {
    #[inline]
    fn record_read(&mut self, _: usize, _: Range<usize>) {}
}

/// Collects every SRV byte range read.
#[derive(Debug, Default, Clone)]
pub struct AccessTrace {
    pub reads: Vec<(usize, Range<usize>)>,
}

impl ReadProbe for AccessTrace {
    fn record_read(&mut self, channel: usize, range: Range<usize>) {
        self.reads.push((channel, range));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderState {
    header: RlfcHeader,
    layout: TreeLayout,
    stream: Vec<u8>,
    sections: [ChannelSection; 3],
    /// Root RKVs, row-major over the root grid, three channel planes each.
    roots: Vec<[Plane; 3]>,
}

impl DecoderState {
    pub fn init(stream: Vec<u8>, codecs: &dyn RootCodecs) -> Result<Self> {
        let header = parse_header(&stream)?;
        let sections = parse_sections(&stream, &header)?;
        let layout = header.layout();
        let (w, h) = header.dims();
        let codec = header.params.root_codec;
        let mut roots = Vec::with_capacity(sections[0].roots.len());
        for i in 0..sections[0].roots.len() {
            let planes: [Plane; 3] = [
                decode_root(&stream[sections[0].roots[i].clone()], 0, codec, w, h, codecs)?,
                decode_root(&stream[sections[1].roots[i].clone()], 1, codec, w, h, codecs)?,
                decode_root(&stream[sections[2].roots[i].clone()], 2, codec, w, h, codecs)?,
            ];
            roots.push(planes);
        }
        Ok(DecoderState { header, layout, stream, sections, roots })
    }

    pub fn header(&self) -> &RlfcHeader {
        &self.header
    }

    pub fn layout(&self) -> &TreeLayout {
        &self.layout
    }

    pub fn stream(&self) -> &[u8] {
        &self.stream
    }

    pub fn section(&self, channel: usize) -> &ChannelSection {
        &self.sections[channel]
    }

    pub fn block_size(&self) -> usize {
        usize::from(self.header.params.block_size)
    }

    pub fn tree_height(&self) -> u8 {
        self.header.params.tree_height
    }

    pub fn grid_dims(&self) -> (usize, usize) {
        (self.header.s_count.into(), self.header.t_count.into())
    }

    pub fn image_dims(&self) -> (usize, usize) {
        self.header.dims()
    }

    pub fn block_grid(&self) -> (usize, usize) {
        self.header.block_grid()
    }

    pub fn root_plane(&self, rx: usize, ry: usize, channel: usize) -> &Plane {
        let cols = self.layout.root_dims().0;
        &self.roots[ry * cols + rx][channel]
    }

    pub fn decode_block(
        &self,
        image: (usize, usize),
        block: (usize, usize),
        channel: usize,
    ) -> Result<Block> {
        self.decode_block_probed(image, block, channel, 0, &mut ())
    }

    /// Sums the root block and residuals of levels `>= stop_level` only.
    /// `stop_level == h` yields the root RKV block, `0` the full decode.
    pub fn decode_block_progressive(
        &self,
        image: (usize, usize),
        block: (usize, usize),
        channel: usize,
        stop_level: u8,
    ) -> Result<Block> {
        self.decode_block_probed(image, block, channel, stop_level, &mut ())
    }

    pub fn decode_block_probed<P: ReadProbe>(
        &self,
        (s, t): (usize, usize),
        (bx, by): (usize, usize),
        channel: usize,
        stop_level: u8,
        probe: &mut P,
    ) -> Result<Block> {
        let (sc, tc) = self.grid_dims();
        let (bc, br) = self.block_grid();
        let h = self.tree_height();
        if s >= sc || t >= tc || bx >= bc || by >= br || channel >= 3 || stop_level > h {
            return Err(Error::IndexOutOfRange);
        }
        let size = self.block_size();
        let n = size * size;
        let mut out = Block { size, data: [0; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE] };
        self.root_plane(s >> h, t >> h, channel).read_block(bx, by, size, &mut out.data[..n]);
        if stop_level == h {
            return Ok(out);
        }

        let range = self.sections[channel].record_range(by * bc + bx);
        let record = &self.stream[range.clone()];
        let mut cursor = RecordCursor::new(record, &self.layout, n)?;
        let shift = self.header.params.quant_shift;
        let mut zz = [0u16; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE];
        for l in (stop_level..h).rev() {
            let li = usize::from(l);
            let node = self.layout.level_start[li] + (t >> l) * self.layout.dims[li].0 + (s >> l);
            let Some(slot) = cursor.seek(node)? else { continue };
            bise_decode_into(&record[slot.payload], slot.descriptor, &mut zz[..n])?;
            for (o, &z) in out.data[..n].iter_mut().zip(&zz[..n]) {
                *o += dequantize(unzigzag(z.into()), shift);
            }
        }
        probe.record_read(channel, range.start..range.start + cursor.consumed());
        Ok(out)
    }

    /// One channel of one image at true size.
    pub fn decode_plane(&self, image: (usize, usize), channel: usize, stop_level: u8) -> Result<Plane> {
        let (w, h) = self.image_dims();
        let (bc, br) = self.block_grid();
        let size = self.block_size();
        let mut plane = Plane::new(w, h);
        for by in 0..br {
            for bx in 0..bc {
                let blk = self.decode_block_progressive(image, (bx, by), channel, stop_level)?;
                for dy in 0..size {
                    let y = by * size + dy;
                    if y >= h {
                        break;
                    }
                    for dx in 0..size {
                        let x = bx * size + dx;
                        if x < w {
                            plane.set(x, y, blk.get(dx, dy) as i16);
                        }
                    }
                }
            }
        }
        Ok(plane)
    }

    pub fn decode_planes(&self, image: (usize, usize), stop_level: u8) -> Result<[Plane; 3]> {
        Ok([
            self.decode_plane(image, 0, stop_level)?,
            self.decode_plane(image, 1, stop_level)?,
            self.decode_plane(image, 2, stop_level)?,
        ])
    }

    pub fn decode_image(&self, image: (usize, usize)) -> Result<RgbImage> {
        self.decode_image_progressive(image, 0)
    }

    pub fn decode_image_progressive(&self, image: (usize, usize), stop_level: u8) -> Result<RgbImage> {
        let planes = self.decode_planes(image, stop_level)?;
        let (w, h) = self.image_dims();
        Ok(planes_to_image(&planes, w, h))
    }

    /// Full decode onto a regular camera grid.
    pub fn decode_all(&self) -> Result<LightFieldGrid> {
        let (sc, tc) = self.grid_dims();
        let mut images = Vec::with_capacity(sc * tc);
        for t in 0..tc {
            for s in 0..sc {
                images.push(self.decode_image((s, t))?);
            }
        }
        LightFieldGrid::new(sc, tc, images)
    }
}
