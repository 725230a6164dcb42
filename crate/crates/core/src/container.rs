//! The `.rlfc` stream.
//!
//! ```text
//! header (64 bytes)
//! for channel in [Y, Co, Cg]:
//!     root stream    for each root RKV (row-major): u32 length ∥ codec bytes
//!     block offsets  u64 per block location, relative to the SRV stream
//!     SRV stream     one record per block location, row-major
//! ```
//!
//! A record is a presence bitmap over all SRV nodes in BFS order (bit `i`
//! of the bitmap, LSB-first, set when node `i` stores this block), followed
//! by `descriptor byte ∥ BISE payload` for each present node in BFS order.
//! BFS order visits level `h-1` first, row-major within a level, down to
//! level 0. All integers are little-endian.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::bise::{
    bise_decode_into, bise_encode_into, payload_bytes, unzigzag, zigzag, BitWriter,
    RangeDescriptor,
};
use crate::color::CHROMA_BIAS;
use crate::hierarchy::{
    level_dims, EncodingParams, FilterKind, FilterSpec, SrvChannel, SrvLevel, SrvNode, SrvTree,
    MAX_BLOCK_SIZE,
};
use crate::plane::Plane;
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"RLFC";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecId {
    Raw,
    Png,
    Jpeg2000,
}

impl CodecId {
    pub fn id(self) -> u8 {
        match self {
            CodecId::Raw => 0,
            CodecId::Png => 1,
            CodecId::Jpeg2000 => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(CodecId::Raw),
            1 => Ok(CodecId::Png),
            2 => Ok(CodecId::Jpeg2000),
            other => Err(Error::UnsupportedCodec(other)),
        }
    }
}

/// A lossless codec for unsigned 16-bit single-channel planes.
pub trait RootCodec {
    fn encode(&self, samples: &[u16], width: usize, height: usize) -> Result<Vec<u8>>;
    fn decode(&self, bytes: &[u8], width: usize, height: usize) -> Result<Vec<u16>>;
}

/// Resolves codec ids to implementations available in this build.
pub trait RootCodecs {
    fn codec(&self, id: CodecId) -> Option<&dyn RootCodec>;
}

/// Little-endian row-major samples.
#[derive(Debug, Default, Clone, Copy)]
pub struct RawCodec;

impl RootCodec for RawCodec {
    fn encode(&self, samples: &[u16], width: usize, height: usize) -> Result<Vec<u8>> {
        if samples.len() != width * height {
            return Err(Error::DimensionMismatch);
        }
        Ok(samples.iter().flat_map(|s| s.to_le_bytes()).collect())
    }

    fn decode(&self, bytes: &[u8], width: usize, height: usize) -> Result<Vec<u16>> {
        if bytes.len() != width * height * 2 {
            return Err(Error::Codec("raw root size does not match header dims"));
        }
        Ok(bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect())
    }
}

/// Registry offering only [`RawCodec`].
#[derive(Debug, Default, Clone, Copy)]
pub struct RawOnly;

impl RootCodecs for RawOnly {
    fn codec(&self, id: CodecId) -> Option<&dyn RootCodec> {
        match id {
            CodecId::Raw => Some(&RawCodec),
            _ => None,
        }
    }
}

fn channel_bias(channel: usize) -> i32 {
    if channel == 0 {
        0
    } else {
        CHROMA_BIAS
    }
}

/// Encodes one root plane; chroma channels are biased into unsigned range.
pub fn encode_root(
    plane: &Plane,
    channel: usize,
    codec: CodecId,
    codecs: &dyn RootCodecs,
) -> Result<Vec<u8>> {
    let imp = codecs.codec(codec).ok_or(Error::UnsupportedCodec(codec.id()))?;
    let bias = channel_bias(channel);
    let samples = plane
        .data
        .iter()
        .map(|&v| u16::try_from(i32::from(v) + bias).map_err(|_| Error::Codec("root sample out of range")))
        .collect::<Result<Vec<u16>>>()?;
    imp.encode(&samples, plane.width, plane.height)
}

pub fn decode_root(
    bytes: &[u8],
    channel: usize,
    codec: CodecId,
    width: usize,
    height: usize,
    codecs: &dyn RootCodecs,
) -> Result<Plane> {
    let imp = codecs.codec(codec).ok_or(Error::UnsupportedCodec(codec.id()))?;
    let samples = imp.decode(bytes, width, height)?;
    if samples.len() != width * height {
        return Err(Error::Codec("decoded root size does not match header dims"));
    }
    let bias = channel_bias(channel);
    let data = samples
        .iter()
        .map(|&s| i16::try_from(i32::from(s) - bias).map_err(|_| Error::Codec("root sample out of range")))
        .collect::<Result<Vec<i16>>>()?;
    Plane::from_vec(width, height, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RlfcHeader {
    pub version: u16,
    pub s_count: u16,
    pub t_count: u16,
    pub width: u32,
    pub height: u32,
    pub params: EncodingParams,
    /// Byte length of each channel section (Y, Co, Cg).
    pub section_lengths: [u64; 3],
}

impl RlfcHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let p = &self.params;
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4..6].copy_from_slice(&self.version.to_le_bytes());
        b[6..8].copy_from_slice(&self.s_count.to_le_bytes());
        b[8..10].copy_from_slice(&self.t_count.to_le_bytes());
        b[10] = p.tree_height;
        b[11] = p.block_size;
        b[12..16].copy_from_slice(&self.width.to_le_bytes());
        b[16..20].copy_from_slice(&self.height.to_le_bytes());
        b[20] = p.quant_shift;
        b[21] = p.filter.kind.id();
        b[22..24].copy_from_slice(&p.filter.sigma_q8.to_le_bytes());
        b[24..26].copy_from_slice(&p.pixel_threshold.to_le_bytes());
        b[26] = p.root_codec.id();
        b[28..32].copy_from_slice(&p.block_threshold.to_le_bytes());
        for (c, len) in self.section_lengths.iter().enumerate() {
            b[32 + 8 * c..40 + 8 * c].copy_from_slice(&len.to_le_bytes());
        }
        b
    }

    pub fn image_count(&self) -> usize {
        usize::from(self.s_count) * usize::from(self.t_count)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width as usize, self.height as usize)
    }

    pub fn block_grid(&self) -> (usize, usize) {
        let b = usize::from(self.params.block_size);
        ((self.width as usize).div_ceil(b), (self.height as usize).div_ceil(b))
    }

    pub fn layout(&self) -> TreeLayout {
        TreeLayout::new(self.s_count.into(), self.t_count.into(), self.params.tree_height)
    }
}

fn le_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn le_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn le_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn parse_header(bytes: &[u8]) -> Result<RlfcHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated { needed: HEADER_LEN, available: bytes.len() });
    }
    let b = &bytes[..HEADER_LEN];
    if b[0..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = le_u16(b, 4);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    if b[27] != 0 || b[56..64].iter().any(|&x| x != 0) {
        return Err(Error::Format("reserved header bytes are not zero"));
    }
    let params = EncodingParams {
        tree_height: b[10],
        block_size: b[11],
        quant_shift: b[20],
        filter: FilterSpec { kind: FilterKind::from_id(b[21])?, sigma_q8: le_u16(b, 22) },
        pixel_threshold: le_u16(b, 24),
        root_codec: CodecId::from_id(b[26])?,
        block_threshold: le_u32(b, 28),
    };
    params.validate().map_err(|_| Error::Format("header carries invalid parameters"))?;
    let header = RlfcHeader {
        version,
        s_count: le_u16(b, 6),
        t_count: le_u16(b, 8),
        width: le_u32(b, 12),
        height: le_u32(b, 16),
        params,
        section_lengths: [le_u64(b, 32), le_u64(b, 40), le_u64(b, 48)],
    };
    if header.s_count == 0 || header.t_count == 0 || header.width == 0 || header.height == 0 {
        return Err(Error::Format("zero grid or image dimension"));
    }
    Ok(header)
}

/// Node geometry of the SRV tree and its BFS linearization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLayout {
    pub s_count: usize,
    pub t_count: usize,
    pub height: u8,
    /// Grid dims of every level `0..=height`.
    pub dims: Vec<(usize, usize)>,
    /// BFS index of the first node of each SRV level `0..height`.
    pub level_start: Vec<usize>,
    pub node_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainLink {
    pub level: u8,
    pub x: usize,
    pub y: usize,
    pub bfs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AncestorChain {
    /// SRV ancestors from level `h-1` down to the image's own level-0 node.
    pub links: Vec<ChainLink>,
    pub root: (usize, usize),
}

impl TreeLayout {
    pub fn new(s_count: usize, t_count: usize, height: u8) -> Self {
        let dims: Vec<_> = (0..=height).map(|l| level_dims(s_count, t_count, l)).collect();
        let mut level_start = vec![0; height as usize];
        let mut acc = 0;
        for l in (0..height as usize).rev() {
            level_start[l] = acc;
            acc += dims[l].0 * dims[l].1;
        }
        TreeLayout { s_count, t_count, height, dims, level_start, node_count: acc }
    }

    pub fn bitmap_len(&self) -> usize {
        self.node_count.div_ceil(8)
    }

    pub fn root_dims(&self) -> (usize, usize) {
        self.dims[self.height as usize]
    }

    pub fn bfs_index(&self, level: u8, x: usize, y: usize) -> Result<usize> {
        if level >= self.height {
            return Err(Error::IndexOutOfRange);
        }
        let (cols, rows) = self.dims[level as usize];
        if x >= cols || y >= rows {
            return Err(Error::IndexOutOfRange);
        }
        Ok(self.level_start[level as usize] + y * cols + x)
    }

    pub fn ancestors(&self, s: usize, t: usize) -> Result<AncestorChain> {
        if s >= self.s_count || t >= self.t_count {
            return Err(Error::IndexOutOfRange);
        }
        let links = (0..self.height)
            .rev()
            .map(|l| {
                let (x, y) = (s >> l, t >> l);
                ChainLink { level: l, x, y, bfs: self.level_start[l as usize] + y * self.dims[l as usize].0 + x }
            })
            .collect();
        Ok(AncestorChain { links, root: (s >> self.height, t >> self.height) })
    }
}

/// Byte range of one present node's data inside a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSlot {
    pub descriptor: RangeDescriptor,
    /// Payload bytes, not including the descriptor byte.
    pub payload: Range<usize>,
}

/// Forward-only walker over one block-location record.
///
/// Seeking to node `n` skips every earlier present node by reading only its
/// descriptor byte. Successive seeks must use increasing node indices.
#[derive(Debug, Clone)]
pub struct RecordCursor<'a> {
    record: &'a [u8],
    bitmap_len: usize,
    block_len: usize,
    next_node: usize,
    pos: usize,
}

impl<'a> RecordCursor<'a> {
    pub fn new(record: &'a [u8], layout: &TreeLayout, block_len: usize) -> Result<Self> {
        let bitmap_len = layout.bitmap_len();
        if record.len() < bitmap_len {
            return Err(Error::Format("record shorter than its bitmap"));
        }
        Ok(RecordCursor { record, bitmap_len, block_len, next_node: 0, pos: bitmap_len })
    }

    #[inline]
    pub fn is_present(&self, node: usize) -> bool {
        self.record[node >> 3] >> (node & 7) & 1 == 1
    }

    fn slot_at(&self, pos: usize) -> Result<NodeSlot> {
        let &d = self.record.get(pos).ok_or(Error::Format("offset past section end"))?;
        let descriptor = RangeDescriptor::from_index(d)?;
        let end = pos + 1 + payload_bytes(descriptor, self.block_len);
        if end > self.record.len() {
            return Err(Error::Format("offset past section end"));
        }
        Ok(NodeSlot { descriptor, payload: pos + 1..end })
    }

    pub fn seek(&mut self, node: usize) -> Result<Option<NodeSlot>> {
        debug_assert!(node >= self.next_node, "record cursor only moves forward");
        debug_assert!(node < self.bitmap_len * 8);
        while self.next_node < node {
            if self.is_present(self.next_node) {
                self.pos = self.slot_at(self.pos)?.payload.end;
            }
            self.next_node += 1;
        }
        if !self.is_present(node) {
            return Ok(None);
        }
        let slot = self.slot_at(self.pos)?;
        self.pos = slot.payload.end;
        self.next_node = node + 1;
        Ok(Some(slot))
    }

    /// Bytes consumed so far (bitmap included).
    pub fn consumed(&self) -> usize {
        self.pos
    }
}

/// Finds node `node`'s payload within one record.
pub fn locate_block(
    record: &[u8],
    layout: &TreeLayout,
    block_len: usize,
    node: usize,
) -> Result<Option<NodeSlot>> {
    if node >= layout.node_count {
        return Err(Error::IndexOutOfRange);
    }
    RecordCursor::new(record, layout, block_len)?.seek(node)
}

/// Byte ranges of one channel's section inside the full stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelSection {
    /// One entry per root RKV, row-major.
    pub roots: Vec<Range<usize>>,
    pub offsets: Vec<u64>,
    /// Absolute range of the SRV stream.
    pub srv: Range<usize>,
}

impl ChannelSection {
    /// Absolute byte range of block location `blk`'s record.
    pub fn record_range(&self, blk: usize) -> Range<usize> {
        let start = self.srv.start + self.offsets[blk] as usize;
        let end = match self.offsets.get(blk + 1) {
            Some(&next) => self.srv.start + next as usize,
            None => self.srv.end,
        };
        start..end
    }
}

/// Splits a stream into its channel sections, validating every length.
pub fn parse_sections(bytes: &[u8], header: &RlfcHeader) -> Result<[ChannelSection; 3]> {
    let layout = header.layout();
    let (rc, rr) = layout.root_dims();
    let (bc, br) = header.block_grid();
    let nblocks = bc * br;
    let mut pos = HEADER_LEN;
    let mut sections = Vec::with_capacity(3);
    for &len in &header.section_lengths {
        let end = usize::try_from(len)
            .ok()
            .and_then(|l| pos.checked_add(l))
            .ok_or(Error::Format("section length overflow"))?;
        if end > bytes.len() {
            return Err(Error::Truncated { needed: end, available: bytes.len() });
        }
        let mut roots = Vec::with_capacity(rc * rr);
        for _ in 0..rc * rr {
            if pos + 4 > end {
                return Err(Error::Format("root stream runs past its section"));
            }
            let n = le_u32(bytes, pos) as usize;
            let r = pos + 4..pos + 4 + n;
            if r.end > end {
                return Err(Error::Format("root stream runs past its section"));
            }
            pos = r.end;
            roots.push(r);
        }
        let off_end = pos + nblocks * 8;
        if off_end > end {
            return Err(Error::Format("offset array runs past its section"));
        }
        let offsets: Vec<u64> = (0..nblocks).map(|i| le_u64(bytes, pos + 8 * i)).collect();
        let srv = off_end..end;
        let srv_len = (srv.end - srv.start) as u64;
        if offsets.first().is_some_and(|&o| o != 0)
            || offsets.windows(2).any(|w| w[1] <= w[0])
            || offsets.last().is_some_and(|&o| o >= srv_len)
        {
            return Err(Error::Format("block offsets not strictly increasing within the SRV stream"));
        }
        sections.push(ChannelSection { roots, offsets, srv });
        pos = end;
    }
    if pos != bytes.len() {
        return Err(Error::Format("trailing bytes after last section"));
    }
    Ok(sections.try_into().ok().expect("three channel sections"))
}

/// Serializes root RKVs (row-major, three channel planes each) and the SRV
/// tree into a complete stream.
pub fn serialize(
    roots: &[[Plane; 3]],
    srv: &SrvTree,
    s_count: usize,
    t_count: usize,
    width: usize,
    height: usize,
    params: &EncodingParams,
    codecs: &dyn RootCodecs,
) -> Result<Vec<u8>> {
    params.validate()?;
    let layout = TreeLayout::new(s_count, t_count, params.tree_height);
    let (rc, rr) = layout.root_dims();
    if roots.len() != rc * rr || srv.levels.len() != layout.height as usize {
        return Err(Error::DimensionMismatch);
    }
    let b = usize::from(params.block_size);
    let (bc, br) = (width.div_ceil(b), height.div_ceil(b));
    let block_len = b * b;
    let mut header = RlfcHeader {
        version: VERSION,
        s_count: u16::try_from(s_count).map_err(|_| Error::InvalidParams("grid too large"))?,
        t_count: u16::try_from(t_count).map_err(|_| Error::InvalidParams("grid too large"))?,
        width: width as u32,
        height: height as u32,
        params: *params,
        section_lengths: [0; 3],
    };
    // BFS-ordered view of the nodes.
    let nodes: Vec<&SrvNode> =
        (0..layout.height as usize).rev().flat_map(|l| srv.levels[l].nodes.iter()).collect();
    if nodes.len() != layout.node_count {
        return Err(Error::DimensionMismatch);
    }
    let mut out = Vec::new();
    out.extend_from_slice(&header.to_bytes());
    for c in 0..3 {
        let section_start = out.len();
        for root in roots {
            let bytes = encode_root(&root[c], c, params.root_codec, codecs)?;
            out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            out.extend_from_slice(&bytes);
        }
        let offsets_at = out.len();
        out.resize(offsets_at + bc * br * 8, 0);
        let srv_start = out.len();
        let mut cursors = vec![0usize; nodes.len()];
        let mut zz = [0u16; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE];
        for blk in 0..bc * br {
            let offset = (out.len() - srv_start) as u64;
            out[offsets_at + blk * 8..offsets_at + blk * 8 + 8].copy_from_slice(&offset.to_le_bytes());
            let bitmap_at = out.len();
            out.resize(bitmap_at + layout.bitmap_len(), 0);
            for (i, node) in nodes.iter().enumerate() {
                let chan = &node.channels[c];
                let cur = &mut cursors[i];
                if *cur >= chan.present.len() || chan.present[*cur] as usize != blk {
                    continue;
                }
                out[bitmap_at + (i >> 3)] |= 1 << (i & 7);
                let desc = chan.descriptors[*cur];
                let q = &chan.values[*cur * block_len..(*cur + 1) * block_len];
                for (z, &v) in zz.iter_mut().zip(q) {
                    *z = zigzag(v.into()) as u16;
                }
                out.push(desc.table_index);
                let mut w = BitWriter::new();
                bise_encode_into(&zz[..block_len], desc, &mut w)?;
                out.extend_from_slice(&w.finish());
                *cur += 1;
            }
        }
        header.section_lengths[c] = (out.len() - section_start) as u64;
    }
    out[..HEADER_LEN].copy_from_slice(&header.to_bytes());
    Ok(out)
}

/// Fully parsed stream contents, the inverse of [`serialize`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedStream {
    pub header: RlfcHeader,
    pub roots: Vec<[Plane; 3]>,
    pub srv: SrvTree,
}

pub fn parse_stream(bytes: &[u8], codecs: &dyn RootCodecs) -> Result<ParsedStream> {
    let header = parse_header(bytes)?;
    let sections = parse_sections(bytes, &header)?;
    let layout = header.layout();
    let (w, h) = header.dims();
    let (bc, br) = header.block_grid();
    let b = usize::from(header.params.block_size);
    let block_len = b * b;

    let mut roots: Vec<[Plane; 3]> = Vec::new();
    for i in 0..sections[0].roots.len() {
        let planes: Vec<Plane> = (0..3)
            .map(|c| {
                let r = sections[c].roots[i].clone();
                decode_root(&bytes[r], c, header.params.root_codec, w, h, codecs)
            })
            .collect::<Result<_>>()?;
        roots.push(planes.try_into().ok().expect("three planes"));
    }

    let mut levels: Vec<SrvLevel> = (0..layout.height as usize)
        .map(|l| {
            let (cols, rows) = layout.dims[l];
            let node = SrvNode { channels: core::array::from_fn(|_| SrvChannel::empty(bc, br, b)) };
            SrvLevel { cols, rows, nodes: vec![node; cols * rows] }
        })
        .collect();
    // BFS index → (level, index within level)
    let mut bfs_map = Vec::with_capacity(layout.node_count);
    for l in (0..layout.height as usize).rev() {
        for i in 0..levels[l].nodes.len() {
            bfs_map.push((l, i));
        }
    }
    let mut zz = [0u16; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE];
    let mut q = [0i16; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE];
    for (c, sec) in sections.iter().enumerate() {
        for blk in 0..bc * br {
            let record = &bytes[sec.record_range(blk)];
            let mut cur = RecordCursor::new(record, &layout, block_len)?;
            for (node, &(l, i)) in bfs_map.iter().enumerate() {
                let Some(slot) = cur.seek(node)? else { continue };
                bise_decode_into(&record[slot.payload.clone()], slot.descriptor, &mut zz[..block_len])?;
                for (qv, &z) in q.iter_mut().zip(&zz[..block_len]) {
                    *qv = unzigzag(z.into()) as i16;
                }
                levels[l].nodes[i].channels[c].push_with_descriptor(blk, slot.descriptor, &q[..block_len]);
            }
            if cur.consumed() != record.len() {
                return Err(Error::Format("record has trailing bytes"));
            }
        }
    }
    Ok(ParsedStream { header, roots, srv: SrvTree { block_size: b, levels } })
}
