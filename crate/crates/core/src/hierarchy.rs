//! Representative key view (RKV) and sparse residual view (SRV) trees.
//!
//! The RKV tree is built bottom-up: level 0 is the input light field, and
//! each node at level `l` is the weighted filter of a 2×2 cluster of nodes
//! at level `l - 1`. The SRV tree is built top-down against the
//! *reconstructed* parents, so thresholding and quantization error is
//! absorbed by the next level instead of accumulating.

use alloc::vec::Vec;

use crate::bise::{select_range, zigzag, RangeDescriptor, MAX_VALUE};
use crate::color::image_to_planes;
use crate::container::CodecId;
use crate::lf::LightFieldGrid;
use crate::plane::Plane;
use crate::{Error, Result};

pub const CLUSTER_FACTOR: usize = 2;
pub const WEIGHT_ONE: u32 = 256;
pub const MAX_TREE_HEIGHT: u8 = 15;
pub const MAX_BLOCK_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Uniform,
    Gaussian,
}

impl FilterKind {
    pub fn id(self) -> u8 {
        match self {
            FilterKind::Uniform => 0,
            FilterKind::Gaussian => 1,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(FilterKind::Uniform),
            1 => Ok(FilterKind::Gaussian),
            _ => Err(Error::Format("unknown filter kind")),
        }
    }
}

/// Cluster filter. `sigma_q8` is the Gaussian width in camera-plane units
/// with 1/256 granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub sigma_q8: u16,
}

impl FilterSpec {
    pub fn gaussian(sigma: f64) -> Self {
        FilterSpec { kind: FilterKind::Gaussian, sigma_q8: libm::round(sigma * 256.0) as u16 }
    }

    pub fn uniform() -> Self {
        FilterSpec { kind: FilterKind::Uniform, sigma_q8: 0 }
    }

    pub fn sigma(&self) -> f64 {
        f64::from(self.sigma_q8) / 256.0
    }
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec::gaussian(0.7)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingParams {
    /// Number of filtering steps; the root level index.
    pub tree_height: u8,
    pub block_size: u8,
    pub pixel_threshold: u16,
    pub block_threshold: u32,
    pub quant_shift: u8,
    pub filter: FilterSpec,
    pub root_codec: CodecId,
}

impl Default for EncodingParams {
    fn default() -> Self {
        EncodingParams {
            tree_height: 3,
            block_size: 4,
            pixel_threshold: 4,
            block_threshold: 80,
            quant_shift: 2,
            filter: FilterSpec::default(),
            root_codec: CodecId::Png,
        }
    }
}

impl EncodingParams {
    /// Zero thresholds, no quantization, raw roots: bit-exact codec.
    pub fn lossless() -> Self {
        EncodingParams {
            pixel_threshold: 0,
            block_threshold: 0,
            quant_shift: 0,
            root_codec: CodecId::Raw,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tree_height == 0 || self.tree_height > MAX_TREE_HEIGHT {
            return Err(Error::InvalidParams("tree height must be in 1..=15"));
        }
        if !matches!(self.block_size, 2 | 4 | 8 | 16) {
            return Err(Error::InvalidParams("block size must be 2, 4, 8 or 16"));
        }
        if self.quant_shift > 8 {
            return Err(Error::InvalidParams("quantization shift must be <= 8"));
        }
        if self.filter.kind == FilterKind::Gaussian && self.filter.sigma_q8 == 0 {
            return Err(Error::InvalidParams("gaussian sigma must be positive"));
        }
        Ok(())
    }

    pub fn block_len(&self) -> usize {
        usize::from(self.block_size).pow(2)
    }
}

/// Grid dimensions `(cols, rows)` of level `level` for an `s × t` light field.
pub fn level_dims(s_count: usize, t_count: usize, level: u8) -> (usize, usize) {
    let f = 1usize << level;
    (s_count.div_ceil(f), t_count.div_ceil(f))
}

/// Regular 2×2 clustering of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMap {
    pub child_dims: (usize, usize),
    pub parent_dims: (usize, usize),
    /// Row-major child indices per parent, parents in row-major order.
    pub clusters: Vec<Vec<usize>>,
}

impl ClusterMap {
    pub fn parent_of(&self, x: usize, y: usize) -> (usize, usize) {
        (x / CLUSTER_FACTOR, y / CLUSTER_FACTOR)
    }
}

pub fn cluster_level(cols: usize, rows: usize) -> ClusterMap {
    let (pc, pr) = (cols.div_ceil(CLUSTER_FACTOR), rows.div_ceil(CLUSTER_FACTOR));
    let mut clusters = Vec::with_capacity(pc * pr);
    for py in 0..pr {
        for px in 0..pc {
            let mut members = Vec::with_capacity(4);
            for y in py * 2..(py * 2 + 2).min(rows) {
                for x in px * 2..(px * 2 + 2).min(cols) {
                    members.push(y * cols + x);
                }
            }
            clusters.push(members);
        }
    }
    ClusterMap { child_dims: (cols, rows), parent_dims: (pc, pr), clusters }
}

/// Fixed-point cluster weights summing to exactly 256.
///
/// Real weights are scaled to 256, floored, and the shortfall handed out
/// one unit at a time by descending fractional part (ties: lower index).
pub fn filter_weights(positions: &[[f64; 2]], spec: FilterSpec) -> Vec<u32> {
    let n = positions.len();
    assert!(n > 0, "empty cluster");
    let real: Vec<f64> = match spec.kind {
        FilterKind::Uniform => alloc::vec![1.0; n],
        FilterKind::Gaussian => {
            let cx = positions.iter().map(|p| p[0]).sum::<f64>() / n as f64;
            let cy = positions.iter().map(|p| p[1]).sum::<f64>() / n as f64;
            let d2: Vec<f64> =
                positions.iter().map(|p| (p[0] - cx) * (p[0] - cx) + (p[1] - cy) * (p[1] - cy)).collect();
            let dmin = d2.iter().copied().fold(f64::INFINITY, f64::min);
            let two_sigma2 = 2.0 * spec.sigma() * spec.sigma();
            d2.iter().map(|d| libm::exp(-(d - dmin) / two_sigma2)).collect()
        }
    };
    let total: f64 = real.iter().sum();
    let scaled: Vec<f64> = real.iter().map(|w| w / total * f64::from(WEIGHT_ONE)).collect();
    let mut weights: Vec<u32> = scaled.iter().map(|w| libm::floor(*w) as u32).collect();
    let short = WEIGHT_ONE - weights.iter().sum::<u32>();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let fa = scaled[a] - libm::floor(scaled[a]);
        let fb = scaled[b] - libm::floor(scaled[b]);
        fb.partial_cmp(&fa).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(short as usize) {
        weights[i] += 1;
    }
    weights
}

/// Weighted filter with round-half-up: `floor((Σ w·I + 128) / 256)`.
pub fn apply_weights(children: &[&Plane], weights: &[u32]) -> Plane {
    let first = children[0];
    let mut out = Plane::new(first.width, first.height);
    if children.len() == 1 {
        out.data.copy_from_slice(&first.data);
        return out;
    }
    for (i, o) in out.data.iter_mut().enumerate() {
        let acc: i32 =
            children.iter().zip(weights).map(|(c, &w)| i32::from(c.data[i]) * w as i32).sum();
        *o = ((acc + 128) >> 8) as i16;
    }
    out
}

pub fn filter_cluster(children: &[&Plane], positions: &[[f64; 2]], spec: FilterSpec) -> Plane {
    let weights = filter_weights(positions, spec);
    apply_weights(children, &weights)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RkvNode {
    pub planes: [Plane; 3],
    pub position: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RkvLevel {
    pub cols: usize,
    pub rows: usize,
    pub nodes: Vec<RkvNode>,
}

/// Levels `0..=h`; level `h` holds the root RKVs.
#[derive(Debug, Clone, PartialEq)]
pub struct RkvTree {
    pub levels: Vec<RkvLevel>,
}

impl RkvTree {
    pub fn height(&self) -> u8 {
        (self.levels.len() - 1) as u8
    }

    pub fn roots(&self) -> &RkvLevel {
        self.levels.last().expect("tree has at least one level")
    }
}

pub fn build_rkv_tree(lf: &LightFieldGrid, params: &EncodingParams) -> Result<RkvTree> {
    params.validate()?;
    let nodes = lf
        .images
        .iter()
        .zip(&lf.camera_positions)
        .map(|(img, &position)| RkvNode { planes: image_to_planes(img), position })
        .collect();
    let base = RkvLevel { cols: lf.s_count, rows: lf.t_count, nodes };
    Ok(build_rkv_tree_from_level(base, params))
}

pub fn build_rkv_tree_from_level(base: RkvLevel, params: &EncodingParams) -> RkvTree {
    let mut levels = Vec::with_capacity(usize::from(params.tree_height) + 1);
    levels.push(base);
    for _ in 0..params.tree_height {
        let below = levels.last().unwrap();
        let map = cluster_level(below.cols, below.rows);
        let nodes = map
            .clusters
            .iter()
            .map(|members| {
                let positions: Vec<[f64; 2]> =
                    members.iter().map(|&i| below.nodes[i].position).collect();
                let weights = filter_weights(&positions, params.filter);
                let planes = core::array::from_fn(|c| {
                    let kids: Vec<&Plane> =
                        members.iter().map(|&i| &below.nodes[i].planes[c]).collect();
                    apply_weights(&kids, &weights)
                });
                let mut position = [0.0; 2];
                for (p, &w) in positions.iter().zip(&weights) {
                    position[0] += p[0] * f64::from(w) / 256.0;
                    position[1] += p[1] * f64::from(w) / 256.0;
                }
                RkvNode { planes, position }
            })
            .collect();
        let (cols, rows) = map.parent_dims;
        levels.push(RkvLevel { cols, rows, nodes });
    }
    RkvTree { levels }
}

/// Raw residual `child − parent`, widened to `i32`.
pub fn compute_srv(child: &Plane, parent: &Plane) -> Result<Vec<i32>> {
    if !child.same_dims(parent) {
        return Err(Error::DimensionMismatch);
    }
    Ok(child.data.iter().zip(&parent.data).map(|(&c, &p)| i32::from(c) - i32::from(p)).collect())
}

#[inline]
pub fn quantize(r: i32, shift: u8) -> i32 {
    r.signum() * (r.abs() >> shift)
}

/// Mid-step reconstruction of a quantized residual.
#[inline]
pub fn dequantize(q: i32, shift: u8) -> i32 {
    if q == 0 {
        return 0;
    }
    let half = if shift > 0 { 1 << (shift - 1) } else { 0 };
    q.signum() * ((q.abs() << shift) + half)
}

/// The stored blocks of one channel of one SRV node. Only PRESENT blocks are
/// kept, sorted by row-major block index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrvChannel {
    pub block_cols: usize,
    pub block_rows: usize,
    pub block_size: usize,
    pub present: Vec<u32>,
    pub descriptors: Vec<RangeDescriptor>,
    /// Quantized residuals, `block_size²` per present block, raster order.
    pub values: Vec<i16>,
}

impl SrvChannel {
    pub fn empty(block_cols: usize, block_rows: usize, block_size: usize) -> Self {
        SrvChannel {
            block_cols,
            block_rows,
            block_size,
            present: Vec::new(),
            descriptors: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn get(&self, block: usize) -> Option<(RangeDescriptor, &[i16])> {
        let i = self.present.binary_search(&(block as u32)).ok()?;
        let n = self.block_size * self.block_size;
        Some((self.descriptors[i], &self.values[i * n..(i + 1) * n]))
    }

    /// Appends a PRESENT block; blocks must arrive in increasing order.
    pub fn push(&mut self, block: usize, q: &[i16]) -> Result<()> {
        let max = q.iter().map(|&v| zigzag(v.into())).max().unwrap_or(0);
        if max > MAX_VALUE {
            let worst = q.iter().copied().max_by_key(|v| v.unsigned_abs()).unwrap_or(0);
            return Err(Error::ResidualOverflow(worst.into()));
        }
        debug_assert!(self.present.last().is_none_or(|&p| (p as usize) < block));
        self.present.push(block as u32);
        self.descriptors.push(select_range(max)?);
        self.values.extend_from_slice(q);
        Ok(())
    }

    /// Appends a block with an explicit descriptor, as read from a stream.
    pub fn push_with_descriptor(&mut self, block: usize, descriptor: RangeDescriptor, q: &[i16]) {
        self.present.push(block as u32);
        self.descriptors.push(descriptor);
        self.values.extend_from_slice(q);
    }

    pub fn present_count(&self) -> usize {
        self.present.len()
    }
}

/// Thresholds and quantizes one residual plane of true size `width × height`.
///
/// Returns the sparse block set and the reconstructed (dequantized) residual
/// at true size. The plane is zero-padded to whole blocks.
pub fn threshold_and_quantize(
    residual: &[i32],
    width: usize,
    height: usize,
    params: &EncodingParams,
) -> Result<(SrvChannel, Vec<i32>)> {
    let b = usize::from(params.block_size);
    let (bc, br) = (width.div_ceil(b), height.div_ceil(b));
    let tp = i32::from(params.pixel_threshold);
    let mut chan = SrvChannel::empty(bc, br, b);
    let mut recon = alloc::vec![0i32; width * height];
    let mut block = [0i32; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE];
    let mut q = [0i16; MAX_BLOCK_SIZE * MAX_BLOCK_SIZE];
    let n = b * b;
    for by in 0..br {
        for bx in 0..bc {
            let mut energy: u64 = 0;
            for dy in 0..b {
                for dx in 0..b {
                    let (x, y) = (bx * b + dx, by * b + dy);
                    let mut r = if x < width && y < height { residual[y * width + x] } else { 0 };
                    if r.abs() < tp {
                        r = 0;
                    }
                    energy += u64::from(r.unsigned_abs());
                    block[dy * b + dx] = r;
                }
            }
            if energy == 0 || energy < u64::from(params.block_threshold) {
                continue;
            }
            let mut any = false;
            for (qv, &r) in q[..n].iter_mut().zip(&block[..n]) {
                let v = quantize(r, params.quant_shift);
                any |= v != 0;
                *qv = v.clamp(i16::MIN.into(), i16::MAX.into()) as i16;
            }
            // Blocks that quantize to nothing reconstruct to zero either way.
            if !any {
                continue;
            }
            chan.push(by * bc + bx, &q[..n])?;
            for dy in 0..b {
                for dx in 0..b {
                    let (x, y) = (bx * b + dx, by * b + dy);
                    if x < width && y < height {
                        recon[y * width + x] =
                            dequantize(q[dy * b + dx].into(), params.quant_shift);
                    }
                }
            }
        }
    }
    Ok((chan, recon))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrvNode {
    pub channels: [SrvChannel; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrvLevel {
    pub cols: usize,
    pub rows: usize,
    pub nodes: Vec<SrvNode>,
}

/// SRV levels `0..h`, indexed by level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrvTree {
    pub block_size: usize,
    pub levels: Vec<SrvLevel>,
}

impl SrvTree {
    /// PRESENT block counts per level, summed over channels.
    pub fn present_counts(&self) -> Vec<usize> {
        self.levels
            .iter()
            .map(|l| {
                l.nodes.iter().flat_map(|n| n.channels.iter()).map(|c| c.present_count()).sum()
            })
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(|l| l.nodes.len()).sum()
    }
}

/// Top-down closed-loop residual pass. Returns the SRV tree and the
/// reconstructed level-0 planes, which is exactly what a decoder produces.
pub fn build_srv_tree(
    tree: &RkvTree,
    params: &EncodingParams,
) -> Result<(SrvTree, Vec<[Plane; 3]>)> {
    let h = tree.height();
    let mut working: Vec<[Plane; 3]> =
        tree.roots().nodes.iter().map(|n| n.planes.clone()).collect();
    let mut levels: Vec<SrvLevel> = Vec::with_capacity(h as usize);
    for l in (0..h).rev() {
        let level = &tree.levels[l as usize];
        let parent_cols = tree.levels[l as usize + 1].cols;
        let mut nodes = Vec::with_capacity(level.nodes.len());
        let mut next = Vec::with_capacity(level.nodes.len());
        for y in 0..level.rows {
            for x in 0..level.cols {
                let node = &level.nodes[y * level.cols + x];
                let parent = &working[(y / 2) * parent_cols + x / 2];
                let mut channels = Vec::with_capacity(3);
                let mut rebuilt = Vec::with_capacity(3);
                for c in 0..3 {
                    let child = &node.planes[c];
                    let residual = compute_srv(child, &parent[c])?;
                    let (chan, recon) =
                        threshold_and_quantize(&residual, child.width, child.height, params)?;
                    let mut plane = parent[c].clone();
                    for (p, r) in plane.data.iter_mut().zip(&recon) {
                        *p = (i32::from(*p) + r) as i16;
                    }
                    channels.push(chan);
                    rebuilt.push(plane);
                }
                nodes.push(SrvNode { channels: vec3(channels) });
                next.push(vec3(rebuilt));
            }
        }
        levels.push(SrvLevel { cols: level.cols, rows: level.rows, nodes });
        working = next;
    }
    levels.reverse();
    Ok((SrvTree { block_size: params.block_size.into(), levels }, working))
}

fn vec3<T>(v: Vec<T>) -> [T; 3] {
    v.try_into().ok().expect("three channels")
}
