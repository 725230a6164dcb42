//! Bounded integer sequence encoding.
//!
//! A value in `0..N` with `N = 3·2^b` is split into a trit (`v >> b`) and `b`
//! low bits; five trits share one 8-bit pack (3^5 = 243 ≤ 256). Likewise
//! `N = 5·2^b` uses quints, three per 7-bit pack (5^3 = 125 ≤ 128). Powers of
//! two are stored as plain `b`-bit fields.
//!
//! Layout, all fields LSB-first: for every group, the pack followed by the
//! group's low-bit fields in value order. The final byte is zero-padded.
//! Decoding a pack is a single table lookup.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Bits,
    Trit,
    Quint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RangeDescriptor {
    pub mode: Mode,
    pub low_bits: u8,
    pub table_index: u8,
}

const fn entry(mode: Mode, low_bits: u8, table_index: u8) -> RangeDescriptor {
    RangeDescriptor { mode, low_bits, table_index }
}

use Mode::{Bits, Quint, Trit};

/// Canonical range table, strictly increasing in cardinality.
pub const RANGE_TABLE: [RangeDescriptor; 30] = [
    entry(Bits, 1, 0),   // 2
    entry(Trit, 0, 1),   // 3
    entry(Bits, 2, 2),   // 4
    entry(Quint, 0, 3),  // 5
    entry(Trit, 1, 4),   // 6
    entry(Bits, 3, 5),   // 8
    entry(Quint, 1, 6),  // 10
    entry(Trit, 2, 7),   // 12
    entry(Bits, 4, 8),   // 16
    entry(Quint, 2, 9),  // 20
    entry(Trit, 3, 10),  // 24
    entry(Bits, 5, 11),  // 32
    entry(Quint, 3, 12), // 40
    entry(Trit, 4, 13),  // 48
    entry(Bits, 6, 14),  // 64
    entry(Quint, 4, 15), // 80
    entry(Trit, 5, 16),  // 96
    entry(Bits, 7, 17),  // 128
    entry(Quint, 5, 18), // 160
    entry(Trit, 6, 19),  // 192
    entry(Bits, 8, 20),  // 256
    entry(Quint, 6, 21), // 320
    entry(Trit, 7, 22),  // 384
    entry(Bits, 9, 23),  // 512
    entry(Quint, 7, 24), // 640
    entry(Trit, 8, 25),  // 768
    entry(Bits, 10, 26), // 1024
    entry(Quint, 8, 27), // 1280
    entry(Trit, 9, 28),  // 1536
    entry(Bits, 11, 29), // 2048
];

/// Largest value any range can carry.
pub const MAX_VALUE: u32 = 2047;

impl RangeDescriptor {
    pub const fn cardinality(&self) -> u32 {
        let base = match self.mode {
            Bits => 1,
            Trit => 3,
            Quint => 5,
        };
        base << self.low_bits
    }

    pub fn from_index(index: u8) -> Result<Self> {
        RANGE_TABLE
            .get(index as usize)
            .copied()
            .ok_or(Error::Format("range descriptor index out of table"))
    }
}

/// Zigzag maps 0, −1, 1, −2, 2 … onto 0, 1, 2, 3, 4 ….
#[inline]
pub const fn zigzag(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

#[inline]
pub const fn unzigzag(z: u32) -> i32 {
    ((z >> 1) as i32) ^ -((z & 1) as i32)
}

/// Smallest table entry whose cardinality exceeds `max_value`.
pub fn select_range(max_value: u32) -> Result<RangeDescriptor> {
    // Table is sorted, so binary search on cardinality.
    let i = RANGE_TABLE.partition_point(|r| r.cardinality() <= max_value);
    RANGE_TABLE.get(i).copied().ok_or(Error::RangeTableExceeded(max_value))
}

/// Payload length in bits before byte padding.
pub const fn payload_size(range: RangeDescriptor, count: usize) -> usize {
    let b = range.low_bits as usize;
    match range.mode {
        Bits => count * b,
        Trit => 8 * count.div_ceil(5) + count * b,
        Quint => 7 * count.div_ceil(3) + count * b,
    }
}

/// Padded payload length in bytes.
pub const fn payload_bytes(range: RangeDescriptor, count: usize) -> usize {
    payload_size(range, count).div_ceil(8)
}

/// LSB-first bit writer.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `n` bits of `v` (n ≤ 32).
    #[inline]
    pub fn put(&mut self, v: u32, n: u32) {
        debug_assert!(n <= 32);
        if n == 0 {
            return;
        }
        let mask = if n == 32 { u32::MAX } else { (1 << n) - 1 };
        self.acc |= u64::from(v & mask) << self.nbits;
        self.nbits += n;
        while self.nbits >= 8 {
            self.bytes.push(self.acc as u8);
            self.acc >>= 8;
            self.nbits -= 8;
        }
    }

    /// Pads the tail with zero bits and returns the bytes.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.bytes.push(self.acc as u8);
        }
        self.bytes
    }
}

/// LSB-first bit reader over a borrowed byte slice.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    /// Reads `n` ≤ 24 bits. Bits past the end of the slice read as zero;
    /// callers bound-check the whole payload up front.
    #[inline]
    pub fn get(&mut self, n: u32) -> u32 {
        if n == 0 {
            return 0;
        }
        let byte = self.pos >> 3;
        let shift = (self.pos & 7) as u32;
        let mut window = 0u32;
        for k in 0..4 {
            if let Some(&b) = self.bytes.get(byte + k) {
                window |= u32::from(b) << (8 * k);
            }
        }
        self.pos += n as usize;
        (window >> shift) & ((1u32 << n) - 1)
    }
}

const fn build_trit_table() -> [[u8; 5]; 243] {
    let mut t = [[0u8; 5]; 243];
    let mut p = 0;
    while p < 243 {
        let mut v = p;
        let mut i = 0;
        while i < 5 {
            t[p][i] = (v % 3) as u8;
            v /= 3;
            i += 1;
        }
        p += 1;
    }
    t
}

const fn build_quint_table() -> [[u8; 3]; 125] {
    let mut t = [[0u8; 3]; 125];
    let mut p = 0;
    while p < 125 {
        let mut v = p;
        let mut i = 0;
        while i < 3 {
            t[p][i] = (v % 5) as u8;
            v /= 5;
            i += 1;
        }
        p += 1;
    }
    t
}

static TRIT_TABLE: [[u8; 5]; 243] = build_trit_table();
static QUINT_TABLE: [[u8; 3]; 125] = build_quint_table();

const POW3: [u32; 5] = [1, 3, 9, 27, 81];
const POW5: [u32; 3] = [1, 5, 25];

/// Appends the encoding of `values` to `w`.
pub fn bise_encode_into(values: &[u16], range: RangeDescriptor, w: &mut BitWriter) -> Result<()> {
    let n = range.cardinality();
    if let Some(&bad) = values.iter().find(|&&v| u32::from(v) >= n) {
        return Err(Error::ValueOutOfRange { value: bad.into(), cardinality: n });
    }
    let b = u32::from(range.low_bits);
    let low_mask = (1u32 << b) - 1;
    match range.mode {
        Bits => {
            for &v in values {
                w.put(v.into(), b);
            }
        }
        Trit => {
            for group in values.chunks(5) {
                let pack: u32 =
                    group.iter().zip(POW3).map(|(&v, p)| (u32::from(v) >> b) * p).sum();
                w.put(pack, 8);
                for &v in group {
                    w.put(u32::from(v) & low_mask, b);
                }
            }
        }
        Quint => {
            for group in values.chunks(3) {
                let pack: u32 =
                    group.iter().zip(POW5).map(|(&v, p)| (u32::from(v) >> b) * p).sum();
                w.put(pack, 7);
                for &v in group {
                    w.put(u32::from(v) & low_mask, b);
                }
            }
        }
    }
    Ok(())
}

pub fn bise_encode(values: &[u16], range: RangeDescriptor) -> Result<Vec<u8>> {
    let mut w = BitWriter::new();
    bise_encode_into(values, range, &mut w)?;
    Ok(w.finish())
}

/// Decodes `out.len()` values from `bits` without allocating.
pub fn bise_decode_into(bits: &[u8], range: RangeDescriptor, out: &mut [u16]) -> Result<()> {
    let needed = payload_bytes(range, out.len());
    if bits.len() < needed {
        return Err(Error::Truncated { needed, available: bits.len() });
    }
    let b = u32::from(range.low_bits);
    let mut r = BitReader::new(bits);
    match range.mode {
        Bits => {
            for o in out.iter_mut() {
                *o = r.get(b) as u16;
            }
        }
        Trit => {
            for group in out.chunks_mut(5) {
                let pack = r.get(8) as usize;
                let trits = TRIT_TABLE.get(pack).ok_or(Error::CorruptPayload("trit pack > 242"))?;
                for (o, &t) in group.iter_mut().zip(trits) {
                    *o = ((u32::from(t) << b) | r.get(b)) as u16;
                }
            }
        }
        Quint => {
            for group in out.chunks_mut(3) {
                let pack = r.get(7) as usize;
                let quints =
                    QUINT_TABLE.get(pack).ok_or(Error::CorruptPayload("quint pack > 124"))?;
                for (o, &q) in group.iter_mut().zip(quints) {
                    *o = ((u32::from(q) << b) | r.get(b)) as u16;
                }
            }
        }
    }
    Ok(())
}

pub fn bise_decode(bits: &[u8], count: usize, range: RangeDescriptor) -> Result<Vec<u16>> {
    let mut out = vec![0u16; count];
    bise_decode_into(bits, range, &mut out)?;
    Ok(out)
}
