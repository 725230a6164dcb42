#![no_std]
//! Random-access hierarchical light-field codec.
//!
//! A light field (an S×T grid of W×H views) is encoded as a tree: the views
//! are repeatedly clustered 2×2 and filtered into representative key views,
//! and each level stores only the sparse, thresholded and quantized residual
//! against its parent. Residual blocks are packed with bounded integer
//! sequence encoding and laid out so that any block of any view can be
//! decoded with one offset lookup plus one record scan.
//!
//! This crate is `no_std` and only needs `alloc`. File formats, PNG, the CLI
//! and the HTTP service live in the `rlfc` crate.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bise;
pub mod color;
pub mod container;
pub mod decoder;
pub mod encoder;
mod error;
pub mod hierarchy;
pub mod lf;
pub mod metrics;
pub mod plane;
pub mod render;
pub mod synth;

pub use container::{CodecId, RawCodec, RawOnly, RlfcHeader, RootCodec, RootCodecs};
pub use decoder::{Block, DecoderState};
pub use encoder::{compress, EncodeReport};
pub use error::{Error, Result};
pub use hierarchy::{EncodingParams, FilterKind, FilterSpec};
pub use lf::{LightFieldGrid, PlaneGeometry, RgbImage};
pub use plane::Plane;
