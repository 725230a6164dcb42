//! File formats, parallel drivers, evaluation and the HTTP view service
//! around [`rlfc_core`].

pub mod error;
pub mod eval;
pub mod manifest;
pub mod parallel;
pub mod png;
pub mod service;

pub use rlfc_core as core;
