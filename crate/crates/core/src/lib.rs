//! Unsupervised S1/S2 heart-sound segmentation of phonocardiograms.
//!
//! The rough stage compares every pair of spectrogram frames with a
//! generalized Kullback-Leibler divergence and takes peaks of each frame's
//! total divergence as beat candidates. The fine stage moves candidates to
//! sample resolution, estimates the systole from the most common beat
//! spacing, anchors on two clean cycles and sweeps outward one cycle at a
//! time, inserting, discarding and labeling beats.

pub mod config;
pub mod error;
pub mod evaluation;
pub mod fine;
pub mod pipeline;
pub mod rng;
pub mod rough;
pub mod signal_io;
pub mod spectral;
pub mod synth;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use pipeline::{segment, Segmentation, Sidecar};
