//! Audio and annotation I/O, resampling, and noise mixing.
//!
//! Everything downstream works on a [`PcgSignal`]: mono `f64` samples in
//! `[-1, 1]` at a known rate. Sample positions are 0-based indices
//! throughout the crate, including in annotation files.

mod annotations;
mod noise;
mod resample;
mod wav;

pub use annotations::{parse_annotations, read_annotations, write_annotations, AnnotationSet, Beat, BeatLabel};
pub use noise::{gen_awgn, mean_power, measured_snr_db, mix_at_snr, NoiseKind, NoiseSignal};
pub use resample::resample;
pub use wav::{load_wav, write_wav};

use crate::error::{Error, Result};

/// A single-channel phonocardiogram.
#[derive(Debug, Clone, PartialEq)]
pub struct PcgSignal {
    samples: Vec<f64>,
    sample_rate: u32,
    pub source_id: String,
}

impl PcgSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32, source_id: impl Into<String>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Param("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::Format("signal has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Format(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}
