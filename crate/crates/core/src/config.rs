use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::seconds_to_samples;
use crate::fine::{HrTracking, MAX_HIST_BINS, MIN_HIST_BINS};
use crate::rough::PeakConfig;
use crate::spectral::{StftParams, WindowKind};

/// Every tunable of the segmenter and the evaluator, as one flat JSON
/// object. Missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Recordings are resampled to this rate before analysis.
    pub fs: u32,
    pub window_len: usize,
    pub hop: usize,
    pub dft_len: usize,
    pub band_lo_hz: f64,
    pub band_hi_hz: f64,
    pub hist_bins: usize,
    pub eta_ms: f64,
    pub hr_tracking: HrTracking,
    pub tol_ms: f64,
    pub peak_min_sep_ms: f64,
    pub peak_rel_height: f64,
    /// Build the full T x T matrix instead of streaming its rows.
    pub materialize_dissimilarity: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            fs: 4096,
            window_len: 128,
            hop: 32,
            dft_len: 256,
            band_lo_hz: 20.0,
            band_hi_hz: 200.0,
            hist_bins: 20,
            eta_ms: 160.0,
            hr_tracking: HrTracking::Mean,
            tol_ms: 80.0,
            peak_min_sep_ms: PeakConfig::DEFAULT_MIN_SEP_S * 1000.0,
            peak_rel_height: PeakConfig::DEFAULT_REL_HEIGHT,
            materialize_dissimilarity: false,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        self.stft_params().validate()?;
        let nyquist = f64::from(self.fs) / 2.0;
        if !(0.0 <= self.band_lo_hz && self.band_lo_hz < self.band_hi_hz && self.band_hi_hz <= nyquist) {
            return Err(Error::Param(format!(
                "band [{}, {}] Hz must satisfy 0 <= lo < hi <= {nyquist}",
                self.band_lo_hz, self.band_hi_hz
            )));
        }
        if !(MIN_HIST_BINS..=MAX_HIST_BINS).contains(&self.hist_bins) {
            return Err(Error::Param(format!(
                "hist_bins must lie in [{MIN_HIST_BINS}, {MAX_HIST_BINS}], got {}",
                self.hist_bins
            )));
        }
        for (name, v) in [
            ("eta_ms", self.eta_ms),
            ("tol_ms", self.tol_ms),
            ("peak_min_sep_ms", self.peak_min_sep_ms),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Param(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.peak_rel_height) {
            return Err(Error::Param(format!(
                "peak_rel_height must lie in [0, 1], got {}",
                self.peak_rel_height
            )));
        }
        Ok(())
    }

    pub fn stft_params(&self) -> StftParams {
        StftParams {
            window_len: self.window_len,
            hop: self.hop,
            dft_len: self.dft_len,
            window: WindowKind::Hamming,
            sample_rate: self.fs,
        }
    }

    pub fn peak_config(&self) -> PeakConfig {
        let hop_s = self.stft_params().hop_seconds();
        PeakConfig {
            min_sep_frames: (self.peak_min_sep_ms / 1000.0 / hop_s).ceil() as usize,
            rel_height: self.peak_rel_height,
        }
    }

    pub fn eta_samples(&self) -> usize {
        seconds_to_samples(self.eta_ms / 1000.0, self.fs)
    }

    pub fn tol_samples(&self) -> usize {
        seconds_to_samples(self.tol_ms / 1000.0, self.fs)
    }
}
