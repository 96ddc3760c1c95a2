//! Whole-recording segmentation: spectrogram, divergence peaks, then the
//! cycle sweep.

use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::fine::{
    beat_distances, estimate_systole, find_anchor_cycles, refine_to_samples, verify_correct_classify, CycleAnchor,
    LabeledBeats, SampleBeats, ScenarioCounts, SystoleEstimate,
};
use crate::rough::{
    dissimilarity_matrix, divergence_profile, divergence_profile_streaming, pick_beat_frames, DissimilarityMatrix,
    DivergenceProfile, FrameBeats,
};
use crate::signal_io::{resample, AnnotationSet, PcgSignal};
use crate::spectral::{bandpass_mask, normalize, stft};

/// Every intermediate of one run. Positions refer to the signal at
/// `sample_rate`, the configured analysis rate.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub sample_rate: u32,
    pub num_samples: usize,
    pub alpha: DivergenceProfile,
    pub dissimilarity: Option<DissimilarityMatrix>,
    pub frame_beats: FrameBeats,
    pub sample_beats: SampleBeats,
    pub systole: SystoleEstimate,
    pub anchor: CycleAnchor,
    pub eta: usize,
    pub labeled: LabeledBeats,
}

/// Per-recording summary written next to the annotation file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub sample_rate: u32,
    pub beta: f64,
    pub hr_init: usize,
    pub eta: usize,
    pub scenario_counts: ScenarioCounts,
    pub hr_trace: Vec<usize>,
    pub warnings: Vec<String>,
}

impl Segmentation {
    pub fn annotations(&self) -> AnnotationSet {
        AnnotationSet {
            beats: self.labeled.beats.clone(),
            sample_rate: self.sample_rate,
        }
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            sample_rate: self.sample_rate,
            beta: self.systole.beta,
            hr_init: self.anchor.hr_init,
            eta: self.eta,
            scenario_counts: self.labeled.counts,
            hr_trace: self.labeled.hr_trace.clone(),
            warnings: self.labeled.warnings.clone(),
        }
    }
}

/// Runs both stages on `x`. With `keep_matrix` the dissimilarity matrix is
/// built and returned even if the config streams it.
pub fn segment(x: &PcgSignal, cfg: &PipelineConfig, keep_matrix: bool) -> Result<Segmentation> {
    cfg.validate()?;
    let resampled;
    let x = if x.sample_rate() == cfg.fs {
        x
    } else {
        resampled = resample(x, cfg.fs)?;
        &resampled
    };
    let p = cfg.stft_params();
    let spec = bandpass_mask(&normalize(&stft(x, &p)?)?, cfg.band_lo_hz, cfg.band_hi_hz)?;

    let (alpha, dissimilarity) = if keep_matrix || cfg.materialize_dissimilarity {
        let dm = dissimilarity_matrix(&spec)?;
        (divergence_profile(&dm)?, Some(dm))
    } else {
        (divergence_profile_streaming(&spec)?, None)
    };

    let frame_beats = pick_beat_frames(&alpha, &cfg.peak_config())?;
    let sample_beats = refine_to_samples(x, &frame_beats, &p)?;
    let systole = estimate_systole(&beat_distances(&sample_beats)?, cfg.hist_bins)?;
    let anchor = find_anchor_cycles(&sample_beats, &systole)?;
    let eta = cfg.eta_samples();
    let labeled = verify_correct_classify(x, &sample_beats, &systole, &anchor, eta, cfg.hr_tracking)?;
    for w in &labeled.warnings {
        log::warn!("{}: {w}", x.source_id);
    }

    Ok(Segmentation {
        sample_rate: cfg.fs,
        num_samples: x.len(),
        alpha,
        dissimilarity,
        frame_beats,
        sample_beats,
        systole,
        anchor,
        eta,
        labeled,
    })
}
