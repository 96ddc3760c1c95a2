//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes and returns JSON strings so the page needs no glue
//! beyond `JSON.parse`. The plain functions are usable (and tested) without
//! a browser; the `#[wasm_bindgen]` wrappers only forward to them.

use pulsecut::evaluation::{evaluate_recording, seconds_to_samples, RecordingReport};
use pulsecut::fine::HrTracking;
use pulsecut::rng::derive_seed;
use pulsecut::rough::{dissimilarity_matrix, DissimilarityMatrix};
use pulsecut::signal_io::{AnnotationSet, Beat, PcgSignal};
use pulsecut::spectral::{bandpass_mask, normalize, stft};
use pulsecut::synth::{degrade, generate, MurmurPlacement, MurmurSpec, NoiseSource, SynthSpec};
use pulsecut::{segment, PipelineConfig, Sidecar};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Controls exposed on the page. Missing keys take the defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoParams {
    pub hr_bpm: f64,
    pub systole_ms: f64,
    pub jitter: f64,
    pub duration_s: f64,
    /// No noise when absent.
    pub snr_db: Option<f64>,
    pub murmur: Option<MurmurPlacement>,
    pub seed: u64,
    pub eta_ms: f64,
    pub hist_bins: usize,
    pub hr_tracking: HrTracking,
}

impl Default for DemoParams {
    fn default() -> Self {
        let cfg = PipelineConfig::default();
        Self {
            hr_bpm: 72.0,
            systole_ms: 300.0,
            jitter: 0.15,
            duration_s: 10.0,
            snr_db: None,
            murmur: None,
            seed: 1,
            eta_ms: cfg.eta_ms,
            hist_bins: cfg.hist_bins,
            hr_tracking: cfg.hr_tracking,
        }
    }
}

impl DemoParams {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            eta_ms: self.eta_ms,
            hist_bins: self.hist_bins,
            hr_tracking: self.hr_tracking,
            ..PipelineConfig::default()
        }
    }

    fn recording(&self) -> Result<(PcgSignal, AnnotationSet), String> {
        let spec = SynthSpec {
            hr_bpm: self.hr_bpm,
            systole_ms: self.systole_ms,
            diastole_jitter_frac: self.jitter,
            duration_s: self.duration_s,
            murmur: self.murmur.map(|placement| MurmurSpec {
                placement,
                ..MurmurSpec::default()
            }),
            seed: self.seed,
            ..SynthSpec::default()
        };
        let (x, truth) = generate(&spec).map_err(|e| e.to_string())?;
        let x = match self.snr_db {
            Some(snr) => {
                degrade(&x, &NoiseSource::Awgn, snr, derive_seed(self.seed, 100)).map_err(|e| e.to_string())?
            }
            None => x,
        };
        Ok((x, truth))
    }
}

fn parse_params(json: &str) -> Result<DemoParams, String> {
    if json.trim().is_empty() {
        return Ok(DemoParams::default());
    }
    serde_json::from_str(json).map_err(|e| format!("bad parameters: {e}"))
}

/// Min and max of each of `buckets` equal slices, for drawing a waveform.
fn envelope(x: &[f64], buckets: usize) -> Vec<[f32; 2]> {
    let buckets = buckets.clamp(1, x.len().max(1));
    (0..buckets)
        .map(|b| {
            let lo = b * x.len() / buckets;
            let hi = ((b + 1) * x.len() / buckets).max(lo + 1).min(x.len());
            let s = &x[lo..hi];
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            [min as f32, max as f32]
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct DemoRun {
    pub sample_rate: u32,
    pub num_samples: usize,
    pub envelope: Vec<[f32; 2]>,
    pub truth: Vec<Beat>,
    pub detected: Vec<Beat>,
    pub alpha: Vec<f64>,
    pub hop: usize,
    pub sidecar: Option<Sidecar>,
    pub report: Option<RecordingReport>,
    /// Why segmentation failed, if it did.
    pub error: Option<String>,
}

/// Synthesizes a recording, segments it, and scores the result.
pub fn run_demo(params_json: &str, envelope_buckets: usize) -> Result<DemoRun, String> {
    let params = parse_params(params_json)?;
    let cfg = params.config();
    let (x, truth) = params.recording()?;
    let mut run = DemoRun {
        sample_rate: x.sample_rate(),
        num_samples: x.len(),
        envelope: envelope(x.samples(), envelope_buckets),
        truth: truth.beats.clone(),
        detected: Vec::new(),
        alpha: Vec::new(),
        hop: cfg.hop,
        sidecar: None,
        report: None,
        error: None,
    };
    match segment(&x, &cfg, false) {
        Ok(seg) => {
            run.report = Some(evaluate_recording(
                "demo",
                &truth.beats,
                &seg.labeled.beats,
                cfg.tol_samples(),
                cfg.fs,
            ));
            run.sidecar = Some(seg.sidecar());
            run.detected = seg.labeled.beats;
            run.alpha = seg.alpha.alpha;
        }
        Err(e) => run.error = Some(e.to_string()),
    }
    Ok(run)
}

#[derive(Debug, Serialize)]
pub struct Heatmap {
    /// Frames in the full matrix.
    pub frames: usize,
    /// Side of the block-averaged image.
    pub size: usize,
    /// `size * size` values, row-major, scaled to [0, 1].
    pub values: Vec<f32>,
}

/// Block-averages `dm` down to at most `max_size` per side and rescales to
/// [0, 1] by the largest block mean.
pub fn downsample(dm: &DissimilarityMatrix, max_size: usize) -> Heatmap {
    let n = dm.len();
    let size = n.min(max_size.max(1));
    let mut values = vec![0.0f64; size * size];
    for (r, out_row) in values.chunks_mut(size).enumerate() {
        let (r0, r1) = (r * n / size, (r + 1) * n / size);
        for (c, v) in out_row.iter_mut().enumerate() {
            let (c0, c1) = (c * n / size, (c + 1) * n / size);
            let mut sum = 0.0;
            for i in r0..r1 {
                sum += dm.row(i)[c0..c1].iter().sum::<f64>();
            }
            *v = sum / ((r1 - r0) * (c1 - c0)) as f64;
        }
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    Heatmap {
        frames: n,
        size,
        values: values.into_iter().map(|v| (v * scale) as f32).collect(),
    }
}

/// Dissimilarity matrix of the recording described by `params_json`.
pub fn heatmap(params_json: &str, max_size: usize) -> Result<Heatmap, String> {
    let params = parse_params(params_json)?;
    let cfg = params.config();
    let (x, _) = params.recording()?;
    let spec = stft(&x, &cfg.stft_params())
        .and_then(|s| normalize(&s))
        .and_then(|s| bandpass_mask(&s, cfg.band_lo_hz, cfg.band_hi_hz))
        .map_err(|e| e.to_string())?;
    let dm = dissimilarity_matrix(&spec).map_err(|e| e.to_string())?;
    Ok(downsample(&dm, max_size))
}

/// Scores pasted annotation CSVs against each other. Positions are read at
/// `sample_rate` unless a file declares its own rate.
pub fn evaluate_csv(
    truth_csv: &str,
    detected_csv: &str,
    tol_ms: f64,
    sample_rate: u32,
) -> Result<RecordingReport, String> {
    let truth = AnnotationSet::from_csv_str(truth_csv, sample_rate).map_err(|e| format!("truth: {e}"))?;
    let det = AnnotationSet::from_csv_str(detected_csv, sample_rate).map_err(|e| format!("detected: {e}"))?;
    if !(tol_ms >= 0.0 && tol_ms.is_finite()) {
        return Err(format!("tolerance must be nonnegative, got {tol_ms}"));
    }
    let tol = seconds_to_samples(tol_ms / 1000.0, sample_rate);
    Ok(evaluate_recording("pasted", &truth.beats, &det.beats, tol, sample_rate))
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    r.map(|v| serde_json::to_string(&v).expect("serializes"))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = runDemo)]
pub fn run_demo_js(params_json: &str, envelope_buckets: usize) -> Result<String, JsError> {
    to_js(run_demo(params_json, envelope_buckets))
}

#[wasm_bindgen(js_name = heatmap)]
pub fn heatmap_js(params_json: &str, max_size: usize) -> Result<String, JsError> {
    to_js(heatmap(params_json, max_size))
}

#[wasm_bindgen(js_name = evaluateCsv)]
pub fn evaluate_csv_js(truth_csv: &str, detected_csv: &str, tol_ms: f64, sample_rate: u32) -> Result<String, JsError> {
    to_js(evaluate_csv(truth_csv, detected_csv, tol_ms, sample_rate))
}
