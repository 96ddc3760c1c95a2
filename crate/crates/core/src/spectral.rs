//! Magnitude spectrogram front end: STFT, global normalization, and
//! spectral band-pass masking.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::PcgSignal;

/// Floor applied to every spectrogram entry after normalization.
pub const EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hamming,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StftParams {
    pub window_len: usize,
    pub hop: usize,
    pub dft_len: usize,
    #[serde(default)]
    pub window: WindowKind,
    pub sample_rate: u32,
}

impl Default for StftParams {
    /// 128-sample Hamming frames, hop of a quarter frame, 256-point DFT at
    /// 4096 Hz: 7.8125 ms steps and 16 Hz bins.
    fn default() -> Self {
        Self {
            window_len: 128,
            hop: 32,
            dft_len: 256,
            window: WindowKind::Hamming,
            sample_rate: 4096,
        }
    }
}

impl StftParams {
    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.hop > self.window_len || self.window_len > self.dft_len {
            return Err(Error::Param(format!(
                "need 0 < hop <= window_len <= dft_len, got hop={} window_len={} dft_len={}",
                self.hop, self.window_len, self.dft_len
            )));
        }
        if self.sample_rate == 0 {
            return Err(Error::Param("sample rate must be positive".into()));
        }
        Ok(())
    }

    pub fn num_bins(&self) -> usize {
        self.dft_len / 2 + 1
    }

    pub fn bin_hz(&self) -> f64 {
        f64::from(self.sample_rate) / self.dft_len as f64
    }

    pub fn hop_seconds(&self) -> f64 {
        self.hop as f64 / f64::from(self.sample_rate)
    }

    /// Number of complete frames in a signal of `len` samples.
    pub fn num_frames(&self, len: usize) -> usize {
        if len < self.window_len {
            0
        } else {
            (len - self.window_len) / self.hop + 1
        }
    }

    /// First sample (0-based) covered by frame `frame` (0-based).
    pub fn frame_start(&self, frame: usize) -> usize {
        frame * self.hop
    }

    fn window(&self) -> Vec<f64> {
        let n = self.window_len;
        match self.window {
            WindowKind::Hamming if n == 1 => vec![1.0],
            WindowKind::Hamming => (0..n)
                .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
                .collect(),
        }
    }
}

/// F x T magnitude matrix, stored frame-major (`T` rows of `F` bins).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    data: Vec<f64>,
    num_bins: usize,
    num_frames: usize,
    pub params: StftParams,
    pub band: Option<(f64, f64)>,
}

impl Spectrogram {
    /// Builds a spectrogram from frame-major data, mostly for tests and
    /// synthetic inputs.
    pub fn from_frames(frames: Vec<Vec<f64>>, params: StftParams) -> Result<Self> {
        let num_frames = frames.len();
        let num_bins = frames.first().map_or(0, Vec::len);
        if num_bins == 0 || frames.iter().any(|f| f.len() != num_bins) {
            return Err(Error::Param("frames must be non-empty and equally sized".into()));
        }
        if frames.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Param("magnitudes must be finite and nonnegative".into()));
        }
        Ok(Self {
            data: frames.into_iter().flatten().collect(),
            num_bins,
            num_frames,
            params,
            band: None,
        })
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.num_bins..(t + 1) * self.num_bins]
    }

    pub fn get(&self, bin: usize, frame: usize) -> f64 {
        self.data[frame * self.num_bins + bin]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.num_bins)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// CSV matrix with one row per bin and one column per frame.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for f in 0..self.num_bins {
            for t in 0..self.num_frames {
                if t > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{:e}", self.get(f, t));
            }
            s.push('\n');
        }
        s
    }
}

/// Magnitude of the `dft_len`-point transform of each Hamming-windowed frame.
pub fn stft(sig: &PcgSignal, p: &StftParams) -> Result<Spectrogram> {
    p.validate()?;
    if sig.len() < p.window_len {
        return Err(Error::Param(format!(
            "signal of {} samples is shorter than one {}-sample frame",
            sig.len(),
            p.window_len
        )));
    }
    let num_frames = p.num_frames(sig.len());
    let num_bins = p.num_bins();
    let window = p.window();
    let fft = FftPlanner::new().plan_fft_forward(p.dft_len);
    let x = sig.samples();

    let mut data = Vec::with_capacity(num_frames * num_bins);
    let mut buf = vec![Complex::new(0.0, 0.0); p.dft_len];
    for t in 0..num_frames {
        let start = p.frame_start(t);
        buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
        for (i, w) in window.iter().enumerate() {
            buf[i].re = x[start + i] * w;
        }
        fft.process(&mut buf);
        data.extend(buf[..num_bins].iter().map(|c| c.norm()));
    }
    Ok(Spectrogram {
        data,
        num_bins,
        num_frames,
        params: *p,
        band: None,
    })
}

/// Scales by the global maximum into `[0, 1]`, then floors at [`EPS`].
pub fn normalize(spec: &Spectrogram) -> Result<Spectrogram> {
    let max = spec.max();
    if max <= 0.0 {
        return Err(Error::Degenerate("spectrogram is all zeros".into()));
    }
    let mut out = spec.clone();
    out.data.iter_mut().for_each(|v| *v = (*v / max).max(EPS));
    Ok(out)
}

/// Sets every bin whose center frequency lies outside `[f_lo, f_hi]` to [`EPS`].
pub fn bandpass_mask(spec: &Spectrogram, f_lo: f64, f_hi: f64) -> Result<Spectrogram> {
    let nyquist = f64::from(spec.params.sample_rate) / 2.0;
    if !(0.0 <= f_lo && f_lo < f_hi && f_hi <= nyquist) {
        return Err(Error::Param(format!(
            "need 0 <= f_lo < f_hi <= {nyquist}, got [{f_lo}, {f_hi}]"
        )));
    }
    let bin_hz = spec.params.bin_hz();
    let keep: Vec<bool> = (0..spec.num_bins)
        .map(|k| {
            let hz = k as f64 * bin_hz;
            hz >= f_lo && hz <= f_hi
        })
        .collect();
    let mut out = spec.clone();
    for frame in out.data.chunks_exact_mut(spec.num_bins) {
        for (v, &k) in frame.iter_mut().zip(&keep) {
            if !k {
                *v = EPS;
            }
        }
    }
    out.band = Some((f_lo, f_hi));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(samples: Vec<f64>) -> PcgSignal {
        PcgSignal::new(samples, 4096, "t").unwrap()
    }

    #[test]
    fn frame_and_bin_counts() {
        let s = stft(&sig(vec![0.1; 4096]), &StftParams::default()).unwrap();
        assert_eq!(s.num_frames(), 125);
        assert_eq!(s.num_bins(), 129);
    }

    #[test]
    fn short_signal_rejected() {
        let r = stft(&sig(vec![0.1; 127]), &StftParams::default());
        assert!(matches!(r, Err(Error::Param(_))));
    }

    #[test]
    fn dc_lands_in_bin_zero() {
        let s = stft(&sig(vec![1.0; 512]), &StftParams::default()).unwrap();
        for t in 0..s.num_frames() {
            let f = s.frame(t);
            let argmax = (0..f.len()).max_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap();
            assert_eq!(argmax, 0);
        }
    }

    #[test]
    fn sine_96hz_peaks_at_bin_6() {
        let x = (0..2048).map(|n| (2.0 * PI * 96.0 * n as f64 / 4096.0).sin()).collect();
        let s = stft(&sig(x), &StftParams::default()).unwrap();
        let f = s.frame(10);
        let argmax = (0..f.len()).max_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap();
        assert_eq!(argmax, 6);
    }

    #[test]
    fn frame_covers_expected_samples() {
        // A single impulse at sample 1152 is seen by frames 33..=36 only.
        let mut x = vec![0.0; 4096];
        x[1152] = 1.0;
        let s = stft(&sig(x), &StftParams::default()).unwrap();
        let hit: Vec<usize> = (0..s.num_frames()).filter(|&t| s.frame(t)[0] > 0.0).collect();
        assert_eq!(hit, vec![33, 34, 35, 36]);
    }

    fn small() -> Spectrogram {
        Spectrogram::from_frames(vec![vec![0.0, 2.0, 4.0], vec![1.0, 8.0, 0.5]], StftParams::default()).unwrap()
    }

    #[test]
    fn normalize_maps_max_to_one_and_floors_zero() {
        let n = normalize(&small()).unwrap();
        assert_eq!(n.get(1, 1), 1.0);
        assert_eq!(n.get(0, 0), EPS);
        assert_eq!(n.get(2, 0), 0.5);
    }

    #[test]
    fn normalize_idempotent() {
        let once = normalize(&small()).unwrap();
        let twice = normalize(&once).unwrap();
        for (a, b) in once.data.iter().zip(&twice.data) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn normalize_all_zero_is_degenerate() {
        let z = Spectrogram::from_frames(vec![vec![0.0; 3]; 2], StftParams::default()).unwrap();
        assert!(matches!(normalize(&z), Err(Error::Degenerate(_))));
    }

    #[test]
    fn default_band_keeps_bins_2_to_12() {
        let ones = Spectrogram::from_frames(vec![vec![1.0; 129]; 3], StftParams::default()).unwrap();
        let m = bandpass_mask(&ones, 20.0, 200.0).unwrap();
        let kept: Vec<usize> = (0..129).filter(|&k| m.get(k, 0) == 1.0).collect();
        assert_eq!(kept, (2..=12).collect::<Vec<_>>());
        for t in 0..3 {
            let masked: Vec<f64> = m.frame(t).iter().copied().filter(|&v| v != 1.0).collect();
            assert_eq!(masked.len(), 118);
            assert!(masked.iter().all(|&v| v == EPS));
        }
    }

    #[test]
    fn full_band_is_identity() {
        let n = normalize(&small()).unwrap();
        let m = bandpass_mask(&n, 0.0, 2048.0).unwrap();
        assert_eq!(m.data, n.data);
    }

    #[test]
    fn inverted_band_rejected() {
        assert!(matches!(bandpass_mask(&small(), 200.0, 20.0), Err(Error::Param(_))));
        assert!(matches!(bandpass_mask(&small(), 20.0, 5000.0), Err(Error::Param(_))));
    }
}
