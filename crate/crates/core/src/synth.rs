//! Synthetic phonocardiograms with exact S1/S2 ground truth.
//!
//! Each heart sound is Gaussian noise band-limited to the sound's band and
//! shaped by a Hann window. The burst is placed so that its largest
//! `|x|` sample sits exactly on the annotated position, which makes the
//! S1-to-S2 spacing exactly the requested systole.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, derive_seed, Prng, PRNG_NAME};
use crate::signal_io::{
    gen_awgn, mix_at_snr, write_annotations, write_wav, AnnotationSet, Beat, BeatLabel, NoiseSignal, PcgSignal,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MurmurPlacement {
    /// From the S1 peak to the S2 peak.
    Systolic,
    /// From the S2 peak through the first half of diastole.
    Diastolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MurmurSpec {
    pub band: (f64, f64),
    /// Peak amplitude relative to the S1 peak.
    pub gain: f64,
    pub placement: MurmurPlacement,
}

impl Default for MurmurSpec {
    fn default() -> Self {
        Self {
            band: (15.0, 700.0),
            gain: 0.5,
            placement: MurmurPlacement::Systolic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub hr_bpm: f64,
    pub systole_ms: f64,
    pub diastole_jitter_frac: f64,
    pub s1_band: (f64, f64),
    pub s2_band: (f64, f64),
    pub s1_dur_ms: f64,
    pub s2_dur_ms: f64,
    /// S2 peak amplitude relative to S1, which peaks at 1.0.
    pub s2_gain: f64,
    pub duration_s: f64,
    pub murmur: Option<MurmurSpec>,
    pub seed: u64,
    pub sample_rate: u32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            hr_bpm: 75.0,
            systole_ms: 300.0,
            diastole_jitter_frac: 0.0,
            s1_band: (20.0, 150.0),
            s2_band: (20.0, 200.0),
            s1_dur_ms: 120.0,
            s2_dur_ms: 100.0,
            s2_gain: 0.6,
            duration_s: 30.0,
            murmur: None,
            seed: 0,
            sample_rate: 4096,
        }
    }
}

fn check_band(name: &str, (lo, hi): (f64, f64), nyquist: f64) -> Result<()> {
    if !(lo >= 0.0 && lo < hi && hi <= nyquist) {
        return Err(Error::Param(format!(
            "{name} band [{lo}, {hi}] Hz must satisfy 0 <= lo < hi <= {nyquist}"
        )));
    }
    Ok(())
}

impl SynthSpec {
    pub fn cycle_ms(&self) -> f64 {
        60_000.0 / self.hr_bpm
    }

    pub fn validate(&self) -> Result<()> {
        let param = |m: String| Err(Error::Param(m));
        if self.sample_rate == 0 {
            return param("sample rate must be positive".into());
        }
        if !(40.0..=200.0).contains(&self.hr_bpm) {
            return param(format!("heart rate {} bpm outside [40, 200]", self.hr_bpm));
        }
        for (name, d) in [("S1", self.s1_dur_ms), ("S2", self.s2_dur_ms)] {
            if !(60.0..=160.0).contains(&d) {
                return param(format!("{name} duration {d} ms outside [60, 160]"));
            }
        }
        if !(0.0..1.0).contains(&self.diastole_jitter_frac) {
            return param(format!("diastole jitter {} outside [0, 1)", self.diastole_jitter_frac));
        }
        if !(self.s2_gain > 0.0 && self.s2_gain < 1.0) {
            return param(format!("S2 gain {} outside (0, 1)", self.s2_gain));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return param(format!("duration {} s must be positive", self.duration_s));
        }
        let nyquist = f64::from(self.sample_rate) / 2.0;
        check_band("S1", self.s1_band, nyquist)?;
        check_band("S2", self.s2_band, nyquist)?;
        if let Some(m) = &self.murmur {
            check_band("murmur", m.band, nyquist)?;
            if !(m.gain > 0.0 && m.gain.is_finite()) {
                return param(format!("murmur gain {} must be positive", m.gain));
            }
        }

        let half_sounds = (self.s1_dur_ms + self.s2_dur_ms) / 2.0;
        let diastole = self.cycle_ms() - self.systole_ms;
        let min_diastole = diastole * (1.0 - self.diastole_jitter_frac);
        if self.systole_ms < half_sounds {
            return param(format!(
                "systole {} ms cannot hold half of each heart sound ({half_sounds} ms)",
                self.systole_ms
            ));
        }
        if min_diastole < half_sounds {
            return param(format!(
                "shortest diastole {min_diastole:.1} ms (cycle {:.1} ms, systole {} ms) cannot hold half of each heart sound ({half_sounds} ms)",
                self.cycle_ms(),
                self.systole_ms
            ));
        }
        Ok(())
    }
}

fn ms_to_samples(ms: f64, fs: u32) -> usize {
    (ms * f64::from(fs) / 1000.0).round() as usize
}

/// White Gaussian noise with every DFT bin outside `[lo, hi]` Hz zeroed.
fn band_noise(len: usize, (lo, hi): (f64, f64), fs: u32, rng: &mut Prng, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
        .collect();
    planner.plan_fft_forward(len).process(&mut buf);
    let bin_hz = f64::from(fs) / len as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let hz = k.min(len - k) as f64 * bin_hz;
        if hz < lo || hz > hi {
            *c = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    buf.iter().map(|c| c.re / len as f64).collect()
}

fn hann(len: usize) -> impl Iterator<Item = f64> {
    let d = (len.max(2) - 1) as f64;
    (0..len).map(move |n| 0.5 - 0.5 * (2.0 * PI * n as f64 / d).cos())
}

/// Tapered cosine window with cosine fraction `r`.
fn tukey(len: usize, r: f64) -> Vec<f64> {
    let d = (len.max(2) - 1) as f64;
    (0..len)
        .map(|n| {
            let x = n as f64 / d;
            if x < r / 2.0 {
                0.5 * (1.0 - (2.0 * PI * x / r).cos())
            } else if x > 1.0 - r / 2.0 {
                0.5 * (1.0 - (2.0 * PI * (1.0 - x) / r).cos())
            } else {
                1.0
            }
        })
        .collect()
}

/// Hann-shaped band noise scaled to peak `|x| = gain`, with the index of
/// that peak.
fn burst(
    len: usize,
    band: (f64, f64),
    gain: f64,
    fs: u32,
    rng: &mut Prng,
    planner: &mut FftPlanner<f64>,
) -> (Vec<f64>, usize) {
    let mut b: Vec<f64> = band_noise(len, band, fs, rng, planner)
        .into_iter()
        .zip(hann(len))
        .map(|(v, w)| v * w)
        .collect();
    let mut peak = 0;
    for (i, v) in b.iter().enumerate() {
        if v.abs() > b[peak].abs() {
            peak = i;
        }
    }
    let scale = gain / b[peak].abs();
    b.iter_mut().for_each(|v| *v *= scale);
    (b, peak)
}

/// Adds `b` into `x` so that `b[anchor]` lands on `x[at]`, clipping at the edges.
fn add_at(x: &mut [f64], b: &[f64], anchor: usize, at: usize) {
    for (i, v) in b.iter().enumerate() {
        let pos = at as i64 - anchor as i64 + i as i64;
        if pos >= 0 && (pos as usize) < x.len() {
            x[pos as usize] += v;
        }
    }
}

/// Renders a recording and its annotations. Only whole cycles are kept:
/// the signal ends where the cycle after the last annotated one would
/// begin.
pub fn generate(spec: &SynthSpec) -> Result<(PcgSignal, AnnotationSet)> {
    spec.validate()?;
    let fs = spec.sample_rate;
    let s1_len = ms_to_samples(spec.s1_dur_ms, fs);
    let s2_len = ms_to_samples(spec.s2_dur_ms, fs);
    let s1_half = s1_len / 2;
    let systole = ms_to_samples(spec.systole_ms, fs);
    let diastole_ms = spec.cycle_ms() - spec.systole_ms;
    let limit = (spec.duration_s * f64::from(fs)).round() as usize;

    let mut timing = rng::seeded(derive_seed(spec.seed, 0));
    let mut sounds = rng::seeded(derive_seed(spec.seed, 1));
    let mut murmur_rng = rng::seeded(derive_seed(spec.seed, 2));

    // Beat positions first: (S1 peak, S2 peak, diastole that follows).
    let mut cycles: Vec<(usize, usize, usize)> = Vec::new();
    let mut s1 = s1_half;
    loop {
        let j = spec.diastole_jitter_frac;
        let factor = if j > 0.0 {
            timing.random_range(1.0 - j..=1.0 + j)
        } else {
            1.0
        };
        let dia = ms_to_samples(diastole_ms * factor, fs);
        let next = s1 + systole + dia;
        if next - s1_half > limit {
            break;
        }
        cycles.push((s1, s1 + systole, dia));
        s1 = next;
    }
    if cycles.is_empty() {
        return Err(Error::Param(format!(
            "{} s is shorter than one {:.0} ms cycle",
            spec.duration_s,
            spec.cycle_ms()
        )));
    }
    let len = s1 - s1_half;

    let mut x = vec![0.0; len];
    let mut beats = Vec::with_capacity(2 * cycles.len());
    let mut planner = FftPlanner::new();
    for &(p1, p2, dia) in &cycles {
        let (b, k) = burst(s1_len, spec.s1_band, 1.0, fs, &mut sounds, &mut planner);
        add_at(&mut x, &b, k, p1);
        let (b, k) = burst(s2_len, spec.s2_band, spec.s2_gain, fs, &mut sounds, &mut planner);
        add_at(&mut x, &b, k, p2);
        beats.push(Beat::new(p1, BeatLabel::S1));
        beats.push(Beat::new(p2, BeatLabel::S2));

        if let Some(m) = &spec.murmur {
            let (start, span) = match m.placement {
                MurmurPlacement::Systolic => (p1, p2 - p1),
                MurmurPlacement::Diastolic => (p2, dia / 2),
            };
            let mut noise = band_noise(span, m.band, fs, &mut murmur_rng, &mut planner);
            let peak = noise.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (v, w) in noise.iter_mut().zip(tukey(span, 0.5)) {
                *v *= w * m.gain / peak;
            }
            add_at(&mut x, &noise, 0, start);
        }
    }

    let id = format!("synth_{:016x}", spec.seed);
    Ok((PcgSignal::new(x, fs, id)?, AnnotationSet::new(beats, fs)?))
}

/// Noise used by [`degrade`].
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSource {
    Awgn,
    Ambient(NoiseSignal),
}

/// Adds noise at `snr_db`; `+inf` returns the input unchanged.
pub fn degrade(x: &PcgSignal, noise: &NoiseSource, snr_db: f64, seed: u64) -> Result<PcgSignal> {
    if snr_db == f64::INFINITY {
        return Ok(x.clone());
    }
    match noise {
        NoiseSource::Awgn => mix_at_snr(x, &gen_awgn(x.len(), x.sample_rate(), seed)?, snr_db, seed),
        NoiseSource::Ambient(a) => mix_at_snr(x, a, snr_db, seed),
    }
}

/// Ranges from which per-recording specs are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSpec {
    pub count: usize,
    pub duration_s: f64,
    pub hr_bpm: (f64, f64),
    pub systole_ms: (f64, f64),
    pub diastole_jitter_frac: f64,
    pub s1_dur_ms: (f64, f64),
    pub s2_dur_ms: (f64, f64),
    pub s2_gain: (f64, f64),
    pub murmur: Option<MurmurSpec>,
    pub seed: u64,
    pub sample_rate: u32,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            count: 50,
            duration_s: 30.0,
            hr_bpm: (60.0, 100.0),
            systole_ms: (280.0, 340.0),
            diastole_jitter_frac: 0.15,
            s1_dur_ms: (100.0, 140.0),
            s2_dur_ms: (80.0, 120.0),
            s2_gain: (0.5, 0.7),
            murmur: None,
            seed: 1,
            sample_rate: 4096,
        }
    }
}

fn draw(rng: &mut Prng, (lo, hi): (f64, f64)) -> f64 {
    if lo >= hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

impl CorpusSpec {
    /// Per-recording specs; recording `i` depends only on the corpus seed
    /// and `i`.
    pub fn recordings(&self) -> Vec<SynthSpec> {
        (0..self.count)
            .map(|i| {
                let seed = derive_seed(self.seed, i as u64);
                let mut r = rng::seeded(seed);
                SynthSpec {
                    hr_bpm: draw(&mut r, self.hr_bpm),
                    systole_ms: draw(&mut r, self.systole_ms),
                    diastole_jitter_frac: self.diastole_jitter_frac,
                    s1_dur_ms: draw(&mut r, self.s1_dur_ms),
                    s2_dur_ms: draw(&mut r, self.s2_dur_ms),
                    s2_gain: draw(&mut r, self.s2_gain),
                    duration_s: self.duration_s,
                    murmur: self.murmur,
                    seed,
                    sample_rate: self.sample_rate,
                    ..SynthSpec::default()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub wav: PathBuf,
    pub annotations: PathBuf,
    pub spec: SynthSpec,
    /// SNR of the added noise, absent for clean recordings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
}

/// Corpus index written next to the recordings. Paths are relative to the
/// manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub prng: String,
    pub sample_rate: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    pub recordings: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Manifest {
    pub fn new(sample_rate: u32) -> Self {
        Self {
            prng: PRNG_NAME.to_string(),
            sample_rate,
            noise: None,
            recordings: Vec::new(),
        }
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }
}

/// Stem used for recording `i` of a corpus.
pub fn recording_id(i: usize) -> String {
    format!("rec_{i:03}")
}

/// Writes `<id>.wav` and `<id>.csv` into `dir` and returns the manifest entry.
pub fn write_recording(
    dir: &Path,
    id: &str,
    x: &PcgSignal,
    truth: &AnnotationSet,
    spec: &SynthSpec,
    snr_db: Option<f64>,
) -> Result<ManifestEntry> {
    let wav = PathBuf::from(format!("{id}.wav"));
    let csv = PathBuf::from(format!("{id}.csv"));
    write_wav(dir.join(&wav), x)?;
    write_annotations(dir.join(&csv), truth)?;
    Ok(ManifestEntry {
        id: id.to_string(),
        wav,
        annotations: csv,
        spec: spec.clone(),
        snr_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_io::measured_snr_db;

    fn spec() -> SynthSpec {
        SynthSpec::default()
    }

    #[test]
    fn fixed_rate_timing() {
        let (x, truth) = generate(&spec()).unwrap();
        // 30 s of 800 ms cycles holds 37 whole cycles.
        assert_eq!(truth.len(), 2 * 37);
        assert!(truth.is_alternating());
        let systole = ms_to_samples(300.0, 4096);
        for pair in truth.beats.chunks(2) {
            assert_eq!(pair[1].position - pair[0].position, systole);
        }
        assert!(x.len() <= 30 * 4096);
    }

    #[test]
    fn annotation_is_peak_of_its_burst() {
        let (x, truth) = generate(&spec()).unwrap();
        let s = x.samples();
        for b in &truth.beats {
            let lo = b.position - 150;
            let hi = (b.position + 150).min(s.len() - 1);
            let arg = (lo..=hi)
                .max_by(|&i, &j| s[i].abs().total_cmp(&s[j].abs()).then(j.cmp(&i)))
                .unwrap();
            assert_eq!(arg, b.position);
        }
        let s1_peak = s[truth.beats[0].position].abs();
        let s2_peak = s[truth.beats[1].position].abs();
        assert!((s1_peak - 1.0).abs() < 1e-12);
        assert!((s2_peak - 0.6).abs() < 1e-12);
    }

    #[test]
    fn jitter_bounds_and_determinism() {
        let sp = SynthSpec {
            diastole_jitter_frac: 0.15,
            seed: 9,
            ..spec()
        };
        let (x, truth) = generate(&sp).unwrap();
        let nominal: f64 = 500.0 * 4.096;
        for w in truth.beats.windows(2).skip(1).step_by(2) {
            let d = (w[1].position - w[0].position) as f64;
            assert!(d >= (nominal * 0.85).floor() && d <= (nominal * 1.15).ceil(), "{d}");
        }
        let (x2, truth2) = generate(&sp).unwrap();
        assert_eq!(x, x2);
        assert_eq!(truth, truth2);
        let (x3, _) = generate(&SynthSpec { seed: 10, ..sp }).unwrap();
        assert_ne!(x, x3);
    }

    #[test]
    fn burst_energy_stays_in_band() {
        let mut planner = FftPlanner::new();
        let mut r = rng::seeded(1);
        let n = band_noise(4096, (20.0, 150.0), 4096, &mut r, &mut planner);
        let mut buf: Vec<Complex<f64>> = n.iter().map(|&v| Complex::new(v, 0.0)).collect();
        planner.plan_fft_forward(4096).process(&mut buf);
        for (k, c) in buf.iter().enumerate().take(2049) {
            if !(20..=150).contains(&k) {
                assert!(c.norm() < 1e-9, "bin {k}: {}", c.norm());
            }
        }
    }

    #[test]
    fn infeasible_timing_rejected() {
        let bad = SynthSpec {
            hr_bpm: 200.0,
            systole_ms: 250.0,
            ..spec()
        };
        assert!(matches!(generate(&bad), Err(Error::Param(_))));
        let short_systole = SynthSpec {
            systole_ms: 80.0,
            ..spec()
        };
        assert!(matches!(generate(&short_systole), Err(Error::Param(_))));
        assert!(matches!(
            generate(&SynthSpec { hr_bpm: 30.0, ..spec() }),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            generate(&SynthSpec {
                s1_dur_ms: 200.0,
                ..spec()
            }),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn murmur_adds_systolic_energy() {
        let clean = generate(&spec()).unwrap().0;
        let noisy = generate(&SynthSpec {
            murmur: Some(MurmurSpec::default()),
            ..spec()
        })
        .unwrap();
        let (x, truth) = noisy;
        let mid = (truth.beats[0].position + truth.beats[1].position) / 2;
        assert_eq!(clean.samples()[mid], 0.0);
        assert!(x.samples()[mid - 50..mid + 50].iter().any(|v| v.abs() > 0.1));
        // Beat bursts themselves are unchanged by the murmur stream.
        let p = truth.beats[2].position;
        let diastole_gap = p - 300;
        assert_eq!(clean.samples()[diastole_gap], x.samples()[diastole_gap]);
    }

    #[test]
    fn snr_chain() {
        let (x, _) = generate(&SynthSpec {
            duration_s: 5.0,
            ..spec()
        })
        .unwrap();
        let mut last_power = 0.0;
        for snr in [10.0, 5.0, 0.0, -5.0, -10.0] {
            let y = degrade(&x, &NoiseSource::Awgn, snr, 3).unwrap();
            let n: Vec<f64> = y.samples().iter().zip(x.samples()).map(|(a, b)| a - b).collect();
            assert!((measured_snr_db(x.samples(), &n) - snr).abs() < 0.01);
            let p = crate::signal_io::mean_power(y.samples());
            assert!(p > last_power);
            last_power = p;
        }
        assert_eq!(degrade(&x, &NoiseSource::Awgn, f64::INFINITY, 3).unwrap(), x);
    }

    #[test]
    fn corpus_specs_are_in_range_and_stable() {
        let c = CorpusSpec::default();
        let specs = c.recordings();
        assert_eq!(specs.len(), 50);
        for s in &specs {
            assert!((60.0..=100.0).contains(&s.hr_bpm));
            assert!((280.0..=340.0).contains(&s.systole_ms));
            s.validate().unwrap();
        }
        assert_eq!(specs, c.recordings());
        let fewer = CorpusSpec { count: 3, ..c.clone() }.recordings();
        assert_eq!(fewer[..], specs[..3]);
    }
}
