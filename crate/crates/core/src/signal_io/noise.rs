use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::PcgSignal;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Awgn,
    Ambient,
}

/// Noise to be mixed into a recording.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub kind: NoiseKind,
}

impl NoiseSignal {
    /// Wraps a recorded ambient-noise signal.
    pub fn ambient(sig: PcgSignal) -> Self {
        let sample_rate = sig.sample_rate();
        Self {
            samples: sig.into_samples(),
            sample_rate,
            kind: NoiseKind::Ambient,
        }
    }
}

/// Mean squared amplitude.
pub fn mean_power(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// `10 log10(P_signal / P_noise)`.
pub fn measured_snr_db(signal: &[f64], noise: &[f64]) -> f64 {
    10.0 * (mean_power(signal) / mean_power(noise)).log10()
}

/// Zero-mean, unit-variance white Gaussian noise.
pub fn gen_awgn(length: usize, sample_rate: u32, seed: u64) -> Result<NoiseSignal> {
    if length == 0 {
        return Err(Error::Param("noise length must be positive".into()));
    }
    if sample_rate == 0 {
        return Err(Error::Param("sample rate must be positive".into()));
    }
    let mut rng = rng::seeded(seed);
    let samples = (0..length).map(|_| StandardNormal.sample(&mut rng)).collect();
    Ok(NoiseSignal {
        samples,
        sample_rate,
        kind: NoiseKind::Awgn,
    })
}

/// Returns `x + g * a'` where `a'` is the noise (a seeded random fragment
/// of it for ambient noise) and `g` sets the full-extent power ratio to
/// `snr_db`.
pub fn mix_at_snr(x: &PcgSignal, a: &NoiseSignal, snr_db: f64, seed: u64) -> Result<PcgSignal> {
    if x.sample_rate() != a.sample_rate {
        return Err(Error::Param(format!(
            "rate mismatch: signal {} Hz, noise {} Hz",
            x.sample_rate(),
            a.sample_rate
        )));
    }
    if !snr_db.is_finite() {
        return Err(Error::Param(format!("SNR must be finite, got {snr_db}")));
    }
    let n = x.len();
    if a.samples.len() < n {
        return Err(Error::Param(format!(
            "noise has {} samples, signal needs {n}",
            a.samples.len()
        )));
    }
    let fragment = match a.kind {
        NoiseKind::Awgn => &a.samples[..n],
        NoiseKind::Ambient => {
            let slack = a.samples.len() - n;
            let start = if slack == 0 {
                0
            } else {
                rng::seeded(seed).random_range(0..=slack)
            };
            &a.samples[start..start + n]
        }
    };

    let p_noise = mean_power(fragment);
    if p_noise == 0.0 {
        return Err(Error::Degenerate("noise fragment has zero power".into()));
    }
    let p_signal = mean_power(x.samples());
    let gain = (p_signal / (p_noise * 10f64.powf(snr_db / 10.0))).sqrt();

    let mixed = x.samples().iter().zip(fragment).map(|(s, v)| s + gain * v).collect();
    PcgSignal::new(mixed, x.sample_rate(), x.source_id.clone())
}
