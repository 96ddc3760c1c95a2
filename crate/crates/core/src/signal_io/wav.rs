use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::PcgSignal;
use crate::error::{Error, Result};

fn hound_err(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(source) => Error::io(path, source),
        other => Error::Format(format!("{}: {other}", path.display())),
    }
}

/// Reads a mono PCM (16/24/32-bit integer) or 32-bit float WAV file.
///
/// Integer samples are scaled by `2^(bits-1)`, so full-scale positive
/// 16-bit `32767` maps to `32767/32768`.
pub fn load_wav(path: impl AsRef<Path>) -> Result<PcgSignal> {
    let path = path.as_ref();
    let reader = WavReader::open(path).map_err(|e| hound_err(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Format(format!(
            "{}: expected 1 channel, found {}",
            path.display(),
            spec.channels
        )));
    }

    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(|e| hound_err(path, e))?,
        (SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = f64::from(1u32 << (bits - 1));
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) / scale))
                .collect::<Result<_, _>>()
                .map_err(|e| hound_err(path, e))?
        }
        (fmt, bits) => {
            return Err(Error::Format(format!(
                "{}: unsupported sample format {fmt:?} at {bits} bits",
                path.display()
            )))
        }
    };

    if samples.is_empty() {
        return Err(Error::Format(format!("{}: zero-length audio", path.display())));
    }

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    PcgSignal::new(samples, spec.sample_rate, stem)
}

/// Writes a signal as mono 32-bit float WAV.
pub fn write_wav(path: impl AsRef<Path>, sig: &PcgSignal) -> Result<()> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: sig.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| hound_err(path, e))?;
    for &s in sig.samples() {
        writer.write_sample(s as f32).map_err(|e| hound_err(path, e))?;
    }
    writer.finalize().map_err(|e| hound_err(path, e))
}
