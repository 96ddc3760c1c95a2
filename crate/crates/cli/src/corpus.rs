use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use pulsecut::rng::derive_seed;
use pulsecut::signal_io::{load_wav, read_annotations, resample, NoiseSignal};
use pulsecut::synth::{
    degrade, generate, recording_id, write_recording, CorpusSpec, Manifest, ManifestEntry, MurmurPlacement, MurmurSpec,
    NoiseSource,
};
use pulsecut::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::util::{create_dir, write_json, CONFIG_SNAPSHOT};

#[derive(Debug, Default)]
pub struct SynthArgs {
    pub spec: Option<PathBuf>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub duration_s: Option<f64>,
    pub murmur: Option<MurmurPlacement>,
    pub fs: Option<u32>,
}

impl SynthArgs {
    fn corpus_spec(&self) -> Result<CorpusSpec> {
        let mut c = match &self.spec {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", p.display())))?
            }
            None => CorpusSpec::default(),
        };
        if let Some(v) = self.count {
            c.count = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.duration_s {
            c.duration_s = v;
        }
        if let Some(placement) = self.murmur {
            c.murmur = Some(MurmurSpec {
                placement,
                ..MurmurSpec::default()
            });
        }
        if let Some(v) = self.fs {
            c.sample_rate = v;
        }
        Ok(c)
    }
}

pub fn synth(out: &Path, args: &SynthArgs) -> Result<ExitCode> {
    let c = args.corpus_spec()?;
    let specs = c.recordings();
    for s in &specs {
        s.validate()?;
    }
    create_dir(out)?;
    write_json(&out.join(CONFIG_SNAPSHOT), &c)?;
    let recordings = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let (x, truth) = generate(spec)?;
            write_recording(out, &recording_id(i), &x, &truth, spec, None)
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        recordings,
        ..Manifest::new(c.sample_rate)
    };
    manifest.write(out)?;
    println!("{}: {} recordings", out.display(), manifest.recordings.len());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MixSnapshot<'a> {
    source: &'a Path,
    noise: &'a str,
    snr_db: f64,
    seed: u64,
}

/// Directory name for one SNR level, e.g. `snr_-5`.
pub fn snr_dir_name(snr_db: f64) -> String {
    format!("snr_{snr_db}")
}

fn mix_one(
    src: &Path,
    dst: &Path,
    e: &ManifestEntry,
    noise: &NoiseSource,
    snr_db: f64,
    seed: u64,
) -> Result<ManifestEntry> {
    let x = load_wav(src.join(&e.wav))?;
    let truth = read_annotations(src.join(&e.annotations))?;
    let y = degrade(&x, noise, snr_db, seed)?;
    write_recording(dst, &e.id, &y, &truth, &e.spec, Some(snr_db))
}

pub fn mix(src: &Path, out: &Path, snrs: &[f64], noise_path: Option<&Path>, seed: u64) -> Result<ExitCode> {
    let manifest = Manifest::read(src)?;
    let (noise, noise_name) = match noise_path {
        Some(p) => {
            let mut a = load_wav(p)?;
            if a.sample_rate() != manifest.sample_rate {
                a = resample(&a, manifest.sample_rate)?;
            }
            let name = format!("ambient:{}", p.display());
            (NoiseSource::Ambient(NoiseSignal::ambient(a)), name)
        }
        None => (NoiseSource::Awgn, "awgn".to_string()),
    };

    for &snr_db in snrs {
        if snr_db.is_nan() {
            return Err(Error::Param("SNR must be a number".into()));
        }
        let dst = out.join(snr_dir_name(snr_db));
        create_dir(&dst)?;
        write_json(
            &dst.join(CONFIG_SNAPSHOT),
            &MixSnapshot {
                source: src,
                noise: &noise_name,
                snr_db,
                seed,
            },
        )?;
        let recordings = manifest
            .recordings
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                let s = derive_seed(derive_seed(seed, i as u64), snr_db.to_bits());
                mix_one(src, &dst, e, &noise, snr_db, s)
            })
            .collect::<Result<Vec<_>>>()?;
        Manifest {
            noise: Some(noise_name.clone()),
            recordings,
            ..Manifest::new(manifest.sample_rate)
        }
        .write(&dst)?;
        println!(
            "{}: {} recordings at {snr_db} dB",
            dst.display(),
            manifest.recordings.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}
