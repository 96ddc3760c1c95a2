use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use pulsecut::signal_io::{load_wav, write_annotations};
use pulsecut::{segment, Error, PipelineConfig, Result};
use rayon::prelude::*;

use crate::util::{create_dir, list_files, stem, write_json, write_text, CONFIG_SNAPSHOT};

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub dump_alpha: bool,
    pub dump_dissimilarity: bool,
}

/// Expands directories to their WAV files and rejects stems that would
/// overwrite each other's outputs.
fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            files.extend(list_files(p, "wav")?);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::Param("no WAV files among the inputs".into()));
    }
    let mut seen = BTreeMap::new();
    for f in &files {
        if let Some(prev) = seen.insert(stem(f), f) {
            return Err(Error::Pairing(format!(
                "{} and {} share the output stem {:?}",
                prev.display(),
                f.display(),
                stem(f)
            )));
        }
    }
    Ok(files)
}

fn process(path: &Path, out: &Path, cfg: &PipelineConfig, opts: Options) -> Result<usize> {
    let x = load_wav(path)?;
    let seg = segment(&x, cfg, opts.dump_dissimilarity)?;
    let id = stem(path);
    write_annotations(out.join(format!("{id}.csv")), &seg.annotations())?;
    write_json(&out.join(format!("{id}.json")), &seg.sidecar())?;
    if opts.dump_alpha {
        write_text(&out.join(format!("{id}.alpha.csv")), &seg.alpha.to_csv())?;
    }
    if let Some(dm) = &seg.dissimilarity {
        let p = out.join(format!("{id}.dissim.bin"));
        std::fs::write(&p, dm.to_bytes()).map_err(|e| Error::io(&p, e))?;
    }
    Ok(seg.labeled.beats.len())
}

pub fn run(inputs: &[PathBuf], out: &Path, cfg: &PipelineConfig, opts: Options) -> Result<ExitCode> {
    let files = collect_inputs(inputs)?;
    create_dir(out)?;
    write_text(&out.join(CONFIG_SNAPSHOT), &cfg.to_json())?;

    let results: Vec<Result<usize>> = files.par_iter().map(|f| process(f, out, cfg, opts)).collect();
    let mut failed = 0;
    for (f, r) in files.iter().zip(results) {
        match r {
            Ok(n) => println!("{}: {n} beats", f.display()),
            Err(e @ (Error::NoAnchor(_) | Error::EmptyResult)) => {
                failed += 1;
                eprintln!("unsegmentable: {}: {e}", f.display());
            }
            Err(e) => {
                failed += 1;
                eprintln!("error: {}: {e}", f.display());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} recordings failed", files.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
