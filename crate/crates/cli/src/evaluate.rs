use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use pulsecut::evaluation::{aggregate, evaluate_recording, seconds_to_samples, RecordingReport};
use pulsecut::signal_io::{parse_annotations, read_annotations};
use pulsecut::{Error, PipelineConfig, Result};
use rayon::prelude::*;

use crate::util::{create_dir, list_files, stem, write_json, write_text, CONFIG_SNAPSHOT};

pub const SUMMARY_FILE: &str = "summary.csv";

/// Annotation stems in `dir`. Names with an inner dot, such as the
/// `.alpha.csv` dumps, are not annotation files.
fn annotation_stems(dir: &Path) -> Result<BTreeSet<String>> {
    Ok(list_files(dir, "csv")?
        .iter()
        .map(|p| stem(p))
        .filter(|s| !s.contains('.'))
        .collect())
}

fn pair(detected: &Path, truth: &Path) -> Result<Vec<String>> {
    let d = annotation_stems(detected)?;
    let t = annotation_stems(truth)?;
    if d != t {
        let only = |a: &BTreeSet<String>, b: &BTreeSet<String>| a.difference(b).cloned().collect::<Vec<_>>().join(", ");
        return Err(Error::Pairing(format!(
            "stems differ; only detected: [{}]; only truth: [{}]",
            only(&d, &t),
            only(&t, &d)
        )));
    }
    Ok(d.into_iter().collect())
}

fn score(id: &str, detected: &Path, truth: &Path, cfg: &PipelineConfig) -> Result<RecordingReport> {
    let file = |dir: &Path| -> PathBuf { dir.join(format!("{id}.csv")) };
    let t = read_annotations(file(truth))?;
    let d = parse_annotations(file(detected), t.sample_rate)?;
    let tol = seconds_to_samples(cfg.tol_ms / 1000.0, t.sample_rate);
    Ok(evaluate_recording(id, &t.beats, &d.beats, tol, t.sample_rate))
}

pub fn run(detected: &Path, truth: &Path, out: &Path, cfg: &PipelineConfig) -> Result<ExitCode> {
    let ids = pair(detected, truth)?;
    let reports: Vec<RecordingReport> = ids
        .par_iter()
        .map(|id| score(id, detected, truth, cfg))
        .collect::<Result<_>>()?;
    let summary = aggregate(&reports)?;

    create_dir(out)?;
    write_text(&out.join(CONFIG_SNAPSHOT), &cfg.to_json())?;
    for r in &reports {
        write_json(&out.join(format!("{}.json", r.id)), r)?;
    }
    let csv = summary.to_csv();
    write_text(&out.join(SUMMARY_FILE), &csv)?;
    print!("{csv}");
    Ok(ExitCode::SUCCESS)
}
