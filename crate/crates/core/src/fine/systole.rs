use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_HIST_BINS: usize = 5;
pub const MAX_HIST_BINS: usize = 50;

/// Systole duration taken as the mode of the beat-distance histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystoleEstimate {
    /// Center of the most populated bin, in samples.
    pub beta: f64,
    /// `bins + 1` edges; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub zetas: Vec<usize>,
}

impl SystoleEstimate {
    /// `beta` rounded to whole samples, as used for inserted beats.
    pub fn beta_samples(&self) -> usize {
        self.beta.round() as usize
    }
}

/// Equal-width histogram of `zetas` over `[min, max]` with `bins` bins;
/// `beta` is the center of the fullest bin, the shorter-distance bin
/// winning ties.
pub fn estimate_systole(zetas: &[usize], bins: usize) -> Result<SystoleEstimate> {
    if !(MIN_HIST_BINS..=MAX_HIST_BINS).contains(&bins) {
        return Err(Error::Param(format!(
            "histogram bins must lie in [{MIN_HIST_BINS}, {MAX_HIST_BINS}], got {bins}"
        )));
    }
    if zetas.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 beat distances, got {}",
            zetas.len()
        )));
    }
    let lo = *zetas.iter().min().expect("non-empty") as f64;
    let hi = *zetas.iter().max().expect("non-empty") as f64;

    if lo == hi {
        let mut counts = vec![0; bins];
        counts[0] = zetas.len();
        return Ok(SystoleEstimate {
            beta: lo,
            edges: vec![lo; bins + 1],
            counts,
            zetas: zetas.to_vec(),
        });
    }

    let range = hi - lo;
    let mut edges: Vec<f64> = (0..bins).map(|k| lo + range * k as f64 / bins as f64).collect();
    edges.push(hi);

    let mut counts = vec![0usize; bins];
    for &z in zetas {
        let z = z as f64;
        // Index of the last left edge <= z, capped so `hi` lands in the last bin.
        let k = edges[..bins].partition_point(|&e| e <= z) - 1;
        counts[k] += 1;
    }
    let best = counts
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("bins > 0");

    Ok(SystoleEstimate {
        beta: (edges[best] + edges[best + 1]) / 2.0,
        edges,
        counts,
        zetas: zetas.to_vec(),
    })
}
