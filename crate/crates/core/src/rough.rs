//! Rough beat detection: generalized Kullback-Leibler dissimilarity between
//! spectrogram frames, per-frame divergence, and peak picking.
//!
//! Heart sounds are short and spectrally alike, systole/diastole frames are
//! long and alike among themselves. A beat frame is therefore far from most
//! other frames, and its row of the dissimilarity matrix integrates to a
//! large value; peaks of that integral mark candidate S1/S2 frames.

use std::collections::BTreeSet;
use std::fmt::Write as _;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Spectrogram, StftParams};

/// T x T matrix of `d_KL(X_i | X_j)`, row-major. Not symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    d: Vec<f64>,
    n: usize,
}

impl DissimilarityMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.d.chunks_exact(self.n)
    }

    /// Binary dump: `b"PCGD"`, `u32` T, 8 reserved zero bytes, then T*T
    /// little-endian `f64` values row by row.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.d.len());
        out.extend_from_slice(b"PCGD");
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&[0u8; 8]);
        for v in &self.d {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 || &bytes[..4] != b"PCGD" {
            return Err(Error::Format("missing PCGD header".into()));
        }
        let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
        let body = &bytes[16..];
        if body.len() != n * n * 8 {
            return Err(Error::Format(format!(
                "expected {} matrix bytes for T={n}, found {}",
                n * n * 8,
                body.len()
            )));
        }
        let d = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(Self { d, n })
    }
}

/// Per-frame integrated divergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceProfile {
    pub alpha: Vec<f64>,
}

impl DivergenceProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("frame,alpha\n");
        for (i, a) in self.alpha.iter().enumerate() {
            let _ = writeln!(s, "{i},{a:e}");
        }
        s
    }
}

/// Candidate beat frames, 0-based and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameBeats {
    pub frames: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakConfig {
    /// Peaks closer than this many frames suppress the lower one.
    pub min_sep_frames: usize,
    /// Peaks below `rel_height * max(alpha)` are ignored.
    pub rel_height: f64,
}

impl PeakConfig {
    pub const DEFAULT_MIN_SEP_S: f64 = 0.160;
    pub const DEFAULT_REL_HEIGHT: f64 = 0.2;

    /// Separation of one maximal heart-sound duration, in frames of `p`.
    pub fn for_params(p: &StftParams) -> Self {
        Self {
            min_sep_frames: (Self::DEFAULT_MIN_SEP_S / p.hop_seconds()).ceil() as usize,
            rel_height: Self::DEFAULT_REL_HEIGHT,
        }
    }
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self::for_params(&StftParams::default())
    }
}

/// Frame data restricted to bins that vary across frames, with logs
/// precomputed. A bin holding one value in every frame contributes exactly
/// zero to every entry, so dropping it leaves each sum bit-identical.
struct ActiveFrames {
    vals: Vec<f64>,
    logs: Vec<f64>,
    bins: usize,
    frames: usize,
}

impl ActiveFrames {
    fn new(spec: &Spectrogram) -> Self {
        let f = spec.num_bins();
        let t = spec.num_frames();
        let active: Vec<usize> = (0..f)
            .filter(|&k| {
                let first = spec.get(k, 0);
                (1..t).any(|j| spec.get(k, j) != first)
            })
            .collect();
        let mut vals = Vec::with_capacity(t * active.len());
        for frame in spec.frames() {
            vals.extend(active.iter().map(|&k| frame[k]));
        }
        let logs = vals.iter().map(|v| v.ln()).collect();
        Self {
            vals,
            logs,
            bins: active.len(),
            frames: t,
        }
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        let b = self.bins;
        let xi = &self.vals[i * b..(i + 1) * b];
        let li = &self.logs[i * b..(i + 1) * b];
        for (j, slot) in out.iter_mut().enumerate() {
            if j == i {
                *slot = 0.0;
                continue;
            }
            let xj = &self.vals[j * b..(j + 1) * b];
            let lj = &self.logs[j * b..(j + 1) * b];
            let mut acc = 0.0;
            for k in 0..b {
                acc += xi[k] * (li[k] - lj[k]) - xi[k] + xj[k];
            }
            // Rounding can leave a tiny negative where the exact value is 0.
            *slot = acc.max(0.0);
        }
    }
}

fn check_input(spec: &Spectrogram) -> Result<()> {
    if spec.num_frames() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 frames, got {}",
            spec.num_frames()
        )));
    }
    if spec.frames().flatten().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Param(
            "spectrogram entries must be positive and finite (normalize first)".into(),
        ));
    }
    Ok(())
}

/// Generalized KL divergence between every ordered pair of frames:
/// `D[i][j] = sum_f X[f,i] ln(X[f,i]/X[f,j]) - X[f,i] + X[f,j]`.
pub fn dissimilarity_matrix(spec: &Spectrogram) -> Result<DissimilarityMatrix> {
    check_input(spec)?;
    let af = ActiveFrames::new(spec);
    let n = af.frames;
    let mut d = vec![0.0; n * n];
    #[cfg(feature = "parallel")]
    d.par_chunks_mut(n).enumerate().for_each(|(i, row)| af.fill_row(i, row));
    #[cfg(not(feature = "parallel"))]
    d.chunks_mut(n).enumerate().for_each(|(i, row)| af.fill_row(i, row));
    Ok(DissimilarityMatrix { d, n })
}

/// Trapezoidal area under one row at unit spacing.
pub fn trapezoid(row: &[f64]) -> f64 {
    row.windows(2).map(|w| (w[0] + w[1]) / 2.0).sum()
}

pub fn divergence_profile(dm: &DissimilarityMatrix) -> Result<DivergenceProfile> {
    if dm.len() < 2 {
        return Err(Error::Degenerate("need at least 2 frames".into()));
    }
    Ok(DivergenceProfile {
        alpha: dm.rows().map(trapezoid).collect(),
    })
}

/// Same result as `divergence_profile(&dissimilarity_matrix(spec)?)`
/// without materializing the T x T matrix.
pub fn divergence_profile_streaming(spec: &Spectrogram) -> Result<DivergenceProfile> {
    check_input(spec)?;
    let af = ActiveFrames::new(spec);
    let n = af.frames;
    let row_alpha = |buf: &mut Vec<f64>, i: usize| {
        af.fill_row(i, buf);
        trapezoid(buf)
    };
    #[cfg(feature = "parallel")]
    let alpha = (0..n).into_par_iter().map_init(|| vec![0.0; n], row_alpha).collect();
    #[cfg(not(feature = "parallel"))]
    let alpha = {
        let mut buf = vec![0.0; n];
        (0..n).map(|i| row_alpha(&mut buf, i)).collect()
    };
    Ok(DivergenceProfile { alpha })
}

/// Interior local maxima of `alpha` above `rel_height * max`, thinned so no
/// two survivors are closer than `min_sep_frames` (higher peak wins, earlier
/// frame on equal height).
pub fn pick_beat_frames(prof: &DivergenceProfile, cfg: &PeakConfig) -> Result<FrameBeats> {
    let a = &prof.alpha;
    if a.len() < 3 {
        return Err(Error::Param(format!("need at least 3 frames, got {}", a.len())));
    }
    let max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = cfg.rel_height * max;

    let mut peaks: Vec<usize> = (1..a.len() - 1)
        .filter(|&i| a[i] > a[i - 1] && a[i] >= a[i + 1] && a[i] >= floor)
        .collect();
    peaks.sort_by(|&x, &y| a[y].total_cmp(&a[x]).then(x.cmp(&y)));

    let mut kept = BTreeSet::new();
    for p in peaks {
        let lo = p.saturating_sub(cfg.min_sep_frames.saturating_sub(1));
        let hi = p + cfg.min_sep_frames.saturating_sub(1);
        if kept.range(lo..=hi).next().is_none() {
            kept.insert(p);
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(FrameBeats {
        frames: kept.into_iter().collect(),
    })
}
