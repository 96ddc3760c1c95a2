//! Fine beat detection: sample-level refinement, systole estimation, and
//! the sliding-window verification/correction/classification sweep.

mod anchor;
mod sweep;
mod systole;

pub use anchor::{find_anchor_cycles, CycleAnchor};
pub use sweep::{verify_correct_classify, Direction, HrTracking, LabeledBeats, Scenario, ScenarioCounts, WindowStep};
pub use systole::{estimate_systole, SystoleEstimate, MAX_HIST_BINS, MIN_HIST_BINS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rough::FrameBeats;
use crate::signal_io::PcgSignal;
use crate::spectral::StftParams;

/// Sample positions (0-based, strictly increasing) of S1/S2 candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBeats {
    pub positions: Vec<usize>,
}

/// Moves each candidate frame to the sample of largest `|x|` among the
/// frame's `window_len` samples starting at `frame * hop`. The last window
/// is clipped to the signal end; equal maxima resolve to the earliest
/// sample; repeated positions collapse.
pub fn refine_to_samples(x: &PcgSignal, fb: &FrameBeats, p: &StftParams) -> Result<SampleBeats> {
    let samples = x.samples();
    let mut positions: Vec<usize> = Vec::with_capacity(fb.frames.len());
    for &frame in &fb.frames {
        let start = p.frame_start(frame);
        if start >= samples.len() {
            return Err(Error::Param(format!(
                "frame {frame} starts at sample {start}, beyond the {}-sample signal",
                samples.len()
            )));
        }
        let end = (start + p.window_len).min(samples.len());
        let mut best = start;
        for m in start + 1..end {
            if samples[m].abs() > samples[best].abs() {
                best = m;
            }
        }
        if positions.last() != Some(&best) {
            positions.push(best);
        }
    }
    Ok(SampleBeats { positions })
}

/// Distances between consecutive sample beats.
pub fn beat_distances(sb: &SampleBeats) -> Result<Vec<usize>> {
    if sb.positions.len() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 beats for distances, got {}",
            sb.positions.len()
        )));
    }
    Ok(sb.positions.windows(2).map(|w| w[1] - w[0]).collect())
}
