//! Scoring detected beats against ground truth.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::{Beat, BeatLabel};

/// Default matching tolerance in seconds.
pub const DEFAULT_TOL_S: f64 = 0.080;

/// `round(seconds * fs)`, the conversion used for every time constant.
pub fn seconds_to_samples(seconds: f64, fs: u32) -> usize {
    (seconds * f64::from(fs)).round().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub truth: usize,
    pub detected: usize,
    /// Detected minus true position, in samples.
    pub offset: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Sorted by truth index.
    pub pairs: Vec<MatchedPair>,
    pub unmatched_truth: Vec<usize>,
    pub unmatched_detected: Vec<usize>,
    pub tolerance: usize,
}

/// One-to-one matching within `|offset| <= tol`, accepting candidate pairs
/// nearest first. Equal distances go to the earlier truth beat, then the
/// earlier detection.
pub fn match_beats(truth: &[Beat], detected: &[Beat], tol: usize) -> MatchResult {
    let det_pos: Vec<usize> = detected.iter().map(|b| b.position).collect();
    let sorted = det_pos.windows(2).all(|w| w[0] <= w[1]);

    let mut cands: Vec<(usize, usize, usize)> = Vec::new();
    for (ti, t) in truth.iter().enumerate() {
        let lo = t.position.saturating_sub(tol);
        let hi = t.position.saturating_add(tol);
        if sorted {
            let start = det_pos.partition_point(|&p| p < lo);
            for (di, &p) in det_pos.iter().enumerate().skip(start) {
                if p > hi {
                    break;
                }
                cands.push((p.abs_diff(t.position), ti, di));
            }
        } else {
            for (di, &p) in det_pos.iter().enumerate() {
                if (lo..=hi).contains(&p) {
                    cands.push((p.abs_diff(t.position), ti, di));
                }
            }
        }
    }
    cands.sort_unstable();

    let mut t_used = vec![false; truth.len()];
    let mut d_used = vec![false; detected.len()];
    let mut pairs = Vec::new();
    for (_, ti, di) in cands {
        if !t_used[ti] && !d_used[di] {
            t_used[ti] = true;
            d_used[di] = true;
            pairs.push(MatchedPair {
                truth: ti,
                detected: di,
                offset: det_pos[di] as i64 - truth[ti].position as i64,
            });
        }
    }
    pairs.sort_by_key(|p| p.truth);
    MatchResult {
        pairs,
        unmatched_truth: (0..truth.len()).filter(|&i| !t_used[i]).collect(),
        unmatched_detected: (0..detected.len()).filter(|&i| !d_used[i]).collect(),
        tolerance: tol,
    }
}

/// Detection scores in percent; `te_ms` is the mean absolute offset of the
/// matched beats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub te_ms: f64,
}

fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64 * 100.0
    }
}

/// Counts and scores from a match. True negatives are not defined for
/// event detection, so accuracy is `TP / (TP + FP + FN)`.
pub fn detection_metrics(m: &MatchResult, fs: u32) -> DetectionReport {
    let tp = m.pairs.len();
    let fp = m.unmatched_detected.len();
    let fn_ = m.unmatched_truth.len();
    let precision = percent(tp, tp + fp);
    let recall = percent(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let te_ms = if tp == 0 || fs == 0 {
        0.0
    } else {
        let total: u64 = m.pairs.iter().map(|p| p.offset.unsigned_abs()).sum();
        total as f64 / tp as f64 / f64::from(fs) * 1000.0
    };
    DetectionReport {
        tp,
        fp,
        fn_,
        accuracy: percent(tp, tp + fp + fn_),
        precision,
        recall,
        f1,
        te_ms,
    }
}

/// Label agreement on matched beats. Sensitivity is the hit rate on true
/// S2 beats and specificity the hit rate on true S1 beats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub ts1: usize,
    pub ts2: usize,
    /// True S1 labeled S2.
    pub fs1: usize,
    /// True S2 labeled S1.
    pub fs2: usize,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

impl ClassificationReport {
    pub fn from_counts(ts1: usize, ts2: usize, fs1: usize, fs2: usize) -> Self {
        Self {
            ts1,
            ts2,
            fs1,
            fs2,
            accuracy: percent(ts1 + ts2, ts1 + ts2 + fs1 + fs2),
            sensitivity: percent(ts2, ts2 + fs2),
            specificity: percent(ts1, ts1 + fs1),
        }
    }
}

pub fn classification_metrics(m: &MatchResult, truth: &[Beat], detected: &[Beat]) -> ClassificationReport {
    let (mut ts1, mut ts2, mut fs1, mut fs2) = (0, 0, 0, 0);
    for p in &m.pairs {
        match (truth[p.truth].label, detected[p.detected].label) {
            (BeatLabel::S1, BeatLabel::S1) => ts1 += 1,
            (BeatLabel::S2, BeatLabel::S2) => ts2 += 1,
            (BeatLabel::S1, BeatLabel::S2) => fs1 += 1,
            (BeatLabel::S2, BeatLabel::S1) => fs2 += 1,
        }
    }
    ClassificationReport::from_counts(ts1, ts2, fs1, fs2)
}

/// Everything scored for one recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingReport {
    pub id: String,
    pub truth_beats: usize,
    pub detected_beats: usize,
    pub tolerance_samples: usize,
    pub detection: DetectionReport,
    pub classification: ClassificationReport,
}

/// Matches and scores one recording.
pub fn evaluate_recording(id: &str, truth: &[Beat], detected: &[Beat], tol: usize, fs: u32) -> RecordingReport {
    let m = match_beats(truth, detected, tol);
    RecordingReport {
        id: id.to_string(),
        truth_beats: truth.len(),
        detected_beats: detected.len(),
        tolerance_samples: tol,
        detection: detection_metrics(&m, fs),
        classification: classification_metrics(&m, truth, detected),
    }
}

/// Metric names in summary order.
pub const SUMMARY_METRICS: [&str; 8] = [
    "accuracy",
    "precision",
    "recall",
    "f1",
    "te_ms",
    "cls_accuracy",
    "sensitivity",
    "specificity",
];

impl RecordingReport {
    /// Value of one of [`SUMMARY_METRICS`].
    pub fn metric(&self, name: &str) -> Option<f64> {
        let d = &self.detection;
        let c = &self.classification;
        Some(match name {
            "accuracy" => d.accuracy,
            "precision" => d.precision,
            "recall" => d.recall,
            "f1" => d.f1,
            "te_ms" => d.te_ms,
            "cls_accuracy" => c.accuracy,
            "sensitivity" => c.sensitivity,
            "specificity" => c.specificity,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub mean: f64,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub recordings: usize,
    pub metrics: Vec<MetricSummary>,
}

impl CorpusSummary {
    pub fn get(&self, metric: &str) -> Option<&MetricSummary> {
        self.metrics.iter().find(|m| m.metric == metric)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("metric,mean,median,p25,p75\n");
        for m in &self.metrics {
            let _ = writeln!(s, "{},{},{},{},{}", m.metric, m.mean, m.median, m.p25, m.p75);
        }
        s
    }
}

/// Percentile of sorted data by linear interpolation between the two
/// nearest ranks at position `p * (n - 1)`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Mean, median and quartiles of every summary metric across recordings.
pub fn aggregate(reports: &[RecordingReport]) -> Result<CorpusSummary> {
    if reports.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let metrics = SUMMARY_METRICS
        .iter()
        .map(|&name| {
            let mut v: Vec<f64> = reports.iter().filter_map(|r| r.metric(name)).collect();
            v.sort_by(f64::total_cmp);
            MetricSummary {
                metric: name.to_string(),
                mean: v.iter().sum::<f64>() / v.len() as f64,
                median: percentile(&v, 0.5),
                p25: percentile(&v, 0.25),
                p75: percentile(&v, 0.75),
            }
        })
        .collect();
    Ok(CorpusSummary {
        recordings: reports.len(),
        metrics,
    })
}
