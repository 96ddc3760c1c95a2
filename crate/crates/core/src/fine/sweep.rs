use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{CycleAnchor, SampleBeats, SystoleEstimate};
use crate::error::{Error, Result};
use crate::signal_io::{Beat, BeatLabel, PcgSignal};

/// Consecutive Scenario-A steps at or above this count raise a warning.
const EMPTY_RUN_WARNING: usize = 3;

/// How the expected cycle length follows the beats during a sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HrTracking {
    /// Distance between the two most recent S1 beats.
    Last,
    /// Mean of every cycle length seen so far in the sweep, the anchor's
    /// included, rounded to whole samples.
    #[default]
    Mean,
}

struct HrTracker {
    mode: HrTracking,
    sum: usize,
    n: usize,
    current: usize,
}

impl HrTracker {
    fn new(mode: HrTracking, hr_init: usize) -> Self {
        Self {
            mode,
            sum: hr_init,
            n: 1,
            current: hr_init,
        }
    }

    fn push(&mut self, cycle: usize) -> usize {
        self.sum += cycle;
        self.n += 1;
        self.current = match self.mode {
            HrTracking::Last => cycle,
            HrTracking::Mean => (self.sum + self.n / 2) / self.n,
        };
        self.current
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
}

/// How many candidate beats a cycle window held: none (A), one (B), two (C)
/// or more (D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioCounts {
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "D")]
    pub d: usize,
}

impl ScenarioCounts {
    fn bump(&mut self, s: Scenario) {
        match s {
            Scenario::A => self.a += 1,
            Scenario::B => self.b += 1,
            Scenario::C => self.c += 1,
            Scenario::D => self.d += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.a + self.b + self.c + self.d
    }
}

/// One window placement of the sweep and what it produced. `s1`/`s2` are
/// `None` only when an inserted beat would fall outside the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowStep {
    pub direction: Direction,
    /// Inclusive window bounds in samples; may extend past the signal.
    pub lo: i64,
    pub hi: i64,
    pub scenario: Scenario,
    pub candidates: usize,
    pub s1: Option<usize>,
    pub s2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledBeats {
    pub beats: Vec<Beat>,
    /// Cycle length in samples at every cycle, left to right; the anchor's
    /// initial value sits between the leftward and rightward entries.
    pub hr_trace: Vec<usize>,
    pub counts: ScenarioCounts,
    pub steps: Vec<WindowStep>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Cycle {
    s1: usize,
    s2: usize,
}

/// What a single window step decided.
enum Outcome {
    Cycle(Cycle),
    /// Only the beat nearer the anchor fits in the signal; the sweep ends.
    Partial(Beat),
    Stop,
}

struct Sweep<'a> {
    len: usize,
    beta: usize,
    beta_f: f64,
    eta: usize,
    pool: BTreeSet<usize>,
    steps: &'a mut Vec<WindowStep>,
    counts: &'a mut ScenarioCounts,
    warnings: &'a mut Vec<String>,
}

impl Sweep<'_> {
    fn record(&mut self, step: WindowStep) {
        self.counts.bump(step.scenario);
        self.steps.push(step);
    }

    /// Removes and returns the pool beats in `[lo, hi]`.
    fn take(&mut self, lo: usize, hi: usize) -> Vec<usize> {
        if lo > hi {
            return Vec::new();
        }
        let found: Vec<usize> = self.pool.range(lo..=hi).copied().collect();
        for p in &found {
            self.pool.remove(p);
        }
        found
    }

    /// Pair of candidates whose separation is closest to beta, earliest
    /// pair on ties.
    fn closest_pair(&self, c: &[usize]) -> Cycle {
        let mut best = (f64::INFINITY, 0, 1);
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let dev = ((c[j] - c[i]) as f64 - self.beta_f).abs();
                if dev < best.0 {
                    best = (dev, i, j);
                }
            }
        }
        Cycle {
            s1: c[best.1],
            s2: c[best.2],
        }
    }

    fn warn_runs(&mut self, dir: Direction) {
        let mut run = 0;
        let flush = |run: usize, warnings: &mut Vec<String>| {
            if run >= EMPTY_RUN_WARNING {
                warnings.push(format!(
                    "{run} consecutive empty windows ({dir:?} sweep); beats were inserted from the heart-rate estimate alone"
                ));
            }
        };
        for s in self.steps.iter().filter(|s| s.direction == dir) {
            if s.scenario == Scenario::A {
                run += 1;
            } else {
                flush(run, self.warnings);
                run = 0;
            }
        }
        flush(run, self.warnings);
    }

    fn step_right(&mut self, prev: Cycle, hr: usize) -> Outcome {
        let expected = prev.s1 + hr;
        let lo = expected as i64 - self.eta as i64;
        let hi = (expected + self.beta + self.eta) as i64;
        if lo >= self.len as i64 {
            return Outcome::Stop;
        }
        let cand = self.take(prev.s2 + 1, (hi as usize).min(self.len - 1));
        let mut step = WindowStep {
            direction: Direction::Right,
            lo,
            hi,
            scenario: Scenario::A,
            candidates: cand.len(),
            s1: None,
            s2: None,
        };
        let cycle = match cand.len() {
            0 => {
                if hi >= self.len as i64 {
                    return Outcome::Stop;
                }
                // A cycle can never be shorter than its own systole, which a
                // poor anchor can imply.
                let shift = hr.max(prev.s2 - prev.s1 + 1);
                Cycle {
                    s1: prev.s1 + shift,
                    s2: prev.s2 + shift,
                }
            }
            1 => {
                step.scenario = Scenario::B;
                let c = cand[0];
                let as_s1 = c as i64 - lo <= hi - c as i64;
                // Reading the beat as S2 needs room for its S1 after the previous cycle.
                if !as_s1 && c >= prev.s2 + 1 + self.beta {
                    Cycle {
                        s1: c - self.beta,
                        s2: c,
                    }
                } else {
                    Cycle {
                        s1: c,
                        s2: c + self.beta,
                    }
                }
            }
            2 => {
                step.scenario = Scenario::C;
                Cycle {
                    s1: cand[0],
                    s2: cand[1],
                }
            }
            _ => {
                step.scenario = Scenario::D;
                self.closest_pair(&cand)
            }
        };
        step.s1 = Some(cycle.s1);
        if cycle.s2 >= self.len {
            self.record(step);
            return Outcome::Partial(Beat::new(cycle.s1, BeatLabel::S1));
        }
        step.s2 = Some(cycle.s2);
        self.record(step);
        Outcome::Cycle(cycle)
    }

    fn step_left(&mut self, next: Cycle, hr: usize) -> Outcome {
        let expected = next.s1 as i64 - hr as i64;
        let lo = expected - self.eta as i64;
        let hi = expected + (self.beta + self.eta) as i64;
        if hi < 0 {
            return Outcome::Stop;
        }
        let cand = self.take(lo.max(0) as usize, next.s1 - 1);
        let mut step = WindowStep {
            direction: Direction::Left,
            lo,
            hi,
            scenario: Scenario::A,
            candidates: cand.len(),
            s1: None,
            s2: None,
        };
        let cycle = match cand.len() {
            0 => {
                let shift = hr.max(next.s2 - next.s1 + 1);
                if lo < 0 || shift > next.s1 {
                    return Outcome::Stop;
                }
                Cycle {
                    s1: next.s1 - shift,
                    s2: next.s2 - shift,
                }
            }
            1 => {
                step.scenario = Scenario::B;
                let c = cand[0];
                let as_s1 = c as i64 - lo <= hi - c as i64;
                // Reading the beat as S1 needs room for its S2 before the next cycle.
                if as_s1 && c + self.beta < next.s1 {
                    Cycle {
                        s1: c,
                        s2: c + self.beta,
                    }
                } else if c < self.beta {
                    step.s2 = Some(c);
                    self.record(step);
                    return Outcome::Partial(Beat::new(c, BeatLabel::S2));
                } else {
                    Cycle {
                        s1: c - self.beta,
                        s2: c,
                    }
                }
            }
            2 => {
                step.scenario = Scenario::C;
                Cycle {
                    s1: cand[0],
                    s2: cand[1],
                }
            }
            _ => {
                step.scenario = Scenario::D;
                self.closest_pair(&cand)
            }
        };
        step.s1 = Some(cycle.s1);
        step.s2 = Some(cycle.s2);
        self.record(step);
        Outcome::Cycle(cycle)
    }
}

/// Labels the beats cycle by cycle outward from the anchor, repairing
/// windows that hold too few or too many candidates.
///
/// Each window covers `[E - eta, E + beta + eta]` where `E` is the expected
/// S1 of the next cycle (previous S1 plus the tracked cycle length, or the
/// mirror of that to the left). Both sweeps start from the anchor's cycle
/// length and update it after every step as `tracking` says. Beats outside
/// every window are dropped.
pub fn verify_correct_classify(
    x: &PcgSignal,
    sb: &SampleBeats,
    est: &SystoleEstimate,
    anchor: &CycleAnchor,
    eta: usize,
    tracking: HrTracking,
) -> Result<LabeledBeats> {
    let a = anchor;
    if !(a.c1_start < a.c1_end && a.c1_end < a.c2_start && a.c2_start < a.c2_end) {
        return Err(Error::Param(format!("anchor beats are not increasing: {a:?}")));
    }
    if a.c2_end >= x.len() {
        return Err(Error::Param(format!(
            "anchor beat {} lies outside the {}-sample signal",
            a.c2_end,
            x.len()
        )));
    }
    if !est.beta.is_finite() || est.beta <= 0.0 {
        return Err(Error::Param(format!(
            "systole estimate must be positive, got {}",
            est.beta
        )));
    }

    let mut pool: BTreeSet<usize> = sb.positions.iter().copied().collect();
    for p in [a.c1_start, a.c1_end, a.c2_start, a.c2_end] {
        pool.remove(&p);
    }
    let mut steps = Vec::new();
    let mut counts = ScenarioCounts::default();
    let mut warnings = Vec::new();
    let mut sweep = Sweep {
        len: x.len(),
        beta: est.beta_samples(),
        beta_f: est.beta,
        eta,
        pool,
        steps: &mut steps,
        counts: &mut counts,
        warnings: &mut warnings,
    };

    let mut right: Vec<Beat> = Vec::new();
    let mut right_hr = Vec::new();
    let mut prev = Cycle {
        s1: a.c2_start,
        s2: a.c2_end,
    };
    let mut hr = HrTracker::new(tracking, a.hr_init);
    loop {
        match sweep.step_right(prev, hr.current) {
            Outcome::Cycle(c) => {
                right.push(Beat::new(c.s1, BeatLabel::S1));
                right.push(Beat::new(c.s2, BeatLabel::S2));
                right_hr.push(hr.push(c.s1 - prev.s1));
                prev = c;
            }
            Outcome::Partial(b) => {
                right.push(b);
                break;
            }
            Outcome::Stop => break,
        }
    }

    let mut left: Vec<Beat> = Vec::new();
    let mut left_hr = Vec::new();
    let mut next = Cycle {
        s1: a.c1_start,
        s2: a.c1_end,
    };
    let mut hr = HrTracker::new(tracking, a.hr_init);
    loop {
        match sweep.step_left(next, hr.current) {
            Outcome::Cycle(c) => {
                left.push(Beat::new(c.s2, BeatLabel::S2));
                left.push(Beat::new(c.s1, BeatLabel::S1));
                left_hr.push(hr.push(next.s1 - c.s1));
                next = c;
            }
            Outcome::Partial(b) => {
                left.push(b);
                break;
            }
            Outcome::Stop => break,
        }
    }

    sweep.warn_runs(Direction::Right);
    sweep.warn_runs(Direction::Left);

    let mut beats: Vec<Beat> = left.into_iter().rev().collect();
    beats.extend([
        Beat::new(a.c1_start, BeatLabel::S1),
        Beat::new(a.c1_end, BeatLabel::S2),
        Beat::new(a.c2_start, BeatLabel::S1),
        Beat::new(a.c2_end, BeatLabel::S2),
    ]);
    beats.extend(right);

    for w in beats.windows(2) {
        if w[1].position <= w[0].position || w[1].label == w[0].label {
            return Err(Error::Internal(format!(
                "sweep produced {:?} followed by {:?}",
                w[0], w[1]
            )));
        }
    }

    let mut hr_trace: Vec<usize> = left_hr.into_iter().rev().collect();
    hr_trace.push(a.hr_init);
    hr_trace.extend(right_hr);

    Ok(LabeledBeats {
        beats,
        hr_trace,
        counts,
        steps,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fine::find_anchor_cycles;

    const ETA: usize = 655;

    fn est(beta: f64) -> SystoleEstimate {
        SystoleEstimate {
            beta,
            edges: vec![],
            counts: vec![],
            zetas: vec![],
        }
    }

    /// Eight cycles: S1 at 500 + cumulative, systole 1200, diastoles within
    /// +-10% of 2000.
    fn clean() -> Vec<usize> {
        vec![
            500, 1700, 3700, 4900, 7000, 8200, 10100, 11300, 13350, 14550, 16500, 17700, 19700, 20900, 23000, 24200,
        ]
    }

    fn run(positions: Vec<usize>, len: usize) -> LabeledBeats {
        run_with(positions, len, HrTracking::Last)
    }

    fn run_with(positions: Vec<usize>, len: usize, tracking: HrTracking) -> LabeledBeats {
        let x = PcgSignal::new(vec![0.0; len], 4096, "t").unwrap();
        let sb = SampleBeats { positions };
        let e = est(1200.0);
        let anchor = find_anchor_cycles(&sb, &e).unwrap();
        verify_correct_classify(&x, &sb, &e, &anchor, ETA, tracking).unwrap()
    }

    fn positions(lb: &LabeledBeats) -> Vec<usize> {
        lb.beats.iter().map(|b| b.position).collect()
    }

    fn assert_alternating_from_s1(lb: &LabeledBeats) {
        for (i, b) in lb.beats.iter().enumerate() {
            let want = if i % 2 == 0 { BeatLabel::S1 } else { BeatLabel::S2 };
            assert_eq!(b.label, want, "beat {i}");
        }
    }

    #[test]
    fn clean_input_passes_through() {
        let lb = run(clean(), 25_000);
        assert_eq!(positions(&lb), clean());
        assert_alternating_from_s1(&lb);
        assert_eq!(lb.counts, ScenarioCounts { a: 0, b: 0, c: 6, d: 0 });
        assert_eq!(lb.hr_trace, vec![3200, 3300, 3100, 3250, 3150, 3200, 3300]);
        assert!(lb.warnings.is_empty());
    }

    #[test]
    fn mean_tracking_rounds_running_mean() {
        let lb = run_with(clean(), 25_000, HrTracking::Mean);
        assert_eq!(positions(&lb), clean());
        assert_eq!(lb.hr_trace, vec![3200, 3250, 3200, 3213, 3200, 3200, 3214]);
    }

    #[test]
    fn early_beat_before_window_joins_next_cycle() {
        // Every beat from cycle 4 on moves 700 samples earlier, so its S1
        // lands before the window opens at 7000 + 3250 - 655.
        let p: Vec<usize> = clean()
            .into_iter()
            .map(|v| if v >= 10100 { v - 700 } else { v })
            .collect();
        let lb = run_with(p.clone(), 25_000, HrTracking::Mean);
        assert_eq!(positions(&lb), p);
        assert_alternating_from_s1(&lb);
        let s = lb.steps.iter().find(|s| s.s1 == Some(9400)).unwrap();
        assert_eq!(s.lo, 9595);
        assert_eq!((s.scenario, s.s2), (Scenario::C, Some(10600)));
    }

    #[test]
    fn missing_cycle_is_reinserted() {
        let mut p = clean();
        p.retain(|&v| v != 10100 && v != 11300);
        let lb = run(p, 25_000);
        let mut want = clean();
        want[6] = 7000 + 3300;
        want[7] = 8200 + 3300;
        assert_eq!(positions(&lb), want);
        assert_alternating_from_s1(&lb);
        assert_eq!(lb.counts.a, 1);
        let a = lb.steps.iter().find(|s| s.scenario == Scenario::A).unwrap();
        assert_eq!((a.s1, a.s2), (Some(10300), Some(11500)));
        assert_eq!(a.s2.unwrap() - a.s1.unwrap(), 8200 - 7000);
    }

    #[test]
    fn spurious_beat_is_discarded() {
        let mut p = clean();
        p.insert(9, 14000);
        let lb = run(p, 25_000);
        assert_eq!(positions(&lb), clean());
        assert_eq!(lb.counts.d, 1);
        let d = lb.steps.iter().find(|s| s.scenario == Scenario::D).unwrap();
        assert_eq!(d.candidates, 3);
        // Exhaustive oracle over every candidate pair.
        let cand = [13350usize, 14000, 14550];
        let mut pairs = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                pairs.push((cand[i], cand[j]));
            }
        }
        let best = pairs.iter().min_by_key(|(s, t)| (t - s).abs_diff(1200)).unwrap();
        assert_eq!((d.s1.unwrap(), d.s2.unwrap()), *best);
    }

    #[test]
    fn lone_early_beat_is_s1() {
        let mut p = clean();
        p.retain(|&v| v != 14550);
        let lb = run(p, 25_000);
        assert_eq!(positions(&lb), clean());
        assert_alternating_from_s1(&lb);
        let b = lb.steps.iter().find(|s| s.scenario == Scenario::B).unwrap();
        assert!(13350 - b.lo < b.hi - 13350);
        assert_eq!((b.s1, b.s2), (Some(13350), Some(13350 + 1200)));
    }

    #[test]
    fn lone_late_beat_is_s2() {
        let mut p = clean();
        p.retain(|&v| v != 13350);
        let lb = run(p, 25_000);
        assert_eq!(positions(&lb), clean());
        let b = lb.steps.iter().find(|s| s.scenario == Scenario::B).unwrap();
        assert!(14550 - b.lo > b.hi - 14550);
        assert_eq!((b.s1, b.s2), (Some(14550 - 1200), Some(14550)));
    }

    #[test]
    fn equidistant_lone_beat_is_s1() {
        // Window for cycle 4 is [12545, 15055]; its midpoint is 13800.
        let mut p = clean();
        p.retain(|&v| v != 13350 && v != 14550);
        p.insert(8, 13800);
        let lb = run(p, 25_000);
        let b = lb.steps.iter().find(|s| s.scenario == Scenario::B).unwrap();
        assert_eq!((b.lo, b.hi), (12545, 15055));
        assert_eq!((b.s1, b.s2), (Some(13800), Some(15000)));
    }

    #[test]
    fn leftward_sweep_from_interior_anchor() {
        // A longer first systole pushes the anchor to cycles 1 and 2.
        let mut p = clean();
        p[1] = 1800;
        let lb = run(p.clone(), 25_000);
        assert_eq!(positions(&lb), p);
        let left: Vec<&WindowStep> = lb.steps.iter().filter(|s| s.direction == Direction::Left).collect();
        assert_eq!(left.len(), 1);
        assert_eq!(left[0].scenario, Scenario::C);
        assert_eq!((left[0].lo, left[0].hi), (400 - 655, 400 + 1200 + 655));
        assert_eq!(lb.hr_trace[0], 3200);
        assert_eq!(lb.hr_trace[1], 3300);
    }

    #[test]
    fn empty_window_at_signal_end_stops() {
        // Signal ends just after cycle 6; the cycle-7 window runs off the end.
        let p: Vec<usize> = clean().into_iter().take(14).collect();
        let lb = run(p.clone(), 23_500);
        assert_eq!(positions(&lb), p);
        assert_eq!(lb.counts.a, 0);
    }

    #[test]
    fn inserted_s2_beyond_end_keeps_s1_only() {
        let mut p = clean();
        p.pop();
        let lb = run(p.clone(), 24_000);
        assert_eq!(positions(&lb), p);
        assert_eq!(lb.beats.last().unwrap().label, BeatLabel::S1);
        let last = lb.steps.last().unwrap();
        assert_eq!((last.scenario, last.s1, last.s2), (Scenario::B, Some(23000), None));
    }

    #[test]
    fn cascading_empty_windows_warn() {
        let p: Vec<usize> = clean().into_iter().take(6).collect();
        let lb = run(p, 26_000);
        assert_eq!(lb.counts.a, 5);
        assert_eq!(lb.beats.len(), 16);
        assert_eq!(lb.warnings.len(), 1);
        // Inserted cycles repeat the last cycle length and systole exactly.
        for w in lb.beats[4..].chunks(2) {
            assert_eq!(w[1].position - w[0].position, 1200);
        }
    }

    #[test]
    fn counts_match_steps() {
        let mut p = clean();
        p.insert(9, 14000);
        p.retain(|&v| v != 19700);
        let lb = run(p, 25_000);
        assert_eq!(lb.counts.total(), lb.steps.len());
        assert_alternating_from_s1(&lb);
    }

    #[test]
    fn bad_anchor_rejected() {
        let x = PcgSignal::new(vec![0.0; 1000], 4096, "t").unwrap();
        let sb = SampleBeats {
            positions: vec![10, 20, 30, 40],
        };
        let anchor = CycleAnchor {
            c1_start: 10,
            c1_end: 30,
            c2_start: 20,
            c2_end: 40,
            hr_init: 10,
            distance_index: 0,
        };
        let r = verify_correct_classify(&x, &sb, &est(10.0), &anchor, ETA, HrTracking::Mean);
        assert!(matches!(r, Err(Error::Param(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Clean beats built from a systole and a diastole list, plus edits.
        fn scenario() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>, Vec<usize>)> {
            (
                900usize..1400,
                prop::collection::vec(1800usize..2200, 6..14),
                prop::collection::vec(any::<prop::sample::Index>(), 0..4),
                prop::collection::vec(0usize..40_000, 0..4),
            )
                .prop_map(|(sys, dia, del, add)| {
                    let mut p = vec![300];
                    for d in &dia {
                        let s1 = *p.last().unwrap();
                        p.push(s1 + sys);
                        p.push(s1 + sys + d);
                    }
                    p.pop();
                    let deletions = del.iter().map(|i| i.index(p.len())).collect();
                    (sys, p, deletions, add)
                })
        }

        fn tracking() -> impl Strategy<Value = HrTracking> {
            prop_oneof![Just(HrTracking::Last), Just(HrTracking::Mean)]
        }

        proptest! {
            #[test]
            fn clean_input_is_only_labeled((sys, p, _, _) in scenario(), tracking in tracking()) {
                let len = p.last().unwrap() + 1000;
                let x = PcgSignal::new(vec![0.0; len], 4096, "t").unwrap();
                let sb = SampleBeats { positions: p.clone() };
                let e = est(sys as f64);
                let anchor = find_anchor_cycles(&sb, &e).unwrap();
                let lb = verify_correct_classify(&x, &sb, &e, &anchor, ETA, tracking).unwrap();
                prop_assert_eq!(positions(&lb), p);
                prop_assert_eq!(lb.counts.c, lb.steps.len());
            }

            #[test]
            fn edits_keep_invariants((sys, p, del, add) in scenario(), tracking in tracking()) {
                let len = p.last().unwrap() + 1000;
                let mut q: BTreeSet<usize> = p.iter().copied().collect();
                for i in del {
                    q.remove(&p[i]);
                }
                q.extend(add.into_iter().filter(|&v| v < len));
                let q: Vec<usize> = q.into_iter().collect();
                let x = PcgSignal::new(vec![0.0; len], 4096, "t").unwrap();
                let sb = SampleBeats { positions: q };
                let e = est(sys as f64);
                let Ok(anchor) = find_anchor_cycles(&sb, &e) else { return Ok(()) };
                let lb = verify_correct_classify(&x, &sb, &e, &anchor, ETA, tracking).unwrap();
                prop_assert_eq!(lb.counts.total(), lb.steps.len());
                for w in lb.beats.windows(2) {
                    prop_assert!(w[0].position < w[1].position);
                    prop_assert!(w[0].label != w[1].label);
                }
                let mut prev_sys = None;
                for s in &lb.steps {
                    if let (Some(a), Some(b)) = (s.s1, s.s2) {
                        match s.scenario {
                            Scenario::B => prop_assert_eq!(b - a, sys),
                            Scenario::A if s.direction == Direction::Right && prev_sys.is_some() => {
                                prop_assert_eq!(Some(b - a), prev_sys)
                            }
                            _ => {}
                        }
                        if s.direction == Direction::Right {
                            prev_sys = Some(b - a);
                        }
                    }
                }
            }
        }
    }
}
