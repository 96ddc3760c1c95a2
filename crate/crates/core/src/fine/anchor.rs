use serde::{Deserialize, Serialize};

use super::{beat_distances, SampleBeats, SystoleEstimate};
use crate::error::{Error, Result};

/// Two consecutive cardiac cycles whose systoles are both among the most
/// likely systole intervals, separated by a diastole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleAnchor {
    pub c1_start: usize,
    pub c1_end: usize,
    pub c2_start: usize,
    pub c2_end: usize,
    /// Initial cycle length, `c2_start - c1_start`, in samples.
    pub hr_init: usize,
    /// Index into the distance vector of the first systole.
    pub distance_index: usize,
}

/// Locates the anchor cycles.
///
/// The `ceil(len/2)` distances closest to `beta` are taken as likely
/// systoles and visited from most to least likely (ties by position). The
/// first one at index `i` for which distance `i + 2` is also a likely
/// systole and distance `i + 1` is not gives the anchor.
pub fn find_anchor_cycles(sb: &SampleBeats, est: &SystoleEstimate) -> Result<CycleAnchor> {
    let k = sb.positions.len();
    if k < 4 {
        return Err(Error::NoAnchor(format!(
            "need at least 4 beats for two cycles, got {k}"
        )));
    }
    let zetas = beat_distances(sb)?;
    let dev = |i: usize| (zetas[i] as f64 - est.beta).abs();

    let mut order: Vec<usize> = (0..zetas.len()).collect();
    order.sort_by(|&a, &b| dev(a).total_cmp(&dev(b)).then(a.cmp(&b)));
    let half = zetas.len().div_ceil(2);
    let mut likely = vec![false; zetas.len()];
    for &i in &order[..half] {
        likely[i] = true;
    }

    let i = order[..half]
        .iter()
        .copied()
        .find(|&i| i + 2 < zetas.len() && likely[i + 2] && !likely[i + 1])
        .ok_or_else(|| {
            Error::NoAnchor(format!(
                "no two likely systoles (beta = {:.1} samples) are separated by a diastole among {} distances",
                est.beta,
                zetas.len()
            ))
        })?;

    let p = &sb.positions;
    Ok(CycleAnchor {
        c1_start: p[i],
        c1_end: p[i + 1],
        c2_start: p[i + 2],
        c2_end: p[i + 3],
        hr_init: p[i + 2] - p[i],
        distance_index: i,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beats_from_distances(start: usize, zetas: &[usize]) -> SampleBeats {
        let mut positions = vec![start];
        for z in zetas {
            positions.push(positions.last().unwrap() + z);
        }
        SampleBeats { positions }
    }

    fn est(beta: f64) -> SystoleEstimate {
        SystoleEstimate {
            beta,
            edges: vec![],
            counts: vec![],
            zetas: vec![],
        }
    }

    /// Every (i, i+2) pair satisfying the membership condition, in the
    /// order the search should prefer them.
    fn exhaustive(zetas: &[usize], beta: f64) -> Vec<usize> {
        let n = zetas.len();
        let half = n.div_ceil(2);
        let dev = |i: usize| (zetas[i] as f64 - beta).abs();
        // Rank = number of distances strictly preferred to i.
        let rank = |i: usize| {
            (0..n)
                .filter(|&j| dev(j) < dev(i) || (dev(j) == dev(i) && j < i))
                .count()
        };
        let likely = |i: usize| rank(i) < half;
        let mut ok: Vec<usize> = (0..n.saturating_sub(2))
            .filter(|&i| likely(i) && likely(i + 2) && !likely(i + 1))
            .collect();
        ok.sort_by_key(|&i| rank(i));
        ok
    }

    #[test]
    fn worked_example() {
        let zetas = [300, 900, 310, 950, 305];
        let sb = beats_from_distances(1000, &zetas);
        let a = find_anchor_cycles(&sb, &est(305.0)).unwrap();
        assert_eq!(a.distance_index, 0);
        assert_eq!(a.hr_init, 1200);
        assert_eq!((a.c1_start, a.c1_end, a.c2_start, a.c2_end), (1000, 1300, 2200, 2510));
        assert_eq!(exhaustive(&zetas, 305.0).first(), Some(&0));
    }

    #[test]
    fn ideal_alternation() {
        let sb = beats_from_distances(0, &[400, 700, 400, 700, 400]);
        let a = find_anchor_cycles(&sb, &est(400.0)).unwrap();
        assert_eq!(a.distance_index, 0);
        assert_eq!(a.hr_init, 1100);
    }

    #[test]
    fn no_diastole_separator() {
        let sb = beats_from_distances(0, &[300, 300, 300, 300, 300]);
        assert!(matches!(find_anchor_cycles(&sb, &est(300.0)), Err(Error::NoAnchor(_))));
    }

    #[test]
    fn too_few_beats() {
        let sb = beats_from_distances(0, &[300, 900]);
        assert!(matches!(find_anchor_cycles(&sb, &est(300.0)), Err(Error::NoAnchor(_))));
    }

    #[test]
    fn agrees_with_exhaustive_search() {
        use crate::rng;
        use rand::RngExt;
        let mut r = rng::seeded(99);
        for _ in 0..500 {
            let n = r.random_range(3..16usize);
            let zetas: Vec<usize> = (0..n).map(|_| r.random_range(200..1200usize)).collect();
            let beta = r.random_range(200.0..1200.0f64).round();
            let sb = beats_from_distances(50, &zetas);
            let expected = exhaustive(&zetas, beta);
            match find_anchor_cycles(&sb, &est(beta)) {
                Ok(a) => assert_eq!(Some(&a.distance_index), expected.first(), "{zetas:?} {beta}"),
                Err(Error::NoAnchor(_)) => assert!(expected.is_empty(), "{zetas:?} {beta}"),
                Err(e) => panic!("{e}"),
            }
        }
    }
}
