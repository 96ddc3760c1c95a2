use std::f64::consts::PI;

use super::PcgSignal;
use crate::error::{Error, Result};

/// Kaiser window shape parameter.
const KAISER_BETA: f64 = 8.0;
/// Half-width of the interpolation kernel, in zero crossings of the sinc.
const HALF_WIDTH: usize = 64;
/// Largest number of polyphase branches kept in a precomputed table.
const MAX_TABLE_PHASES: u64 = 4096;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

struct Kernel {
    cutoff: f64,
    support: f64,
    i0_beta: f64,
}

impl Kernel {
    fn new(cutoff: f64) -> Self {
        Self {
            cutoff,
            support: HALF_WIDTH as f64 / cutoff,
            i0_beta: bessel_i0(KAISER_BETA),
        }
    }

    fn eval(&self, tau: f64) -> f64 {
        let r = tau / self.support;
        if r.abs() >= 1.0 {
            return 0.0;
        }
        let x = self.cutoff * tau;
        let sinc = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
        let w = bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / self.i0_beta;
        self.cutoff * sinc * w
    }
}

/// Band-limited sample-rate conversion with a Kaiser-windowed sinc kernel.
///
/// The conversion ratio is reduced to `up/down`; when `up` is small enough
/// the kernel is tabulated once per polyphase branch, otherwise taps are
/// evaluated on the fly. Output length is `round(len * target / source)`.
pub fn resample(sig: &PcgSignal, target_rate: u32) -> Result<PcgSignal> {
    if target_rate == 0 {
        return Err(Error::Param("target sample rate must be positive".into()));
    }
    let source_rate = sig.sample_rate();
    if target_rate == source_rate {
        return Ok(sig.clone());
    }

    let g = gcd(u64::from(source_rate), u64::from(target_rate));
    let up = u64::from(target_rate) / g;
    let down = u64::from(source_rate) / g;

    let x = sig.samples();
    let out_len = ((x.len() as f64) * up as f64 / down as f64).round() as usize;
    if out_len == 0 {
        return Err(Error::Param("resampled signal would be empty".into()));
    }

    let kernel = Kernel::new((up as f64 / down as f64).min(1.0));
    let span = kernel.support.ceil() as i64;
    // Taps j in [-span+1, span]: input index = i - j + ... see `tap` below.
    let taps = (2 * span) as usize;

    let table: Option<Vec<f64>> = (up <= MAX_TABLE_PHASES).then(|| {
        let mut t = Vec::with_capacity(up as usize * taps);
        for phase in 0..up {
            let frac = phase as f64 / up as f64;
            for j in 0..taps as i64 {
                let offset = j - span + 1;
                t.push(kernel.eval(frac - offset as f64));
            }
        }
        t
    });

    let n_in = x.len() as i64;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len as u64 {
        let pos = n * down;
        let base = (pos / up) as i64;
        let phase = pos % up;
        let frac = phase as f64 / up as f64;
        let mut acc = 0.0;
        for j in 0..taps as i64 {
            let offset = j - span + 1;
            let k = base + offset;
            if k < 0 || k >= n_in {
                continue;
            }
            let h = match &table {
                Some(t) => t[phase as usize * taps + j as usize],
                None => kernel.eval(frac - offset as f64),
            };
            acc += h * x[k as usize];
        }
        out.push(acc);
    }

    PcgSignal::new(out, target_rate, sig.source_id.clone())
}
