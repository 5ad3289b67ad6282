//! Time-domain pulse-rate variability.

use crate::dsp::{mean, pop_std};

/// NN50 threshold on successive width differences (seconds, strict).
pub const NN50_THRESHOLD_S: f64 = 0.050;
/// Differences within a nanosecond of the threshold count as equal to it, so
/// floating-point residue in `w[i+1] - w[i]` does not decide the count.
const ROUNDING_S: f64 = 1e-9;

/// Heart rate (Hz) from one pulse width.
pub fn hr(width: f64) -> Option<f64> {
    (width > 0.0).then(|| 1.0 / width)
}

/// Heart rate for every width.
pub fn hr_series(widths: &[f64]) -> Vec<Option<f64>> {
    widths.iter().map(|&w| hr(w)).collect()
}

/// Population standard deviation of pulse widths.
pub fn sdnn(widths: &[f64]) -> Option<f64> {
    (widths.len() >= 2).then(|| pop_std(widths))
}

/// Root mean square of successive width differences.
pub fn rmssd(widths: &[f64]) -> Option<f64> {
    if widths.len() < 2 {
        return None;
    }
    let sq: Vec<f64> = widths.windows(2).map(|w| (w[1] - w[0]).powi(2)).collect();
    Some(mean(&sq).sqrt())
}

/// Number of successive width differences strictly above 50 ms.
pub fn nn50(widths: &[f64]) -> Option<f64> {
    if widths.len() < 2 {
        return None;
    }
    let n = widths
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > NN50_THRESHOLD_S + ROUNDING_S)
        .count();
    Some(n as f64)
}

/// Segment index of time `t` for segments of `length` seconds from `origin`.
pub fn segment_index(t: f64, origin: f64, length: f64) -> i64 {
    ((t - origin) / length).floor() as i64
}

/// Segment-to-date SDNN, RMSSD and NN50 for each pulse: the statistic over
/// all pulses of the same segment up to and including the pulse.
pub fn segment_to_date(
    times: &[f64],
    widths: &[f64],
    origin: f64,
    segment_length: f64,
) -> [Vec<Option<f64>>; 3] {
    let n = times.len();
    let mut out = [vec![None; n], vec![None; n], vec![None; n]];
    let mut seg_start = 0;
    for i in 0..n {
        if i > 0
            && segment_index(times[i], origin, segment_length)
                != segment_index(times[i - 1], origin, segment_length)
        {
            seg_start = i;
        }
        let w = &widths[seg_start..=i];
        out[0][i] = sdnn(w);
        out[1][i] = rmssd(w);
        out[2][i] = nn50(w);
    }
    out
}
