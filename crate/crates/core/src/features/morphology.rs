//! Per-pulse morphological features.

use crate::dsp::parabolic_offset;
use crate::pulse::{Pulse, RPeakTrain};

/// Longest accepted R-peak-to-trough interval.
pub const PTT_MAX_LAG_S: f64 = 1.5;

/// Trough-to-systolic-peak height.
pub fn pulse_amplitude(pulse: &Pulse) -> f64 {
    pulse.systolic_peak_value - pulse.trough_value
}

/// Trough-to-peak time over the pulse width.
pub fn normalized_crest_time(pulse: &Pulse) -> f64 {
    (pulse.systolic_peak_time - pulse.trough_time) / pulse.width()
}

/// R-peak-to-trough time over the pulse width, using the latest R peak
/// within `PTT_MAX_LAG_S` before the trough.
pub fn pulse_transit_time(pulse: &Pulse, rpeaks: &RPeakTrain) -> Option<f64> {
    let r = rpeaks.latest_before(pulse.trough_time, PTT_MAX_LAG_S)?;
    Some((pulse.trough_time - r) / pulse.width())
}

/// Trough-to-steepest-upstroke time over the pulse width.
///
/// The steepest point is the maximum first difference between the trough and
/// the systolic peak, placed at the midpoint of its sample pair and refined
/// with a parabola through the neighbouring differences.
pub fn normalized_max_velocity_time(pulse: &Pulse) -> Option<f64> {
    let peak = pulse.peak_index();
    if peak == 0 {
        return None;
    }
    let d: Vec<f64> = pulse.samples[..=peak]
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let (j, _) =
        d.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |a, (k, &v)| if v > a.1 { (k, v) } else { a },
        );
    let pos = j as f64 + 0.5 + parabolic_offset(&d, j);
    let t_sa = pulse.first_sample_time + pos / pulse.sample_rate - pulse.trough_time;
    Some(t_sa / pulse.width())
}
