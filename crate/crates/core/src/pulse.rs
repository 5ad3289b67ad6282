//! PPG trough detection, pulse segmentation, artifact screening and ECG
//! R-peak detection.

use serde::{Deserialize, Serialize};

use crate::dsp::{moving_average, parabolic_offset, quadratic_vertex, sliding_range};
use crate::types::SampleSeries;

/// Physiological bounds on a clean pulse width (seconds).
pub const MIN_PULSE_WIDTH_S: f64 = 0.25;
pub const MAX_PULSE_WIDTH_S: f64 = 2.0;
/// A notch must stand out by this fraction of the pulse amplitude.
pub const NOTCH_PROMINENCE: f64 = 0.02;
/// Largest tolerated single-sample dip on the upstroke, relative to amplitude.
pub const UPSTROKE_DIP: f64 = 0.01;
pub const MAX_CLEAN_NOTCHES: usize = 2;

const SMOOTHING_S: f64 = 0.1;
const TROUGH_FIT_HALF_S: f64 = 0.08;
const RANGE_WINDOW_S: f64 = 3.0;
/// Trough hysteresis as a fraction of the local signal range.
const TROUGH_HYSTERESIS: f64 = 0.3;

/// One PPG beat from a diastolic trough to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub trough_time: f64,
    pub next_trough_time: f64,
    pub systolic_peak_time: f64,
    pub systolic_peak_value: f64,
    pub trough_value: f64,
    pub notch_count: usize,
    /// Raw samples from the lowest sample beside the trough to the lowest
    /// sample beside the next trough, inclusive.
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    /// Time of `samples[0]`.
    pub first_sample_time: f64,
    pub clean: bool,
}

impl Pulse {
    /// Pulse width `t_SS`.
    pub fn width(&self) -> f64 {
        self.next_trough_time - self.trough_time
    }

    /// Trough-to-systolic-peak height.
    pub fn amplitude(&self) -> f64 {
        self.systolic_peak_value - self.trough_value
    }

    /// Index of the systolic peak within `samples`.
    pub fn peak_index(&self) -> usize {
        let pos = (self.systolic_peak_time - self.first_sample_time) * self.sample_rate;
        (pos.round().max(0.0) as usize).min(self.samples.len().saturating_sub(1))
    }

    pub fn sample_time(&self, j: usize) -> f64 {
        self.first_sample_time + j as f64 / self.sample_rate
    }
}

/// Detected ECG R peaks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RPeakTrain {
    pub peak_times: Vec<f64>,
}

impl RPeakTrain {
    pub fn len(&self) -> usize {
        self.peak_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peak_times.is_empty()
    }

    /// Indices `i` whose interval `peak_times[i+1] - peak_times[i]` falls
    /// outside the physiological range.
    pub fn flagged_intervals(&self) -> Vec<usize> {
        self.peak_times
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                let rr = w[1] - w[0];
                !(MIN_PULSE_WIDTH_S..=MAX_PULSE_WIDTH_S).contains(&rr)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Latest R peak strictly before `t` and no earlier than `t - max_lag`.
    pub fn latest_before(&self, t: f64, max_lag: f64) -> Option<f64> {
        let idx = self.peak_times.partition_point(|&r| r < t);
        if idx == 0 {
            return None;
        }
        let r = self.peak_times[idx - 1];
        (r >= t - max_lag).then_some(r)
    }
}

fn odd_window(fs: f64, seconds: f64) -> usize {
    2 * ((seconds * fs / 2.0).round() as usize) + 1
}

/// PPG trough times (seconds, sub-sample resolution).
///
/// The signal is smoothed with a 0.1 s moving average and differenced;
/// minima sit where the difference turns from negative to non-negative.
/// Only minima followed by a rise of at least 30 % of the local 3 s signal
/// range count, which skips dicrotic notches. Each trough is refined with a
/// least-squares parabola over ±80 ms of raw samples and troughs closer than
/// 0.25 s are merged, keeping the lower one.
pub fn detect_troughs(ppg: &SampleSeries) -> Vec<f64> {
    let fs = ppg.sample_rate;
    let x = &ppg.samples;
    if (x.len() as f64) < 2.0 * fs {
        return Vec::new();
    }
    let smooth = moving_average(x, odd_window(fs, SMOOTHING_S));
    let range = sliding_range(&smooth, odd_window(fs, RANGE_WINDOW_S));

    let mut minima = Vec::new();
    let mut seeking_min = true;
    let (mut ext_idx, mut ext_val) = (0usize, smooth[0]);
    for i in 1..smooth.len() {
        let diff = smooth[i] - smooth[i - 1];
        let delta = TROUGH_HYSTERESIS * range[i];
        if seeking_min {
            if smooth[i] < ext_val || (smooth[i] == ext_val && diff < 0.0) {
                ext_idx = i;
                ext_val = smooth[i];
            } else if delta > 0.0 && smooth[i] > ext_val + delta {
                minima.push(ext_idx);
                seeking_min = false;
                ext_idx = i;
                ext_val = smooth[i];
            }
        } else if smooth[i] > ext_val {
            ext_idx = i;
            ext_val = smooth[i];
        } else if delta > 0.0 && smooth[i] < ext_val - delta {
            seeking_min = true;
            ext_idx = i;
            ext_val = smooth[i];
        }
    }

    let h = ((TROUGH_FIT_HALF_S * fs).round() as usize).max(1);
    let mut troughs: Vec<(f64, f64)> = Vec::with_capacity(minima.len());
    for idx in minima {
        // The first minimum may be the series edge rather than a real trough.
        if idx < h || idx + h >= x.len() {
            continue;
        }
        let offset = quadratic_vertex(&x[idx - h..=idx + h], true)
            .filter(|v| v.abs() <= h as f64)
            .unwrap_or(0.0);
        let t = ppg.time_at(idx) + offset / fs;
        let value = x[(idx as f64 + offset).round() as usize];
        match troughs.last_mut() {
            Some(last) if t - last.0 < MIN_PULSE_WIDTH_S => {
                if value < last.1 {
                    *last = (t, value);
                }
            }
            _ => troughs.push((t, value)),
        }
    }
    troughs.into_iter().map(|(t, _)| t).collect()
}

/// Cuts the PPG into one pulse per consecutive trough pair and screens each.
pub fn segment_pulses(ppg: &SampleSeries, troughs: &[f64]) -> Vec<Pulse> {
    let n = ppg.len();
    if n == 0 {
        return Vec::new();
    }
    // The lowest sample next to the refined trough time starts the pulse.
    let index_of = |t: f64| {
        let k = (ppg.position_of(t).round().max(0.0) as usize).min(n - 1);
        (k.saturating_sub(1)..=(k + 1).min(n - 1))
            .min_by(|&a, &b| ppg.samples[a].total_cmp(&ppg.samples[b]))
            .unwrap_or(k)
    };
    troughs
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (i0, i1) = (index_of(w[0]), index_of(w[1]));
            let samples = ppg.samples[i0..=i1.max(i0)].to_vec();
            let foot = foot_value(&ppg.samples, i0);
            build_pulse(w[0], w[1], samples, foot, ppg.sample_rate, ppg.time_at(i0))
        })
        .collect()
}

/// Trough level at sub-sample resolution: where the secant through the two
/// samples left of the lowest sample `i` meets the secant through the two
/// samples right of it. Exact for a sharp foot; falls back to `x[i]` when the
/// secants do not form a valley, or meet further below `x[i]` than a corner
/// between `i - 1` and `i + 1` allows (a rounded trough).
pub fn foot_value(x: &[f64], i: usize) -> f64 {
    if i < 2 || i + 2 >= x.len() {
        return x[i];
    }
    let left = x[i - 1] - x[i - 2];
    let right = x[i + 2] - x[i + 1];
    if !(left < 0.0 && right > 0.0) {
        return x[i];
    }
    // Lines in sample units: x[i-1] + left·(p - (i-1)) and x[i+1] + right·(p - (i+1)).
    let p =
        (x[i + 1] - x[i - 1] + left * (i as f64 - 1.0) - right * (i as f64 + 1.0)) / (left - right);
    let v = x[i - 1] + left * (p - (i as f64 - 1.0));
    let max_drop = -left * right / (right - left);
    if (p - i as f64).abs() <= 1.0 && v <= x[i] && x[i] - v <= max_drop * (1.0 + 1e-9) {
        v
    } else {
        x[i]
    }
}

fn build_pulse(
    trough_time: f64,
    next_trough_time: f64,
    samples: Vec<f64>,
    trough_value: f64,
    sample_rate: f64,
    first_sample_time: f64,
) -> Pulse {
    let len = samples.len();
    let mut pulse = Pulse {
        trough_time,
        next_trough_time,
        systolic_peak_time: 0.5 * (trough_time + next_trough_time),
        systolic_peak_value: trough_value,
        trough_value,
        notch_count: 0,
        samples,
        sample_rate,
        first_sample_time,
        clean: false,
    };
    if len < 4 {
        return pulse;
    }
    let (peak, peak_value) = pulse.samples[1..len - 1].iter().enumerate().fold(
        (1, f64::NEG_INFINITY),
        |(bi, bv), (j, &v)| {
            if v > bv {
                (j + 1, v)
            } else {
                (bi, bv)
            }
        },
    );
    let refined = pulse.sample_time(peak) + parabolic_offset(&pulse.samples, peak) / sample_rate;
    pulse.systolic_peak_time = refined.clamp(
        trough_time + 0.25 / sample_rate,
        next_trough_time - 0.25 / sample_rate,
    );
    pulse.systolic_peak_value = peak_value;
    let threshold = NOTCH_PROMINENCE * pulse.amplitude();
    pulse.notch_count = count_notches(&pulse.samples, peak, threshold);
    pulse.clean = classify_artifact(&pulse);
    pulse
}

/// Local maxima strictly after `peak` (and before the last sample) whose
/// topographic prominence reaches `min_prominence`.
pub fn count_notches(samples: &[f64], peak: usize, min_prominence: f64) -> usize {
    let len = samples.len();
    let mut count = 0;
    let mut k = peak + 1;
    while k + 1 < len {
        if samples[k] > samples[k - 1] {
            // Walk across a plateau.
            let mut j = k;
            while j + 1 < len && samples[j + 1] == samples[k] {
                j += 1;
            }
            if j + 1 < len
                && samples[j + 1] < samples[k]
                && min_prominence > 0.0
                && prominence(samples, k, j) >= min_prominence
            {
                count += 1;
            }
            k = j + 1;
        } else {
            k += 1;
        }
    }
    count
}

fn prominence(samples: &[f64], first: usize, last: usize) -> f64 {
    let v = samples[first];
    let mut left_base = v;
    for &s in samples[..first].iter().rev() {
        if s > v {
            break;
        }
        left_base = left_base.min(s);
    }
    let mut right_base = v;
    for &s in &samples[last + 1..] {
        if s > v {
            break;
        }
        right_base = right_base.min(s);
    }
    v - left_base.max(right_base)
}

/// `true` when the pulse is clean: physiological width, monotone upstroke
/// (no fall of more than 1 % of amplitude below the running maximum) and at most two
/// notches in the catacrotic phase.
pub fn classify_artifact(pulse: &Pulse) -> bool {
    let width = pulse.width();
    if !(MIN_PULSE_WIDTH_S..=MAX_PULSE_WIDTH_S).contains(&width) {
        return false;
    }
    if pulse.samples.len() < 4 || pulse.notch_count > MAX_CLEAN_NOTCHES {
        return false;
    }
    let amp = pulse.amplitude();
    if !(amp > 0.0) {
        return false;
    }
    upstroke_is_monotone(&pulse.samples[..=pulse.peak_index()], UPSTROKE_DIP * amp)
}

fn upstroke_is_monotone(up: &[f64], max_dip: f64) -> bool {
    let mut high = f64::NEG_INFINITY;
    for &v in up {
        high = high.max(v);
        if high - v > max_dip {
            return false;
        }
    }
    true
}

/// Marks the listed pulse indices as rejected (manual review overrides).
pub fn force_reject(pulses: &mut [Pulse], indices: &[usize]) {
    for &i in indices {
        if let Some(p) = pulses.get_mut(i) {
            p.clean = false;
        }
    }
}

/// Trough detection followed by segmentation.
pub fn segment_series(ppg: &SampleSeries) -> Vec<Pulse> {
    let troughs = detect_troughs(ppg);
    segment_pulses(ppg, &troughs)
}

const QRS_INTEGRATION_S: f64 = 0.150;
const QRS_REFRACTORY_S: f64 = 0.200;
const QRS_THRESHOLD: f64 = 0.5;
const R_FIT_HALF_S: f64 = 0.006;

/// R-peak times from a Pan–Tompkins style chain: five-point derivative,
/// squaring, 150 ms moving-window integration, adaptive threshold at half the
/// running peak average and a 200 ms refractory period. Each detection is
/// placed on the raw ECG maximum near the integrator peak and refined with a
/// local parabola.
pub fn detect_rpeaks(ecg: &SampleSeries) -> RPeakTrain {
    let fs = ecg.sample_rate;
    let x = &ecg.samples;
    let n = x.len();
    if (n as f64) < 2.0 * fs || n < 5 {
        return RPeakTrain::default();
    }
    let mut energy = vec![0.0; n];
    for i in 2..n - 2 {
        let d = (2.0 * x[i + 2] + x[i + 1] - x[i - 1] - 2.0 * x[i - 2]) / 8.0;
        energy[i] = d * d;
    }
    let integration = odd_window(fs, QRS_INTEGRATION_S);
    let mwi = moving_average(&energy, integration);

    let scale =
        x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min);
    if !(scale > 1e-12 * (1.0 + x[0].abs())) {
        return RPeakTrain::default();
    }
    let learn = ((2.0 * fs) as usize).min(n);
    let mut spk = mwi[..learn].iter().cloned().fold(0.0, f64::max);
    if !(spk > 0.0) {
        return RPeakTrain::default();
    }
    let refractory = (QRS_REFRACTORY_S * fs).round() as usize;
    let mut detections: Vec<usize> = Vec::new();
    for i in 1..n - 1 {
        if !(mwi[i] > mwi[i - 1] && mwi[i] >= mwi[i + 1]) {
            continue;
        }
        if mwi[i] <= QRS_THRESHOLD * spk {
            continue;
        }
        match detections.last_mut() {
            Some(last) if i - *last <= refractory => {
                if mwi[i] > mwi[*last] {
                    *last = i;
                }
            }
            _ => {
                detections.push(i);
                spk = 0.875 * spk + 0.125 * mwi[i];
            }
        }
    }

    let search = integration / 2;
    let h = ((R_FIT_HALF_S * fs).round() as usize).max(1);
    let mut peaks: Vec<f64> = Vec::with_capacity(detections.len());
    for d in detections {
        let lo = d.saturating_sub(search);
        let hi = (d + search).min(n - 1);
        let mut best = lo;
        for j in lo..=hi {
            if x[j] > x[best] {
                best = j;
            }
        }
        let offset = if best >= h && best + h < n {
            quadratic_vertex(&x[best - h..=best + h], false)
                .filter(|v| v.abs() <= h as f64)
                .unwrap_or(0.0)
        } else {
            0.0
        };
        let t = ecg.time_at(best) + offset / fs;
        match peaks.last() {
            Some(&last) if t - last <= QRS_REFRACTORY_S => {}
            _ => peaks.push(t),
        }
    }
    RPeakTrain { peak_times: peaks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{beat_shape, BeatShape};

    fn series_from_fn(fs: f64, dur: f64, f: impl Fn(f64) -> f64) -> SampleSeries {
        let n = (dur * fs) as usize;
        SampleSeries::new("ppg", fs, 0.0, (0..n).map(|i| f(i as f64 / fs)).collect()).unwrap()
    }

    fn template(c: f64, nd: f64) -> BeatShape {
        BeatShape {
            crest_fraction: c,
            notch_depth: nd,
            notch_position: 0.45,
        }
    }

    fn beats_at(troughs: &[f64], shape: BeatShape) -> impl Fn(f64) -> f64 + '_ {
        move |t| {
            let k = troughs.partition_point(|&x| x <= t);
            if k == 0 || k >= troughs.len() {
                return 0.0;
            }
            let (a, b) = (troughs[k - 1], troughs[k]);
            beat_shape(&shape, (t - a) / (b - a))
        }
    }

    #[test]
    fn constant_signal_has_no_troughs() {
        let s = series_from_fn(64.0, 10.0, |_| 2.5);
        assert!(detect_troughs(&s).is_empty());
    }

    #[test]
    fn short_signal_has_no_troughs() {
        let s = series_from_fn(64.0, 1.5, |t| (t * 7.0).sin());
        assert!(detect_troughs(&s).is_empty());
    }

    #[test]
    fn two_beats_recovered_within_one_sample() {
        let fs = 64.0;
        // Two full beats between partial neighbours.
        let truth = [0.0, 0.8, 1.73, 2.61, 3.4];
        let s = series_from_fn(fs, 3.4, beats_at(&truth, template(0.3, 0.1)));
        let found = detect_troughs(&s);
        assert_eq!(found.len(), 3, "{found:?}");
        for (f, t) in found.iter().zip(&truth[1..4]) {
            assert!((f - t).abs() <= 1.0 / fs, "{f} vs {t}");
        }
    }

    #[test]
    fn amplitude_scaling_leaves_troughs_unchanged() {
        let truth: Vec<f64> = (0..12).map(|k| 0.5 + k as f64 * 0.9).collect();
        let s = series_from_fn(64.0, 11.0, beats_at(&truth, template(0.3, 0.12)));
        let mut scaled = s.clone();
        for v in &mut scaled.samples {
            *v = 3.7 * *v + 11.0;
        }
        let a = detect_troughs(&s);
        let b = detect_troughs(&scaled);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn segment_tiles_and_widths() {
        let s = series_from_fn(64.0, 3.0, |t| (std::f64::consts::PI * 2.0 * t).sin());
        let pulses = segment_pulses(&s, &[0.0, 1.0, 2.0]);
        assert_eq!(pulses.len(), 2);
        assert_eq!(pulses[0].width(), 1.0);
        assert_eq!(pulses[1].width(), 1.0);
        assert_eq!(pulses[0].next_trough_time, pulses[1].trough_time);
    }

    #[test]
    fn foot_value_recovers_a_sharp_corner() {
        // V with its corner at sample 3.3, slopes -2 and +1.5.
        let x: Vec<f64> = (0..8)
            .map(|k| {
                let d = k as f64 - 3.3;
                if d < 0.0 {
                    -2.0 * d
                } else {
                    1.5 * d
                }
            })
            .collect();
        assert!(foot_value(&x, 3).abs() < 1e-12);
        let bowl: Vec<f64> = (0..9).map(|k| (k as f64 - 4.2).powi(2)).collect();
        let v = foot_value(&bowl, 4);
        assert!(v <= bowl[4] && v > -0.5, "{v}");
        let flat = [1.0, 1.0, 0.5, 1.0, 1.0];
        assert_eq!(foot_value(&flat, 2), 0.5);
    }

    #[test]
    fn single_peak_pulse_has_no_notch() {
        let s = series_from_fn(64.0, 1.1, |t| beat_shape(&template(0.3, 0.0), t));
        let p = &segment_pulses(&s, &[0.0, 1.0])[0];
        assert_eq!(p.notch_count, 0);
        assert!(p.clean);
    }

    #[test]
    fn dicrotic_pulse_has_one_notch_and_is_clean() {
        let s = series_from_fn(64.0, 1.1, |t| beat_shape(&template(0.3, 0.15), t));
        let p = &segment_pulses(&s, &[0.0, 1.0])[0];
        assert_eq!(p.notch_count, 1);
        assert!(p.clean);
        assert!(p.trough_time < p.systolic_peak_time && p.systolic_peak_time < p.next_trough_time);
    }

    #[test]
    fn degenerate_interval_is_not_clean() {
        let s = series_from_fn(64.0, 1.0, |t| t);
        let p = &segment_pulses(&s, &[0.1, 0.125])[0];
        assert!(!p.clean);
    }

    fn pulse_from(samples: Vec<f64>, fs: f64) -> Pulse {
        let dur = (samples.len() - 1) as f64 / fs;
        build_pulse(0.0, dur, samples.clone(), samples[0], fs, 0.0)
    }

    #[test]
    fn notch_count_three_is_rejected() {
        // Peak then three distinct bumps on the way down.
        let fs = 64.0;
        let n = 65;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 / (n - 1) as f64;
                let base = if t < 0.25 {
                    t / 0.25
                } else {
                    1.0 - (t - 0.25) / 0.75
                };
                let bumps: f64 = [0.45, 0.6, 0.75]
                    .iter()
                    .map(|c| 0.12 * (-0.5 * ((t - c) / 0.025f64).powi(2)).exp())
                    .sum();
                base + bumps
            })
            .collect();
        let p = pulse_from(samples, fs);
        assert_eq!(p.notch_count, 3);
        assert!(!classify_artifact(&p));
    }

    #[test]
    fn two_notches_with_monotone_upstroke_is_clean() {
        let fs = 64.0;
        let n = 65;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 / (n - 1) as f64;
                let base = if t < 0.25 {
                    t / 0.25
                } else {
                    1.0 - (t - 0.25) / 0.75
                };
                let bumps: f64 = [0.5, 0.7]
                    .iter()
                    .map(|c| 0.12 * (-0.5 * ((t - c) / 0.025f64).powi(2)).exp())
                    .sum();
                base + bumps
            })
            .collect();
        let p = pulse_from(samples, fs);
        assert_eq!(p.notch_count, 2);
        assert!(classify_artifact(&p));
    }

    #[test]
    fn upstroke_dip_is_rejected() {
        let fs = 64.0;
        let mut samples: Vec<f64> = (0..65)
            .map(|j| beat_shape(&template(0.4, 0.0), j as f64 / 64.0))
            .collect();
        // 10 % dip in the middle of the upstroke, lasting several samples.
        for v in &mut samples[10..14] {
            *v -= 0.1;
        }
        let p = pulse_from(samples, fs);
        assert!(!classify_artifact(&p));
    }

    #[test]
    fn classification_is_affine_invariant() {
        let fs = 64.0;
        let samples: Vec<f64> = (0..65)
            .map(|j| beat_shape(&template(0.3, 0.12), j as f64 / 64.0))
            .collect();
        let a = pulse_from(samples.clone(), fs);
        let b = pulse_from(samples.iter().map(|v| 0.01 * v - 40.0).collect(), fs);
        assert_eq!(classify_artifact(&a), classify_artifact(&b));
        assert_eq!(a.notch_count, b.notch_count);
    }

    #[test]
    fn width_bounds_are_enforced() {
        let fs = 64.0;
        let n = 64 * 3;
        let samples: Vec<f64> = (0..=n)
            .map(|j| beat_shape(&template(0.3, 0.0), j as f64 / n as f64))
            .collect();
        let p = pulse_from(samples, fs);
        assert!(p.width() > MAX_PULSE_WIDTH_S);
        assert!(!p.clean);
    }

    #[test]
    fn force_reject_marks_pulses() {
        let s = series_from_fn(64.0, 3.1, |t| beat_shape(&template(0.3, 0.1), t.fract()));
        let mut pulses = segment_pulses(&s, &[0.0, 1.0, 2.0, 3.0]);
        assert!(pulses.iter().all(|p| p.clean));
        force_reject(&mut pulses, &[1, 99]);
        assert_eq!(
            pulses.iter().map(|p| p.clean).collect::<Vec<_>>(),
            vec![true, false, true]
        );
    }

    #[test]
    fn flat_ecg_has_no_r_peaks() {
        let s = SampleSeries::new("ecg", 500.0, 0.0, vec![0.2; 5000]).unwrap();
        assert!(detect_rpeaks(&s).is_empty());
    }

    #[test]
    fn rpeak_lookup_window() {
        let r = RPeakTrain {
            peak_times: vec![8.9, 9.75, 10.6],
        };
        assert_eq!(r.latest_before(10.0, 1.5), Some(9.75));
        assert_eq!(r.latest_before(8.0, 1.5), None);
        assert_eq!(r.latest_before(13.0, 1.5), None);
        let gaps = RPeakTrain {
            peak_times: vec![0.0, 0.1, 1.0, 4.0],
        };
        assert_eq!(gaps.flagged_intervals(), vec![0, 2]);
    }
}
