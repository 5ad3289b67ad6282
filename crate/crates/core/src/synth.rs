//! Synthetic PPG/ECG recordings with programmable ictal signatures.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Recording, SampleSeries, SeizureAnnotation};

pub const PPG_RATE: f64 = 64.0;
pub const ECG_RATE: f64 = 500.0;
/// Raised-cosine ramp length at both ends of an event.
pub const RAMP_S: f64 = 5.0;

const LF_HZ: f64 = 0.1;
const HF_HZ: f64 = 0.3;
const RESP_HZ: f64 = 0.25;
/// Slope of the normalized beat at both troughs, per unit of normalized time.
const FOOT_SLOPE: f64 = 2.5;
const NOTCH_WIDTH: f64 = 0.05;
const ARTIFACT_BUMPS: [f64; 3] = [0.3, 0.5, 0.7];
const ARTIFACT_BUMP_HEIGHT: f64 = 0.15;
const ARTIFACT_BUMP_WIDTH: f64 = 0.035;

const R_SIGMA: f64 = 0.008;
const QS_OFFSET: f64 = 0.03;
const QS_SIGMA: f64 = 0.01;
const QS_HEIGHT: f64 = -0.15;
const T_OFFSET: f64 = 0.25;
const T_SIGMA: f64 = 0.04;
const T_HEIGHT: f64 = 0.25;

fn default_notch_position() -> f64 {
    0.45
}

/// Normalized beat morphology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeatShape {
    pub crest_fraction: f64,
    pub notch_depth: f64,
    /// Position of the diastolic wave within the catacrotic phase, in (0, 1).
    #[serde(default = "default_notch_position")]
    pub notch_position: f64,
}

/// Normalized beat value at `tau ∈ [0, 1]`: 0 at both troughs, 1 at the
/// systolic peak `tau = crest_fraction`.
///
/// The upstroke is a quartic with a linear foot; the catacrotic phase is a
/// quartic decay meeting the next trough with the same slope, plus a Gaussian
/// diastolic wave that produces the dicrotic notch.
pub fn beat_shape(shape: &BeatShape, tau: f64) -> f64 {
    let c = shape.crest_fraction;
    let tau = tau.clamp(0.0, 1.0);
    if tau < c {
        let t = tau / c;
        let s0 = FOOT_SLOPE * c;
        s0 * t + (4.0 - 3.0 * s0) * t.powi(3) + (2.0 * s0 - 3.0) * t.powi(4)
    } else {
        let s = (tau - c) / (1.0 - c);
        catacrotic(s, FOOT_SLOPE * (1.0 - c))
            + diastolic_wave(s, shape.notch_depth, shape.notch_position, NOTCH_WIDTH)
    }
}

/// `beat_shape` with three extra waves on the catacrotic phase (a motion
/// artifact look-alike that must be rejected).
pub fn artifact_shape(shape: &BeatShape, tau: f64) -> f64 {
    let base = beat_shape(shape, tau);
    let c = shape.crest_fraction;
    if tau <= c {
        return base;
    }
    let s = ((tau - c) / (1.0 - c)).min(1.0);
    base + ARTIFACT_BUMPS
        .iter()
        .map(|&p| diastolic_wave(s, ARTIFACT_BUMP_HEIGHT, p, ARTIFACT_BUMP_WIDTH))
        .sum::<f64>()
}

/// `1 + a2 s² + a3 s³ + a4 s⁴` with p(1) = 0, p'(1) = -end_slope, p''(1) = 0.
fn catacrotic(s: f64, end_slope: f64) -> f64 {
    let a4 = 2.0 * end_slope - 3.0;
    let a3 = 8.0 - 5.0 * end_slope;
    let a2 = 3.0 * end_slope - 6.0;
    1.0 + a2 * s * s + a3 * s.powi(3) + a4 * s.powi(4)
}

/// Gaussian bump with its linear trend between `s = 0` and `s = 1` removed,
/// so the catacrotic phase keeps its endpoints.
fn diastolic_wave(s: f64, height: f64, position: f64, width: f64) -> f64 {
    if height == 0.0 {
        return 0.0;
    }
    let g = |x: f64| height * (-0.5 * ((x - position) / width).powi(2)).exp();
    g(s) - (g(0.0) * (1.0 - s) + g(1.0) * s)
}

/// Per-parameter multipliers applied during an event (1 = unchanged).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Multipliers {
    pub hr: f64,
    pub hrv_lf: f64,
    pub hrv_hf: f64,
    pub amplitude: f64,
    pub crest_fraction: f64,
    pub notch_depth: f64,
    pub notch_position: f64,
    pub conduction_delay: f64,
}

impl Default for Multipliers {
    fn default() -> Self {
        Multipliers {
            hr: 1.0,
            hrv_lf: 1.0,
            hrv_hf: 1.0,
            amplitude: 1.0,
            crest_fraction: 1.0,
            notch_depth: 1.0,
            notch_position: 1.0,
            conduction_delay: 1.0,
        }
    }
}

impl Multipliers {
    /// Ictal signature: faster, more variable rate with a stronger HF share,
    /// smaller and later-peaking pulses, a reshaped catacrotic phase and a
    /// shorter transit time.
    pub fn ictal() -> Self {
        Multipliers {
            hr: 1.35,
            hrv_lf: 2.0,
            hrv_hf: 3.0,
            amplitude: 0.6,
            crest_fraction: 1.3,
            notch_depth: 0.3,
            notch_position: 1.25,
            conduction_delay: 0.6,
        }
    }

    /// Non-ictal arousal: rate and variability change only.
    pub fn arousal() -> Self {
        Multipliers {
            hr: 1.3,
            hrv_lf: 2.0,
            hrv_hf: 2.0,
            ..Multipliers::default()
        }
    }

    fn as_array(&self) -> [f64; 8] {
        [
            self.hr,
            self.hrv_lf,
            self.hrv_hf,
            self.amplitude,
            self.crest_fraction,
            self.notch_depth,
            self.notch_position,
            self.conduction_delay,
        ]
    }

    fn from_array(a: [f64; 8]) -> Self {
        Multipliers {
            hr: a[0],
            hrv_lf: a[1],
            hrv_hf: a[2],
            amplitude: a[3],
            crest_fraction: a[4],
            notch_depth: a[5],
            notch_position: a[6],
            conduction_delay: a[7],
        }
    }

    /// `1 + (m - 1)·w` for every parameter.
    fn blend(&self, w: f64) -> Self {
        Self::from_array(self.as_array().map(|m| 1.0 + (m - 1.0) * w))
    }

    fn product(&self, other: &Self) -> Self {
        let (a, b) = (self.as_array(), other.as_array());
        Self::from_array(std::array::from_fn(|i| a[i] * b[i]))
    }
}

fn default_true() -> bool {
    true
}

fn default_event_label() -> String {
    "seizure".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEvent {
    pub start: f64,
    pub end: f64,
    #[serde(default)]
    pub multipliers: Multipliers,
    /// Annotated events become seizure annotations; others are distractors.
    #[serde(default = "default_true")]
    pub annotate: bool,
    #[serde(default = "default_event_label")]
    pub label: String,
}

impl ScriptEvent {
    pub fn ictal(start: f64, end: f64) -> Self {
        ScriptEvent {
            start,
            end,
            multipliers: Multipliers::ictal(),
            annotate: true,
            label: default_event_label(),
        }
    }

    pub fn arousal(start: f64, end: f64) -> Self {
        ScriptEvent {
            start,
            end,
            multipliers: Multipliers::arousal(),
            annotate: false,
            label: "arousal".into(),
        }
    }

    /// Event weight at `t`: raised-cosine ramps inside both ends, 1 between.
    pub fn weight(&self, t: f64) -> f64 {
        if t <= self.start || t >= self.end {
            return 0.0;
        }
        let ramp = RAMP_S.min(0.5 * (self.end - self.start));
        let edge = (t - self.start).min(self.end - t);
        if edge >= ramp {
            1.0
        } else {
            0.5 * (1.0 - (PI * edge / ramp).cos())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseShapeParams {
    pub crest_fraction: f64,
    pub notch_depth: f64,
    pub amplitude: f64,
    #[serde(default = "default_notch_position")]
    pub notch_position: f64,
}

fn default_subject() -> String {
    "synthetic".into()
}

fn default_ecg_noise() -> f64 {
    0.01
}

/// Full description of one synthetic recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysioScript {
    pub duration: f64,
    /// Resting heart rate (Hz).
    pub base_hr: f64,
    /// Relative depth of the 0.1 Hz rate modulation.
    pub hrv_lf_amp: f64,
    /// Relative depth of the 0.3 Hz rate modulation.
    pub hrv_hf_amp: f64,
    pub pulse_shape: PulseShapeParams,
    /// R peak to PPG trough delay (s).
    pub conduction_delay: f64,
    #[serde(default)]
    pub events: Vec<ScriptEvent>,
    /// PPG additive Gaussian noise standard deviation.
    pub noise_sd: f64,
    pub seed: u64,
    #[serde(default = "default_subject")]
    pub subject_id: String,
    /// Relative beat-to-beat white jitter of the rate.
    #[serde(default)]
    pub hr_jitter: f64,
    /// Relative depth of respiratory amplitude modulation.
    #[serde(default)]
    pub amplitude_modulation: f64,
    #[serde(default = "default_true")]
    pub ecg: bool,
    #[serde(default = "default_ecg_noise")]
    pub ecg_noise_sd: f64,
    /// Probability that a beat is replaced by a three-notch artifact.
    #[serde(default)]
    pub artifact_fraction: f64,
}

impl PhysioScript {
    /// Noise-free, event-free script at a constant rate.
    pub fn steady(duration: f64, base_hr: f64, seed: u64) -> Self {
        PhysioScript {
            duration,
            base_hr,
            hrv_lf_amp: 0.0,
            hrv_hf_amp: 0.0,
            pulse_shape: PulseShapeParams {
                crest_fraction: 0.3,
                notch_depth: 0.1,
                amplitude: 1.0,
                notch_position: default_notch_position(),
            },
            conduction_delay: 0.2,
            events: Vec::new(),
            noise_sd: 0.0,
            seed,
            subject_id: default_subject(),
            hr_jitter: 0.0,
            amplitude_modulation: 0.0,
            ecg: true,
            ecg_noise_sd: 0.0,
            artifact_fraction: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.base_hr.is_finite() && self.base_hr > 0.3 && self.base_hr < 3.5) {
            return bad(format!("base_hr {} Hz outside (0.3, 3.5)", self.base_hr));
        }
        if !(finite_nonneg(self.hrv_lf_amp) && finite_nonneg(self.hrv_hf_amp)) {
            return bad("HRV modulation depths must be non-negative".into());
        }
        let p = &self.pulse_shape;
        if !(p.crest_fraction > 0.05 && p.crest_fraction < 0.6) {
            return bad(format!(
                "crest_fraction {} outside (0.05, 0.6)",
                p.crest_fraction
            ));
        }
        if !(p.amplitude.is_finite() && p.amplitude > 0.0) {
            return bad("amplitude must be positive".into());
        }
        if !finite_nonneg(p.notch_depth) || !(p.notch_position > 0.0 && p.notch_position < 1.0) {
            return bad("notch depth must be >= 0 and notch position in (0, 1)".into());
        }
        if !(finite_nonneg(self.conduction_delay) && self.conduction_delay < 1.5) {
            return bad("conduction_delay must lie in [0, 1.5) s".into());
        }
        if !(finite_nonneg(self.noise_sd) && finite_nonneg(self.ecg_noise_sd)) {
            return bad("noise levels must be non-negative".into());
        }
        if !(finite_nonneg(self.hr_jitter) && finite_nonneg(self.amplitude_modulation)) {
            return bad("jitter and modulation depths must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.artifact_fraction) {
            return bad("artifact_fraction must lie in [0, 1]".into());
        }
        for e in &self.events {
            if !(e.start >= 0.0 && e.end > e.start && e.end <= self.duration) {
                return bad(format!(
                    "event [{}, {}] outside [0, {}]",
                    e.start, e.end, self.duration
                ));
            }
            let m = e.multipliers.as_array();
            if m.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return bad("event multipliers must be positive".into());
            }
            let c = p.crest_fraction * e.multipliers.crest_fraction;
            let np = p.notch_position * e.multipliers.notch_position;
            if !(c > 0.05 && c < 0.6) || !(np > 0.0 && np < 1.0) {
                return bad("event drives the beat shape outside its valid range".into());
            }
        }
        let mut annotated: Vec<&ScriptEvent> = self.events.iter().filter(|e| e.annotate).collect();
        annotated.sort_by(|a, b| a.start.total_cmp(&b.start));
        if annotated.windows(2).any(|w| w[1].start < w[0].end) {
            return bad("annotated events overlap".into());
        }
        Ok(())
    }

    /// Combined multipliers of all events active at `t`.
    pub fn multipliers_at(&self, t: f64) -> Multipliers {
        self.events
            .iter()
            .map(|e| e.multipliers.blend(e.weight(t)))
            .fold(Multipliers::default(), |acc, m| acc.product(&m))
    }

    pub fn annotations(&self) -> Vec<SeizureAnnotation> {
        let mut out: Vec<SeizureAnnotation> = self
            .events
            .iter()
            .filter(|e| e.annotate)
            .map(|e| SeizureAnnotation {
                onset: e.start,
                offset: e.end,
                label: e.label.clone(),
            })
            .collect();
        out.sort_by(|a, b| a.onset.total_cmp(&b.onset));
        out
    }
}

/// One generated beat.
#[derive(Debug, Clone, PartialEq)]
pub struct Beat {
    pub trough_time: f64,
    pub width: f64,
    pub amplitude: f64,
    pub shape: BeatShape,
    pub conduction_delay: f64,
    pub artifact: bool,
}

impl Beat {
    pub fn r_peak_time(&self) -> f64 {
        self.trough_time - self.conduction_delay
    }

    fn value(&self, t: f64) -> f64 {
        let tau = (t - self.trough_time) / self.width;
        let v = if self.artifact {
            artifact_shape(&self.shape, tau)
        } else {
            beat_shape(&self.shape, tau)
        };
        self.amplitude * v
    }
}

/// Generator ground truth alongside the recording.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// PPG trough times inside the recording.
    pub troughs: Vec<f64>,
    /// R-peak times inside the ECG span.
    pub r_peaks: Vec<f64>,
    /// Every beat, including those straddling the recording edges.
    pub beats: Vec<Beat>,
}

impl GroundTruth {
    /// Start times of beats rendered as three-notch artifacts.
    pub fn artifact_troughs(&self) -> Vec<f64> {
        self.beats
            .iter()
            .filter(|b| b.artifact)
            .map(|b| b.trough_time)
            .collect()
    }
}

pub fn generate(script: &PhysioScript) -> Result<Recording> {
    generate_with_truth(script).map(|(rec, _)| rec)
}

pub fn generate_with_truth(script: &PhysioScript) -> Result<(Recording, GroundTruth)> {
    script.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let beats = beat_train(script, &mut rng);

    let n_ppg = (script.duration * PPG_RATE).round() as usize;
    let ppg_noise = gaussian(script.noise_sd)?;
    let mut ppg = Vec::with_capacity(n_ppg);
    let mut k = 0;
    for i in 0..n_ppg {
        let t = i as f64 / PPG_RATE;
        while k + 1 < beats.len() && beats[k + 1].trough_time <= t {
            k += 1;
        }
        let noise = ppg_noise.as_ref().map_or(0.0, |d| d.sample(&mut rng));
        ppg.push(beats[k].value(t) + noise);
    }
    let ppg = SampleSeries::new("ppg", PPG_RATE, 0.0, ppg)?;

    let ecg = if script.ecg {
        Some(render_ecg(script, &beats, &mut rng)?)
    } else {
        None
    };

    let troughs = beats
        .iter()
        .map(|b| b.trough_time)
        .filter(|&t| t >= 0.0 && t <= ppg.end_time())
        .collect();
    let r_peaks = match &ecg {
        Some(e) => beats
            .iter()
            .map(Beat::r_peak_time)
            .filter(|&t| t >= 0.0 && t <= e.end_time())
            .collect(),
        None => Vec::new(),
    };
    let rec = Recording::new(script.subject_id.clone(), ppg, ecg, script.annotations())?;
    Ok((
        rec,
        GroundTruth {
            troughs,
            r_peaks,
            beats,
        },
    ))
}

fn gaussian(sd: f64) -> Result<Option<Normal<f64>>> {
    if sd == 0.0 {
        return Ok(None);
    }
    Normal::new(0.0, sd)
        .map(Some)
        .map_err(|e| Error::Validation(format!("noise level: {e}")))
}

fn beat_train(script: &PhysioScript, rng: &mut ChaCha8Rng) -> Vec<Beat> {
    let lf_phase = rng.random::<f64>() * 2.0 * PI;
    let hf_phase = rng.random::<f64>() * 2.0 * PI;
    let resp_phase = rng.random::<f64>() * 2.0 * PI;
    let jitter = Normal::new(0.0, 1.0).expect("unit normal");
    let p = &script.pulse_shape;
    // Start before zero so the first samples already belong to a beat.
    let mut t = -rng.random::<f64>() / script.base_hr - 1.0;
    let mut beats = Vec::new();
    while t <= script.duration + 2.0 {
        let m = script.multipliers_at(t.max(0.0));
        let modulation = 1.0
            + script.hrv_lf_amp * m.hrv_lf * (2.0 * PI * LF_HZ * t + lf_phase).sin()
            + script.hrv_hf_amp * m.hrv_hf * (2.0 * PI * HF_HZ * t + hf_phase).sin()
            + script.hr_jitter * jitter.sample(rng);
        let hr = script.base_hr * m.hr * modulation.max(0.2);
        let width = (1.0 / hr).clamp(0.3, 1.9);
        let amplitude = p.amplitude
            * m.amplitude
            * (1.0 + script.amplitude_modulation * (2.0 * PI * RESP_HZ * t + resp_phase).sin());
        let artifact =
            script.artifact_fraction > 0.0 && rng.random::<f64>() < script.artifact_fraction;
        beats.push(Beat {
            trough_time: t,
            width,
            amplitude,
            shape: BeatShape {
                crest_fraction: p.crest_fraction * m.crest_fraction,
                notch_depth: p.notch_depth * m.notch_depth,
                notch_position: p.notch_position * m.notch_position,
            },
            conduction_delay: script.conduction_delay * m.conduction_delay,
            artifact,
        });
        t += width;
    }
    beats
}

fn render_ecg(script: &PhysioScript, beats: &[Beat], rng: &mut ChaCha8Rng) -> Result<SampleSeries> {
    let n = (script.duration * ECG_RATE).round() as usize;
    let mut x = vec![0.0; n];
    let waves = [
        (0.0, R_SIGMA, 1.0),
        (-QS_OFFSET, QS_SIGMA, QS_HEIGHT),
        (QS_OFFSET, QS_SIGMA, QS_HEIGHT),
        (T_OFFSET, T_SIGMA, T_HEIGHT),
    ];
    for b in beats {
        let r = b.r_peak_time();
        for &(offset, sigma, height) in &waves {
            let center = r + offset;
            let lo = ((center - 5.0 * sigma) * ECG_RATE).floor().max(0.0) as usize;
            let hi = (((center + 5.0 * sigma) * ECG_RATE).ceil().max(0.0) as usize).min(n);
            for (i, v) in x.iter_mut().enumerate().take(hi).skip(lo) {
                let dt = i as f64 / ECG_RATE - center;
                *v += height * (-0.5 * (dt / sigma).powi(2)).exp();
            }
        }
    }
    if let Some(noise) = gaussian(script.ecg_noise_sd)? {
        for v in &mut x {
            *v += noise.sample(rng);
        }
    }
    SampleSeries::new("ecg", ECG_RATE, 0.0, x)
}

/// Square stamp train: `n_pulses` pulses of `period` seconds with the given
/// duty cycle, rising edges at `first_edge + k·period`, sampled at `fs` from
/// `series_start` for `duration` seconds, plus uniform noise in
/// `±noise_amp` (relative to a unit swing).
#[allow(clippy::too_many_arguments)]
pub fn square_train(
    fs: f64,
    series_start: f64,
    duration: f64,
    first_edge: f64,
    n_pulses: usize,
    period: f64,
    duty: f64,
    noise_amp: f64,
    seed: u64,
) -> SampleSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (duration * fs).round() as usize;
    let end = first_edge + n_pulses as f64 * period;
    let samples = (0..n)
        .map(|i| {
            let t = series_start + i as f64 / fs;
            let high =
                t >= first_edge && t < end && (t - first_edge).rem_euclid(period) < duty * period;
            let noise = if noise_amp > 0.0 {
                rng.random_range(-noise_amp..=noise_amp)
            } else {
                0.0
            };
            let level = if high { 1.0 } else { 0.0 };
            level + noise
        })
        .collect();
    SampleSeries {
        channel_name: "stamp".into(),
        sample_rate: fs,
        start_time: series_start,
        samples,
    }
}

/// Randomized corpus settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub n_recordings: usize,
    pub hours_per_recording: f64,
    /// Ictal events per hour.
    pub seizure_rate: f64,
    /// Unannotated arousal events per hour.
    pub distractor_rate: f64,
    pub seizure_min_s: f64,
    pub seizure_max_s: f64,
    /// Earliest seizure onset.
    pub first_onset_s: f64,
    pub noise_sd: f64,
    pub ecg: bool,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            n_recordings: 12,
            hours_per_recording: 2.5,
            seizure_rate: 0.4,
            distractor_rate: 1.0,
            seizure_min_s: 60.0,
            seizure_max_s: 180.0,
            first_onset_s: 1200.0,
            noise_sd: 0.002,
            ecg: true,
            seed: 0,
        }
    }
}

/// Minimum distance between a distractor and any seizure.
const DISTRACTOR_CLEARANCE_S: f64 = 600.0;

/// Randomized scripts for a corpus; generate each with [`generate`].
pub fn corpus_scripts(cfg: &CorpusConfig) -> Result<Vec<PhysioScript>> {
    if cfg.n_recordings == 0 {
        return Err(Error::Validation(
            "corpus needs at least one recording".into(),
        ));
    }
    if !(cfg.seizure_min_s > 2.0 * RAMP_S && cfg.seizure_max_s >= cfg.seizure_min_s) {
        return Err(Error::Validation("invalid seizure duration range".into()));
    }
    let duration = cfg.hours_per_recording * 3600.0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_seizures = (cfg.seizure_rate * cfg.hours_per_recording).round() as usize;
    let n_distractors = (cfg.distractor_rate * cfg.hours_per_recording).round() as usize;
    let usable = duration - cfg.first_onset_s - cfg.seizure_max_s - 60.0;
    if n_seizures > 0 && usable <= 0.0 {
        return Err(Error::Validation(
            "recordings too short for the requested seizures".into(),
        ));
    }

    let mut scripts = Vec::with_capacity(cfg.n_recordings);
    for r in 0..cfg.n_recordings {
        let amplitude = rng.random_range(0.8..1.2);
        let mut events = Vec::new();
        let slot = usable / n_seizures.max(1) as f64;
        for s in 0..n_seizures {
            let len = rng.random_range(cfg.seizure_min_s..=cfg.seizure_max_s);
            let onset =
                cfg.first_onset_s + s as f64 * slot + rng.random::<f64>() * (slot - len).max(0.0);
            let mut ev = ScriptEvent::ictal(onset, onset + len);
            ev.multipliers.hr = rng.random_range(1.25..1.45);
            events.push(ev);
        }
        let seizures: Vec<(f64, f64)> = events.iter().map(|e| (e.start, e.end)).collect();
        let mut placed = 0;
        for _ in 0..1000 {
            if placed == n_distractors {
                break;
            }
            let len = rng.random_range(cfg.seizure_min_s..=cfg.seizure_max_s);
            let start = rng.random_range(60.0..duration - len - 60.0);
            let clear = seizures.iter().all(|&(a, b)| {
                start + len + DISTRACTOR_CLEARANCE_S < a || start > b + DISTRACTOR_CLEARANCE_S
            }) && events
                .iter()
                .filter(|e| !e.annotate)
                .all(|e| start + len + 60.0 < e.start || start > e.end + 60.0);
            if clear {
                let mut ev = ScriptEvent::arousal(start, start + len);
                ev.multipliers.hr = rng.random_range(1.2..1.4);
                events.push(ev);
                placed += 1;
            }
        }
        events.sort_by(|a, b| a.start.total_cmp(&b.start));
        scripts.push(PhysioScript {
            duration,
            base_hr: rng.random_range(1.0..1.3),
            hrv_lf_amp: rng.random_range(0.03..0.05),
            hrv_hf_amp: rng.random_range(0.02..0.035),
            pulse_shape: PulseShapeParams {
                crest_fraction: rng.random_range(0.26..0.32),
                notch_depth: rng.random_range(0.08..0.14),
                amplitude,
                notch_position: rng.random_range(0.4..0.5),
            },
            conduction_delay: rng.random_range(0.18..0.25),
            events,
            noise_sd: cfg.noise_sd * amplitude,
            seed: rng.random(),
            subject_id: format!("S{:02}", r + 1),
            hr_jitter: 0.01,
            amplitude_modulation: 0.03,
            ecg: cfg.ecg,
            ecg_noise_sd: 0.01,
            artifact_fraction: 0.0,
        });
    }
    Ok(scripts)
}

/// Generates a corpus of `n_recordings` default-length recordings.
pub fn make_corpus(n_recordings: usize, seizure_rate: f64, seed: u64) -> Result<Vec<Recording>> {
    let cfg = CorpusConfig {
        n_recordings,
        seizure_rate,
        seed,
        ..CorpusConfig::default()
    };
    corpus_scripts(&cfg)?.iter().map(generate).collect()
}
