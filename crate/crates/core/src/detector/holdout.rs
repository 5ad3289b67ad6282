//! Repeated random 2-hour holdout over a multi-recording corpus.
//!
//! Recordings are laid end to end on a virtual timeline. Each repetition
//! draws a span uniformly, tests on the windows fully inside it and trains
//! on the windows fully outside it. Windows straddling a span edge are
//! dropped from both sides.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::alarm::{alarms, evaluate, AlarmConfig, EvalMetrics};
use super::dataset::WindowedDataset;
use super::train::{predict_all, train, TrainConfig};
use crate::error::{Error, Result};
use crate::types::SeizureAnnotation;

#[derive(Debug, Clone)]
pub struct HoldoutRecording {
    pub data: WindowedDataset,
    pub annotations: Vec<SeizureAnnotation>,
    /// Recording start on its own clock.
    pub start: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HoldoutConfig {
    pub repetitions: usize,
    pub span_s: f64,
    pub seed: u64,
    pub train: TrainConfig,
    pub alarm: AlarmConfig,
}

impl Default for HoldoutConfig {
    fn default() -> Self {
        HoldoutConfig {
            repetitions: 20,
            span_s: 7200.0,
            seed: 0,
            train: TrainConfig::default(),
            alarm: AlarmConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repetition {
    pub span_start: f64,
    pub span_end: f64,
    /// Seizures lying fully inside the span.
    pub n_seizures: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: EvalMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub repetitions: Vec<Repetition>,
    /// Means over the repetitions where each metric is defined.
    pub sensitivity: Option<f64>,
    pub ppv: Option<f64>,
    pub far: Option<f64>,
}

fn offsets(recordings: &[HoldoutRecording]) -> (Vec<f64>, f64) {
    let mut acc = 0.0;
    let offs = recordings
        .iter()
        .map(|r| {
            let o = acc;
            acc += r.duration;
            o
        })
        .collect();
    (offs, acc)
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// One repetition with a given span on the virtual timeline.
pub fn run_split(
    recordings: &[HoldoutRecording],
    span_start: f64,
    cfg: &HoldoutConfig,
) -> Result<Repetition> {
    let (offs, _) = offsets(recordings);
    let span_end = span_start + cfg.span_s;
    let n_features = recordings.first().map_or(0, |r| r.data.n_features);
    let length = recordings.first().map_or(0, |r| r.data.length);
    let mut train_set = WindowedDataset::empty(n_features, length);
    let mut tests = Vec::with_capacity(recordings.len());
    for (rec, &off) in recordings.iter().zip(&offs) {
        let d = &rec.data;
        let v = |t: f64| off + (t - rec.start);
        let inside = |i: usize| v(d.start_times[i]) >= span_start && v(d.end_times[i]) <= span_end;
        let outside = |i: usize| v(d.end_times[i]) <= span_start || v(d.start_times[i]) >= span_end;
        let tr = d.subset(outside);
        for i in 0..tr.len() {
            train_set.push(
                tr.windows[i].clone(),
                tr.labels[i],
                tr.start_times[i],
                tr.window_times[i],
                tr.end_times[i],
            );
        }
        tests.push(d.subset(inside));
    }
    let (params, _) = train(&train_set, &cfg.train)?;

    let mut alarm_times = Vec::new();
    let mut seizures = Vec::new();
    let mut n_test = 0;
    for ((rec, &off), test) in recordings.iter().zip(&offs).zip(&tests) {
        n_test += test.len();
        let v = |t: f64| off + (t - rec.start);
        let probs = predict_all(&params, test);
        alarm_times.extend(
            alarms(&test.window_times, &probs, &cfg.alarm)
                .into_iter()
                .map(v),
        );
        for a in &rec.annotations {
            if v(a.onset) >= span_start && v(a.offset) <= span_end {
                seizures.push(SeizureAnnotation {
                    onset: v(a.onset),
                    offset: v(a.offset),
                    label: a.label.clone(),
                });
            }
        }
    }
    let metrics = evaluate(&alarm_times, &seizures, cfg.span_s / 3600.0);
    Ok(Repetition {
        span_start,
        span_end,
        n_seizures: seizures.len(),
        n_train: train_set.len(),
        n_test,
        metrics,
    })
}

/// Runs `cfg.repetitions` holdout repetitions with spans drawn from
/// `cfg.seed`; repetition `k` trains with seed `cfg.train.seed + k`.
pub fn holdout_protocol(
    recordings: &[HoldoutRecording],
    cfg: &HoldoutConfig,
) -> Result<HoldoutReport> {
    let (_, total) = offsets(recordings);
    if total < 2.0 * cfg.span_s || total < 4.0 * 3600.0 {
        return Err(Error::InsufficientData(format!(
            "holdout needs at least 4 h of data, got {:.2} h",
            total / 3600.0
        )));
    }
    if cfg.repetitions == 0 {
        return Err(Error::Validation("repetitions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts: Vec<f64> = (0..cfg.repetitions)
        .map(|_| rng.random_range(0.0..=total - cfg.span_s))
        .collect();
    let mut reps = Vec::with_capacity(starts.len());
    for (k, &s) in starts.iter().enumerate() {
        let mut rep_cfg = cfg.clone();
        rep_cfg.train.seed = cfg.train.seed.wrapping_add(k as u64);
        let rep = run_split(recordings, s, &rep_cfg)?;
        log::info!(
            "holdout {}/{}: span {:.0}-{:.0} s, {} seizures, tp {} fp {}",
            k + 1,
            cfg.repetitions,
            rep.span_start,
            rep.span_end,
            rep.n_seizures,
            rep.metrics.tp,
            rep.metrics.fp
        );
        reps.push(rep);
    }
    Ok(HoldoutReport {
        sensitivity: mean_defined(reps.iter().map(|r| r.metrics.sensitivity)),
        ppv: mean_defined(reps.iter().map(|r| r.metrics.ppv)),
        far: mean_defined(reps.iter().map(|r| r.metrics.far)),
        repetitions: reps,
    })
}
