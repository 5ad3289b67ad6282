//! Alarm post-processing and event-level metrics.

use serde::{Deserialize, Serialize};

use crate::types::SeizureAnnotation;

/// Detections up to this long before onset still count as true positives.
pub const EARLY_CREDIT_S: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlarmConfig {
    pub threshold: f64,
    pub min_consecutive: usize,
    pub refractory_s: f64,
}

impl Default for AlarmConfig {
    fn default() -> Self {
        AlarmConfig {
            threshold: 0.5,
            min_consecutive: 3,
            refractory_s: 300.0,
        }
    }
}

/// Alarm times: an alarm fires on the window where a run of windows above
/// `threshold` reaches `min_consecutive`, unless the previous alarm is less
/// than `refractory_s` earlier.
pub fn alarms(times: &[f64], probabilities: &[f64], cfg: &AlarmConfig) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut run = 0;
    for (&t, &p) in times.iter().zip(probabilities) {
        if p > cfg.threshold {
            run += 1;
        } else {
            run = 0;
        }
        if run == cfg.min_consecutive.max(1) {
            let suppressed = out.last().is_some_and(|&last| t - last < cfg.refractory_s);
            if !suppressed {
                out.push(t);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub sensitivity: Option<f64>,
    pub ppv: Option<f64>,
    pub far: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Event-level scoring: a seizure is detected when an alarm falls within
/// `[onset - 60 s, offset]`; alarms outside every such interval are false.
pub fn evaluate(
    alarm_times: &[f64],
    annotations: &[SeizureAnnotation],
    total_hours: f64,
) -> EvalMetrics {
    let matches = |t: f64, a: &SeizureAnnotation| t >= a.onset - EARLY_CREDIT_S && t <= a.offset;
    let tp = annotations
        .iter()
        .filter(|a| alarm_times.iter().any(|&t| matches(t, a)))
        .count();
    let fp = alarm_times
        .iter()
        .filter(|&&t| !annotations.iter().any(|a| matches(t, a)))
        .count();
    let fn_ = annotations.len() - tp;
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    EvalMetrics {
        sensitivity: ratio(tp, tp + fn_),
        ppv: ratio(tp, tp + fp),
        far: (total_hours > 0.0).then(|| fp as f64 / total_hours),
        tp,
        fp,
        fn_,
    }
}
