//! Sliding windows of per-pulse z-score vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureName;
use crate::stats::ZScoreTable;
use crate::types::SeizureAnnotation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowConfig {
    pub length: usize,
    pub stride: usize,
    /// A time gap longer than this between usable pulses breaks a run.
    pub max_gap_s: f64,
    /// Inputs are clipped to ±clip before entering the network.
    pub clip: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            length: 60,
            stride: 10,
            max_gap_s: 5.0,
            clip: 10.0,
        }
    }
}

/// Fixed-length windows, each `length × n_features` values in step-major
/// order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WindowedDataset {
    pub n_features: usize,
    pub length: usize,
    pub windows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
    /// Time of the last pulse in each window.
    pub window_times: Vec<f64>,
    /// Time of the first pulse in each window.
    pub start_times: Vec<f64>,
    /// End of the last pulse in each window.
    pub end_times: Vec<f64>,
}

impl WindowedDataset {
    pub fn empty(n_features: usize, length: usize) -> Self {
        WindowedDataset {
            n_features,
            length,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Step `t` of window `w`.
    pub fn step(&self, w: usize, t: usize) -> &[f64] {
        &self.windows[w][t * self.n_features..(t + 1) * self.n_features]
    }

    pub fn push(&mut self, window: Vec<f64>, label: bool, start: f64, time: f64, end: f64) {
        self.windows.push(window);
        self.labels.push(label);
        self.start_times.push(start);
        self.window_times.push(time);
        self.end_times.push(end);
    }

    /// Keeps only the windows whose index satisfies `keep`.
    pub fn subset(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut out = WindowedDataset::empty(self.n_features, self.length);
        for i in (0..self.len()).filter(|&i| keep(i)) {
            out.push(
                self.windows[i].clone(),
                self.labels[i],
                self.start_times[i],
                self.window_times[i],
                self.end_times[i],
            );
        }
        out
    }
}

/// Windows of `cfg.length` consecutive usable pulses with stride
/// `cfg.stride`. A pulse is usable when every selected feature is defined;
/// unusable pulses are skipped and a run only breaks where usable pulses are
/// more than `cfg.max_gap_s` apart. A window is labelled ictal when its span
/// overlaps any annotation.
pub fn make_windows(
    z: &ZScoreTable,
    features: &[FeatureName],
    annotations: &[SeizureAnnotation],
    cfg: &WindowConfig,
) -> Result<WindowedDataset> {
    if cfg.length == 0 || cfg.stride == 0 {
        return Err(Error::Validation(
            "window length and stride must be positive".into(),
        ));
    }
    let f = features.len();
    let mut out = WindowedDataset::empty(f, cfg.length);
    let usable: Vec<usize> = (0..z.len())
        .filter(|&i| features.iter().all(|&name| z.column(name)[i].is_some()))
        .collect();
    let mut runs: Vec<&[usize]> = Vec::new();
    let mut start = 0;
    for k in 1..=usable.len() {
        if k == usable.len() || z.times[usable[k]] - z.times[usable[k - 1]] > cfg.max_gap_s {
            runs.push(&usable[start..k]);
            start = k;
        }
    }
    for run in runs {
        if run.len() < cfg.length {
            continue;
        }
        let mut s = 0;
        while s + cfg.length <= run.len() {
            let rows = &run[s..s + cfg.length];
            let mut window = Vec::with_capacity(cfg.length * f);
            for &i in rows {
                for &name in features {
                    let v = z.column(name)[i].expect("usable row");
                    window.push(v.clamp(-cfg.clip, cfg.clip));
                }
            }
            let t0 = z.times[rows[0]];
            let t1 = z.times[rows[cfg.length - 1]];
            let end = z.ends[rows[cfg.length - 1]];
            let label = annotations.iter().any(|a| a.overlaps(t0, end));
            out.push(window, label, t0, t1, end);
            s += cfg.stride;
        }
    }
    Ok(out)
}
