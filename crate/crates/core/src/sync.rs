//! Clock alignment between the PPG wristband and the EEG/ECG machine.
//!
//! Both devices record the same burst of square pulses twice per session:
//! the wristband optically, the EEG machine on an analog input. Rising edges
//! of the two bursts are matched by rank and a linear clock model
//! `t_device = offset + (1 + drift) * t_eeg` is fitted by least squares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::SampleSeries;

/// Edges closer than this are treated as one (chatter around the threshold).
pub const EDGE_MERGE_S: f64 = 0.5;
/// Mean absolute residual above which alignment is rejected.
pub const MAX_RESIDUAL_S: f64 = 0.1;
/// Largest plausible relative clock skew for consumer hardware.
pub const MAX_DRIFT: f64 = 1e-3;
/// A complete stamp burst.
pub const STAMP_PULSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StampSource {
    Optical,
    Analog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StampTrain {
    pub edge_times: Vec<f64>,
    pub source: StampSource,
}

impl StampTrain {
    pub fn len(&self) -> usize {
        self.edge_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_times.is_empty()
    }

    /// A full burst: ten edges about one second apart.
    pub fn is_complete(&self) -> bool {
        self.edge_times.len() == STAMP_PULSES
            && self
                .edge_times
                .windows(2)
                .all(|w| (w[1] - w[0] - 1.0).abs() < 0.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockModel {
    pub offset: f64,
    pub drift: f64,
}

impl ClockModel {
    pub const IDENTITY: ClockModel = ClockModel {
        offset: 0.0,
        drift: 0.0,
    };

    /// Device time to EEG time.
    pub fn to_eeg(&self, t: f64) -> f64 {
        (t - self.offset) / (1.0 + self.drift)
    }

    /// EEG time to device time.
    pub fn to_device(&self, t: f64) -> f64 {
        self.offset + (1.0 + self.drift) * t
    }

    /// The model that undoes `self` under [`apply_clock`].
    pub fn inverse(&self) -> ClockModel {
        let scale = 1.0 + self.drift;
        ClockModel {
            offset: -self.offset / scale,
            drift: 1.0 / scale - 1.0,
        }
    }
}

/// Fitted clock model plus its mean absolute residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockFit {
    #[serde(rename = "offset_s")]
    pub offset: f64,
    pub drift: f64,
    pub residual_s: f64,
}

impl ClockFit {
    pub fn model(&self) -> ClockModel {
        ClockModel {
            offset: self.offset,
            drift: self.drift,
        }
    }
}

/// Rising edges where the signal crosses `threshold_fraction` of its range.
///
/// The edge time is the first sample at or above the threshold. Edges within
/// [`EDGE_MERGE_S`] of the previous kept edge are dropped.
pub fn detect_stamps(
    series: &SampleSeries,
    threshold_fraction: f64,
    source: StampSource,
) -> Result<StampTrain> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "threshold fraction must be in (0, 1), got {threshold_fraction}"
        )));
    }
    if series.is_empty() {
        return Err(Error::StampNotFound("empty series".into()));
    }
    let (lo, hi) = series
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonFinite(format!("channel {}", series.channel_name)));
    }
    let swing = hi - lo;
    if swing <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::StampNotFound(format!(
            "channel {} is flat",
            series.channel_name
        )));
    }
    let level = lo + threshold_fraction * swing;

    let mut edges: Vec<f64> = Vec::new();
    for i in 1..series.len() {
        if series.samples[i - 1] < level && series.samples[i] >= level {
            let t = series.time_at(i);
            match edges.last() {
                Some(&last) if t - last < EDGE_MERGE_S => {}
                _ => edges.push(t),
            }
        }
    }
    if edges.len() < 3 {
        return Err(Error::StampNotFound(format!(
            "{} rising edge(s) in channel {}",
            edges.len(),
            series.channel_name
        )));
    }
    Ok(StampTrain {
        edge_times: edges,
        source,
    })
}

/// Fits the clock model from the start and end stamp sessions.
///
/// Each pair is `(optical, analog)`. Edges are matched by rank after trimming
/// both trains of a pair to the shorter length.
pub fn fit_clock(
    start_pair: (&StampTrain, &StampTrain),
    end_pair: (&StampTrain, &StampTrain),
) -> Result<ClockFit> {
    let mut eeg = Vec::new();
    let mut device = Vec::new();
    for (session, (optical, analog)) in [("start", start_pair), ("end", end_pair)] {
        let n = optical.len().min(analog.len());
        if n < 3 {
            return Err(Error::StampNotFound(format!(
                "{session} session has {n} matched edge(s), need 3"
            )));
        }
        device.extend_from_slice(&optical.edge_times[..n]);
        eeg.extend_from_slice(&analog.edge_times[..n]);
    }

    let n = eeg.len() as f64;
    let mx = eeg.iter().sum::<f64>() / n;
    let my = device.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in eeg.iter().zip(&device) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::Numeric("stamp edges are all simultaneous".into()));
    }
    let slope = sxy / sxx;
    let offset = my - slope * mx;
    let drift = slope - 1.0;
    if !(offset.is_finite() && drift.is_finite()) {
        return Err(Error::NonFinite("clock fit".into()));
    }
    if drift.abs() >= MAX_DRIFT {
        return Err(Error::ImplausibleDrift(drift));
    }
    let residual_s = eeg
        .iter()
        .zip(&device)
        .map(|(&x, &y)| (y - (offset + slope * x)).abs())
        .sum::<f64>()
        / n;
    if residual_s > MAX_RESIDUAL_S {
        return Err(Error::AlignmentFailed {
            residual_s,
            limit_s: MAX_RESIDUAL_S,
        });
    }
    Ok(ClockFit {
        offset,
        drift,
        residual_s,
    })
}

/// Re-expresses a device series on the EEG clock. Sample values are untouched.
pub fn apply_clock(series: &SampleSeries, model: ClockModel) -> SampleSeries {
    SampleSeries {
        channel_name: series.channel_name.clone(),
        sample_rate: series.sample_rate * (1.0 + model.drift),
        start_time: model.to_eeg(series.start_time),
        samples: series.samples.clone(),
    }
}
