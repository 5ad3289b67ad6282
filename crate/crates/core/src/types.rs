//! Shared domain types: uniformly sampled channels, seizure annotations,
//! recordings and the interictal baseline mask.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::Pulse;

/// A uniformly sampled channel on the session clock.
///
/// Sample `i` is taken at `start_time + i / sample_rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSeries {
    pub channel_name: String,
    pub sample_rate: f64,
    pub start_time: f64,
    pub samples: Vec<f64>,
}

impl SampleSeries {
    pub fn new(
        channel_name: impl Into<String>,
        sample_rate: f64,
        start_time: f64,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::Validation(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::NonFinite("series start time".into()));
        }
        Ok(SampleSeries {
            channel_name: channel_name.into(),
            sample_rate,
            start_time,
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `index`; errors when the index is past the end.
    pub fn time_of(&self, index: usize) -> Result<f64> {
        if index >= self.samples.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.samples.len(),
            });
        }
        Ok(self.time_at(index))
    }

    /// Unchecked variant of [`time_of`](Self::time_of) for hot loops.
    #[inline]
    pub(crate) fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 / self.sample_rate
    }

    /// Fractional sample position of time `t` (may fall outside the series).
    #[inline]
    pub fn position_of(&self, t: f64) -> f64 {
        (t - self.start_time) * self.sample_rate
    }

    /// Length of the series in seconds (`len / sample_rate`).
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration()
    }

    /// Samples whose time falls in `[t0, t1)`, as a new series.
    pub fn window(&self, t0: f64, t1: f64) -> SampleSeries {
        let n = self.samples.len();
        let lo = self.position_of(t0).ceil().clamp(0.0, n as f64) as usize;
        let hi = self.position_of(t1).ceil().clamp(lo as f64, n as f64) as usize;
        SampleSeries {
            channel_name: self.channel_name.clone(),
            sample_rate: self.sample_rate,
            start_time: self.time_at(lo),
            samples: self.samples[lo..hi].to_vec(),
        }
    }
}

/// Free-function form of [`SampleSeries::time_of`].
pub fn time_of(series: &SampleSeries, index: usize) -> Result<f64> {
    series.time_of(index)
}

/// A neurologist-marked seizure interval on the session clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeizureAnnotation {
    pub onset: f64,
    pub offset: f64,
    #[serde(default = "default_label")]
    pub label: String,
}

fn default_label() -> String {
    "seizure".to_string()
}

impl SeizureAnnotation {
    pub fn new(onset: f64, offset: f64, label: impl Into<String>) -> Result<Self> {
        let a = SeizureAnnotation {
            onset,
            offset,
            label: label.into(),
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.onset.is_finite() && self.offset.is_finite()) {
            return Err(Error::NonFinite("annotation bounds".into()));
        }
        if self.offset <= self.onset {
            return Err(Error::Validation(format!(
                "annotation offset {} must follow onset {}",
                self.offset, self.onset
            )));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.offset - self.onset
    }

    /// True when `[start, end]` intersects the seizure interval.
    pub fn overlaps(&self, start: f64, end: f64) -> bool {
        start <= self.offset && end >= self.onset
    }
}

/// Checks that annotations are individually valid, sorted and non-overlapping.
pub fn validate_annotations(annotations: &[SeizureAnnotation]) -> Result<()> {
    for a in annotations {
        a.validate()?;
    }
    for pair in annotations.windows(2) {
        if pair[1].onset < pair[0].offset {
            return Err(Error::Validation(format!(
                "annotations must be sorted and non-overlapping: [{}, {}] then [{}, {}]",
                pair[0].onset, pair[0].offset, pair[1].onset, pair[1].offset
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    pub subject_id: String,
    pub ppg: SampleSeries,
    pub ecg: Option<SampleSeries>,
    pub annotations: Vec<SeizureAnnotation>,
}

impl Recording {
    pub fn new(
        subject_id: impl Into<String>,
        ppg: SampleSeries,
        ecg: Option<SampleSeries>,
        annotations: Vec<SeizureAnnotation>,
    ) -> Result<Self> {
        let rec = Recording {
            subject_id: subject_id.into(),
            ppg,
            ecg,
            annotations,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        validate_annotations(&self.annotations)?;
        let mut spans = vec![(self.ppg.start_time, self.ppg.end_time())];
        if let Some(ecg) = &self.ecg {
            spans.push((ecg.start_time, ecg.end_time()));
        }
        for a in &self.annotations {
            let inside = spans.iter().any(|&(s, e)| a.onset >= s && a.offset <= e);
            if !inside {
                return Err(Error::Validation(format!(
                    "annotation [{}, {}] falls outside the recorded channels",
                    a.onset, a.offset
                )));
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.ppg.duration()
    }
}

/// Exclusion margins around seizures when deciding what counts as interictal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineMargins {
    /// A baseline pulse must end more than this long before every onset.
    pub pre_onset_s: f64,
    /// A baseline pulse must begin more than this long after every offset.
    pub post_offset_s: f64,
}

impl Default for BaselineMargins {
    fn default() -> Self {
        BaselineMargins {
            pre_onset_s: 15.0 * 60.0,
            post_offset_s: 5.0 * 60.0,
        }
    }
}

/// Per-pulse interictal flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineMask(pub Vec<bool>);

impl BaselineMask {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }
}

/// Baseline mask with the default 15 min / 5 min margins.
pub fn baseline_mask(pulses: &[Pulse], annotations: &[SeizureAnnotation]) -> BaselineMask {
    baseline_mask_with(
        pulses.iter().map(|p| (p.trough_time, p.next_trough_time)),
        annotations,
        BaselineMargins::default(),
    )
}

/// Baseline mask over arbitrary `(begin, end)` spans.
///
/// A span is baseline when, for every seizure, it either ends more than
/// `pre_onset_s` before the onset or begins more than `post_offset_s` after
/// the offset.
pub fn baseline_mask_with(
    spans: impl IntoIterator<Item = (f64, f64)>,
    annotations: &[SeizureAnnotation],
    margins: BaselineMargins,
) -> BaselineMask {
    BaselineMask(
        spans
            .into_iter()
            .map(|(begin, end)| {
                annotations.iter().all(|a| {
                    end < a.onset - margins.pre_onset_s || begin > a.offset + margins.post_offset_s
                })
            })
            .collect(),
    )
}
