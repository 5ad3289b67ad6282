//! The twelve per-pulse features and the extraction pipeline.

pub mod hrv;
pub mod morphology;
pub mod pca;
pub mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{Pulse, RPeakTrain};
use crate::types::{baseline_mask, SeizureAnnotation};

pub use pca::BaselinePca;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureName {
    HR,
    SDNN,
    RMSSD,
    NN50,
    LF,
    HF,
    LFHF,
    PA,
    #[serde(rename = "tNCT")]
    TNct,
    PTT,
    #[serde(rename = "tNMV")]
    TNmv,
    PCA1,
}

impl FeatureName {
    pub const ALL: [FeatureName; 12] = [
        FeatureName::HR,
        FeatureName::SDNN,
        FeatureName::RMSSD,
        FeatureName::NN50,
        FeatureName::LF,
        FeatureName::HF,
        FeatureName::LFHF,
        FeatureName::PA,
        FeatureName::TNct,
        FeatureName::PTT,
        FeatureName::TNmv,
        FeatureName::PCA1,
    ];

    /// Rate-variability features (the 7-feature detector input).
    pub const HRV: [FeatureName; 7] = [
        FeatureName::HR,
        FeatureName::SDNN,
        FeatureName::RMSSD,
        FeatureName::NN50,
        FeatureName::LF,
        FeatureName::HF,
        FeatureName::LFHF,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureName::HR => "HR",
            FeatureName::SDNN => "SDNN",
            FeatureName::RMSSD => "RMSSD",
            FeatureName::NN50 => "NN50",
            FeatureName::LF => "LF",
            FeatureName::HF => "HF",
            FeatureName::LFHF => "LFHF",
            FeatureName::PA => "PA",
            FeatureName::TNct => "tNCT",
            FeatureName::PTT => "PTT",
            FeatureName::TNmv => "tNMV",
            FeatureName::PCA1 => "PCA1",
        }
    }

    /// Column position in [`FeatureName::ALL`].
    pub fn index(&self) -> usize {
        FeatureName::ALL
            .iter()
            .position(|f| f == self)
            .expect("listed")
    }

    /// Detector input set for a feature count of 7 or 12.
    pub fn set(count: usize) -> Result<&'static [FeatureName]> {
        match count {
            7 => Ok(&FeatureName::HRV),
            12 => Ok(&FeatureName::ALL),
            other => Err(Error::Validation(format!(
                "feature set must be 7 or 12, got {other}"
            ))),
        }
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureName::ALL
            .iter()
            .find(|f| f.as_str() == s)
            .copied()
            .ok_or_else(|| Error::Validation(format!("unknown feature {s:?}")))
    }
}

/// Defined values of one feature against pulse time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSeries {
    pub feature_name: FeatureName,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// All features for every clean pulse of one recording; `None` marks an
/// undefined value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    /// Start of the recording; analysis segments are anchored here.
    pub origin: f64,
    /// Pulse (trough) times.
    pub times: Vec<f64>,
    /// Next-trough times.
    pub ends: Vec<f64>,
    /// One column per entry of [`FeatureName::ALL`].
    pub columns: Vec<Vec<Option<f64>>>,
}

impl FeatureTable {
    pub fn empty(origin: f64) -> Self {
        FeatureTable {
            origin,
            times: Vec::new(),
            ends: Vec::new(),
            columns: vec![Vec::new(); FeatureName::ALL.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: FeatureName) -> &[Option<f64>] {
        &self.columns[name.index()]
    }

    pub fn series(&self, name: FeatureName) -> FeatureSeries {
        let (times, values) = self
            .times
            .iter()
            .zip(self.column(name))
            .filter_map(|(&t, v)| v.map(|v| (t, v)))
            .unzip();
        FeatureSeries {
            feature_name: name,
            times,
            values,
        }
    }
}

/// Extraction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub segment_length_s: f64,
    pub spectral_window_s: f64,
    pub spectral_min_pulses: usize,
    pub pca_resample_n: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            segment_length_s: 300.0,
            spectral_window_s: 120.0,
            spectral_min_pulses: 30,
            pca_resample_n: pca::DEFAULT_RESAMPLE_N,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.segment_length_s > 0.0 && self.spectral_window_s > 0.0) {
            return Err(Error::Validation("window lengths must be positive".into()));
        }
        if self.pca_resample_n < 3 {
            return Err(Error::Validation(
                "pca_resample_n must be at least 3".into(),
            ));
        }
        Ok(())
    }
}

/// Feature table plus the fitted baseline component (if one could be fit).
#[derive(Debug, Clone)]
pub struct Extraction {
    pub table: FeatureTable,
    pub pca: Option<BaselinePca>,
}

/// Computes all features for the clean pulses of one recording.
///
/// PCA1 is fit on the clean interictal baseline pulses; with too few of them
/// the PCA1 column is left undefined. PTT needs `rpeaks`.
pub fn extract_features(
    pulses: &[Pulse],
    rpeaks: Option<&RPeakTrain>,
    annotations: &[SeizureAnnotation],
    origin: f64,
    cfg: &FeatureConfig,
) -> Result<Extraction> {
    cfg.validate()?;
    let clean: Vec<&Pulse> = pulses.iter().filter(|p| p.clean).collect();
    let mask = baseline_mask(pulses, annotations);
    let baseline: Vec<&Pulse> = pulses
        .iter()
        .zip(&mask.0)
        .filter(|(p, &b)| p.clean && b)
        .map(|(p, _)| p)
        .collect();
    let pca = match pca::fit_baseline_pca(&baseline, cfg.pca_resample_n) {
        Ok(p) => Some(p),
        Err(Error::InsufficientBaseline { found, required }) => {
            log::warn!("PCA1 undefined: {found} clean baseline pulses, need {required}");
            None
        }
        Err(e) => return Err(e),
    };

    let times: Vec<f64> = clean.iter().map(|p| p.trough_time).collect();
    let ends: Vec<f64> = clean.iter().map(|p| p.next_trough_time).collect();
    let widths: Vec<f64> = clean.iter().map(|p| p.width()).collect();
    let hr = hrv::hr_series(&widths);
    let [sdnn, rmssd, nn50] = hrv::segment_to_date(&times, &widths, origin, cfg.segment_length_s);
    let hr_values: Vec<f64> = hr.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let spectral = spectral::trailing_spectral(
        &times,
        &hr_values,
        cfg.spectral_window_s,
        cfg.spectral_min_pulses,
    );

    let mut columns: Vec<Vec<Option<f64>>> =
        (0..12).map(|_| Vec::with_capacity(clean.len())).collect();
    for (i, p) in clean.iter().enumerate() {
        let row = [
            hr[i],
            sdnn[i],
            rmssd[i],
            nn50[i],
            spectral[i].lf_norm,
            spectral[i].hf_norm,
            spectral[i].lf_hf,
            Some(morphology::pulse_amplitude(p)),
            Some(morphology::normalized_crest_time(p)),
            rpeaks.and_then(|r| morphology::pulse_transit_time(p, r)),
            morphology::normalized_max_velocity_time(p),
            pca.as_ref().and_then(|b| pca::pca1(p, b)),
        ];
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v.filter(|x| x.is_finite()));
        }
    }
    Ok(Extraction {
        table: FeatureTable {
            origin,
            times,
            ends,
            columns,
        },
        pca,
    })
}
