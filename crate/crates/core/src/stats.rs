//! Previous-segment z-scores and ictal significance screening.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::features::hrv::segment_index;
use crate::features::{FeatureName, FeatureSeries, FeatureTable};
use crate::types::{BaselineMask, SeizureAnnotation};

pub const SIGNIFICANCE_LEVEL: f64 = 0.01;
pub const MIN_GROUP_SIZE: usize = 10;
/// Post-onset comparison window.
pub const POST_ONSET_S: f64 = 300.0;
const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreSeries {
    pub feature_name: FeatureName,
    pub times: Vec<f64>,
    pub zvalues: Vec<Option<f64>>,
}

/// z-scores of every row of `values` against the mean and population
/// standard deviation of the defined values in the previous segment.
pub fn zscore_values(
    times: &[f64],
    values: &[Option<f64>],
    origin: f64,
    segment_length: f64,
) -> Vec<Option<f64>> {
    let mut stats: BTreeMap<i64, (f64, f64, usize)> = BTreeMap::new();
    for (&t, v) in times.iter().zip(values) {
        if let Some(v) = v {
            let e = stats
                .entry(segment_index(t, origin, segment_length))
                .or_default();
            e.2 += 1;
            e.0 += v;
        }
    }
    let means: BTreeMap<i64, f64> = stats.iter().map(|(&k, s)| (k, s.0 / s.2 as f64)).collect();
    for (&t, v) in times.iter().zip(values) {
        if let Some(v) = v {
            let k = segment_index(t, origin, segment_length);
            let d = v - means[&k];
            stats.get_mut(&k).expect("segment").1 += d * d;
        }
    }
    let mut logged = std::collections::BTreeSet::new();
    times
        .iter()
        .zip(values)
        .map(|(&t, v)| {
            let v = (*v)?;
            let k = segment_index(t, origin, segment_length);
            let (_, ss, n) = *stats.get(&(k - 1))?;
            let mu = means[&(k - 1)];
            let sigma = (ss / n as f64).sqrt();
            if sigma < SIGMA_FLOOR {
                if logged.insert(k) {
                    log::debug!("segment {k}: previous-segment spread is degenerate");
                }
                return None;
            }
            Some((v - mu) / sigma)
        })
        .collect()
}

pub fn zscore(feature: &FeatureSeries, origin: f64, segment_length: f64) -> ZScoreSeries {
    let values: Vec<Option<f64>> = feature.values.iter().map(|&v| Some(v)).collect();
    ZScoreSeries {
        feature_name: feature.feature_name,
        times: feature.times.clone(),
        zvalues: zscore_values(&feature.times, &values, origin, segment_length),
    }
}

/// z-scores of every column of a feature table, row-aligned with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreTable {
    pub origin: f64,
    pub times: Vec<f64>,
    pub ends: Vec<f64>,
    pub columns: Vec<Vec<Option<f64>>>,
}

impl ZScoreTable {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: FeatureName) -> &[Option<f64>] {
        &self.columns[name.index()]
    }

    pub fn series(&self, name: FeatureName) -> ZScoreSeries {
        ZScoreSeries {
            feature_name: name,
            times: self.times.clone(),
            zvalues: self.column(name).to_vec(),
        }
    }
}

pub fn zscore_table(table: &FeatureTable, segment_length: f64) -> ZScoreTable {
    ZScoreTable {
        origin: table.origin,
        times: table.times.clone(),
        ends: table.ends.clone(),
        columns: table
            .columns
            .iter()
            .map(|c| zscore_values(&table.times, c, table.origin, segment_length))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increase,
    Decrease,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub p_value: f64,
    pub direction: Direction,
    pub n_baseline: usize,
    pub n_post: usize,
    pub mean_difference: f64,
}

/// One-way ANOVA of two groups: `(F, p)` with `F ~ F(1, N - 2)`.
pub fn one_way_anova(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let ma = a.iter().sum::<f64>() / na;
    let mb = b.iter().sum::<f64>() / nb;
    let grand = (ma * na + mb * nb) / n;
    let ssb = na * (ma - grand).powi(2) + nb * (mb - grand).powi(2);
    let ssw = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>()
        + b.iter().map(|x| (x - mb).powi(2)).sum::<f64>();
    let df_w = n - 2.0;
    if ssb == 0.0 {
        return (0.0, 1.0);
    }
    if ssw == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let f = ssb / (ssw / df_w);
    let p = FisherSnedecor::new(1.0, df_w)
        .map(|d| d.sf(f))
        .unwrap_or(f64::NAN);
    (f, p)
}

/// Baseline z-values (mask true) against z-values within 300 s after onset.
/// `None` when either group has fewer than ten values.
pub fn anova_screen(
    z: &ZScoreSeries,
    annotation: &SeizureAnnotation,
    mask: &BaselineMask,
) -> Option<AnovaResult> {
    let mut baseline = Vec::new();
    let mut post = Vec::new();
    for (i, (&t, v)) in z.times.iter().zip(&z.zvalues).enumerate() {
        let Some(v) = *v else { continue };
        if mask.get(i) {
            baseline.push(v);
        }
        if t >= annotation.onset && t <= annotation.onset + POST_ONSET_S {
            post.push(v);
        }
    }
    if baseline.len() < MIN_GROUP_SIZE || post.len() < MIN_GROUP_SIZE {
        return None;
    }
    let (f, p) = one_way_anova(&baseline, &post);
    let diff = post.iter().sum::<f64>() / post.len() as f64
        - baseline.iter().sum::<f64>() / baseline.len() as f64;
    let direction = if p < SIGNIFICANCE_LEVEL {
        if diff > 0.0 {
            Direction::Increase
        } else if diff < 0.0 {
            Direction::Decrease
        } else {
            Direction::None
        }
    } else {
        Direction::None
    };
    Some(AnovaResult {
        f_statistic: f,
        p_value: p,
        direction,
        n_baseline: baseline.len(),
        n_post: post.len(),
        mean_difference: diff,
    })
}

/// Screening results for one seizure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeizureReport {
    pub subject_id: String,
    pub onset: f64,
    pub offset: f64,
    pub results: BTreeMap<FeatureName, Option<AnovaResult>>,
}

/// Screens every feature of a z-score table against every annotation.
pub fn screen_recording(
    subject_id: &str,
    z: &ZScoreTable,
    annotations: &[SeizureAnnotation],
    mask: &BaselineMask,
) -> Vec<SeizureReport> {
    annotations
        .iter()
        .map(|a| SeizureReport {
            subject_id: subject_id.to_string(),
            onset: a.onset,
            offset: a.offset,
            results: FeatureName::ALL
                .iter()
                .map(|&f| (f, anova_screen(&z.series(f), a, mask)))
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSignificance {
    pub significant_pct: f64,
    pub increase_pct: f64,
    pub decrease_pct: f64,
    /// Seizures where the test could be run.
    pub n_defined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    pub n_seizures: usize,
    pub features: BTreeMap<FeatureName, FeatureSignificance>,
    pub seizures: Vec<SeizureReport>,
}

/// Percentages over all seizures; an undefined test counts as not significant.
pub fn aggregate_table(reports: &[SeizureReport]) -> SignificanceReport {
    let n = reports.len();
    let pct = |k: usize| {
        if n == 0 {
            0.0
        } else {
            100.0 * k as f64 / n as f64
        }
    };
    let features = FeatureName::ALL
        .iter()
        .map(|&f| {
            let results: Vec<AnovaResult> = reports
                .iter()
                .filter_map(|r| r.results.get(&f).copied().flatten())
                .collect();
            let sig = results
                .iter()
                .filter(|r| r.p_value < SIGNIFICANCE_LEVEL)
                .count();
            let inc = results
                .iter()
                .filter(|r| r.direction == Direction::Increase)
                .count();
            let dec = results
                .iter()
                .filter(|r| r.direction == Direction::Decrease)
                .count();
            (
                f,
                FeatureSignificance {
                    significant_pct: pct(sig),
                    increase_pct: pct(inc),
                    decrease_pct: pct(dec),
                    n_defined: results.len(),
                },
            )
        })
        .collect();
    SignificanceReport {
        n_seizures: n,
        features,
        seizures: reports.to_vec(),
    }
}
