//! Per-recording analysis chain and corpus-level reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detector::{
    holdout_protocol, make_windows, HoldoutConfig, HoldoutRecording, HoldoutReport, WindowConfig,
};
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureConfig, FeatureName, FeatureTable};
use crate::io;
use crate::pulse::{detect_rpeaks, segment_series, Pulse, RPeakTrain};
use crate::stats::{
    aggregate_table, screen_recording, zscore_table, SeizureReport, SignificanceReport, ZScoreTable,
};
use crate::synth::{corpus_scripts, generate, CorpusConfig};
use crate::types::{
    baseline_mask_with, BaselineMargins, BaselineMask, Recording, SeizureAnnotation,
};

/// Everything derived from one recording.
#[derive(Debug, Clone)]
pub struct RecordingAnalysis {
    pub subject_id: String,
    pub pulses: Vec<Pulse>,
    pub rpeaks: Option<RPeakTrain>,
    pub features: FeatureTable,
    pub zscores: ZScoreTable,
    /// Interictal flag per z-score row.
    pub mask: BaselineMask,
    pub reports: Vec<SeizureReport>,
}

/// Baseline mask over the rows of a z-score table.
pub fn table_baseline_mask(z: &ZScoreTable, annotations: &[SeizureAnnotation]) -> BaselineMask {
    baseline_mask_with(
        z.times.iter().copied().zip(z.ends.iter().copied()),
        annotations,
        BaselineMargins::default(),
    )
}

/// Segmentation, features, z-scores and seizure screening for one recording.
/// The segment grid is anchored at the start of the PPG series.
pub fn analyze_recording(rec: &Recording, cfg: &FeatureConfig) -> Result<RecordingAnalysis> {
    rec.validate()?;
    let pulses = segment_series(&rec.ppg);
    let rpeaks = rec.ecg.as_ref().map(detect_rpeaks);
    let origin = rec.ppg.start_time;
    let extraction = extract_features(&pulses, rpeaks.as_ref(), &rec.annotations, origin, cfg)?;
    let zscores = zscore_table(&extraction.table, cfg.segment_length_s);
    let mask = table_baseline_mask(&zscores, &rec.annotations);
    let reports = screen_recording(&rec.subject_id, &zscores, &rec.annotations, &mask);
    Ok(RecordingAnalysis {
        subject_id: rec.subject_id.clone(),
        pulses,
        rpeaks,
        features: extraction.table,
        zscores,
        mask,
        reports,
    })
}

/// Pools the screening results of several recordings.
pub fn significance(analyses: &[RecordingAnalysis]) -> SignificanceReport {
    let reports: Vec<SeizureReport> = analyses
        .iter()
        .flat_map(|a| a.reports.iter().cloned())
        .collect();
    aggregate_table(&reports)
}

/// Holdout input for one feature set.
pub fn holdout_inputs(
    recordings: &[Recording],
    analyses: &[RecordingAnalysis],
    features: &[FeatureName],
    cfg: &WindowConfig,
) -> Result<Vec<HoldoutRecording>> {
    recordings
        .iter()
        .zip(analyses)
        .map(|(rec, a)| {
            Ok(HoldoutRecording {
                data: make_windows(&a.zscores, features, &rec.annotations, cfg)?,
                annotations: rec.annotations.clone(),
                start: rec.ppg.start_time,
                duration: rec.duration(),
            })
        })
        .collect()
}

/// Runs the holdout protocol for one feature set.
pub fn detection(
    recordings: &[Recording],
    analyses: &[RecordingAnalysis],
    features: &[FeatureName],
    window: &WindowConfig,
    cfg: &HoldoutConfig,
) -> Result<HoldoutReport> {
    let inputs = holdout_inputs(recordings, analyses, features, window)?;
    holdout_protocol(&inputs, cfg)
}

/// Mean z-score per seizure and time bin relative to onset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub feature: FeatureName,
    /// Left edges of the bins, seconds from onset.
    pub bin_starts: Vec<f64>,
    /// One row per seizure, labelled `subject:onset`.
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

/// Bins z-values from `before_s` before to `after_s` after each onset.
pub fn heatmap(
    analyses: &[RecordingAnalysis],
    recordings: &[Recording],
    feature: FeatureName,
    before_s: f64,
    after_s: f64,
    bin_s: f64,
) -> Heatmap {
    let n_bins = ((before_s + after_s) / bin_s).ceil() as usize;
    let bin_starts = (0..n_bins).map(|b| -before_s + b as f64 * bin_s).collect();
    let mut rows = Vec::new();
    for (a, rec) in analyses.iter().zip(recordings) {
        let col = a.zscores.column(feature);
        for ann in &rec.annotations {
            let mut sums = vec![(0.0, 0usize); n_bins];
            for (&t, v) in a.zscores.times.iter().zip(col) {
                let rel = t - ann.onset;
                let (Some(v), true) = (v, rel >= -before_s && rel < after_s) else {
                    continue;
                };
                let b = (((rel + before_s) / bin_s) as usize).min(n_bins - 1);
                sums[b].0 += v;
                sums[b].1 += 1;
            }
            let means = sums
                .iter()
                .map(|&(s, n)| (n > 0).then(|| s / n as f64))
                .collect();
            rows.push((format!("{}:{}", rec.subject_id, ann.onset), means));
        }
    }
    Heatmap {
        feature,
        bin_starts,
        rows,
    }
}

/// One recording on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingPaths {
    pub subject_id: String,
    pub ppg: PathBuf,
    #[serde(default)]
    pub ecg: Option<PathBuf>,
    pub annotations: PathBuf,
    /// Sample rates for headerless CSVs.
    #[serde(default)]
    pub ppg_rate: Option<f64>,
    #[serde(default)]
    pub ecg_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputConfig {
    /// Generate a synthetic corpus in memory.
    Synthetic(CorpusConfig),
    Files(Vec<RecordingPaths>),
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig::Synthetic(CorpusConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeatmapConfig {
    pub before_s: f64,
    pub after_s: f64,
    pub bin_s: f64,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        HeatmapConfig {
            before_s: 300.0,
            after_s: 300.0,
            bin_s: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub input: InputConfig,
    pub features: FeatureConfig,
    /// Detector input sizes to evaluate (7 and/or 12).
    pub feature_sets: Vec<usize>,
    pub window: WindowConfig,
    pub holdout: HoldoutConfig,
    pub heatmap: HeatmapConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: InputConfig::default(),
            features: FeatureConfig::default(),
            feature_sets: vec![12, 7],
            window: WindowConfig::default(),
            holdout: HoldoutConfig::default(),
            heatmap: HeatmapConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        self.holdout.train.validate()?;
        for &n in &self.feature_sets {
            FeatureName::set(n)?;
        }
        if !(self.heatmap.bin_s > 0.0 && self.heatmap.before_s >= 0.0 && self.heatmap.after_s > 0.0)
        {
            return Err(Error::Validation("heatmap bins must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the serialized configuration.
    pub fn digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(serde_json::to_vec(self)?)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

/// run_manifest.json: provenance of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_sha256: String,
    /// `complete`, or `partial` when a stage failed.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<OutputEntry>,
}

pub fn load_recordings(paths: &[RecordingPaths]) -> Result<Vec<Recording>> {
    paths
        .iter()
        .map(|p| {
            let ppg = io::read_series(&p.ppg, "ppg", p.ppg_rate)?;
            let ecg = p
                .ecg
                .as_ref()
                .map(|e| io::read_series(e, "ecg", p.ecg_rate))
                .transpose()?;
            let annotations = io::read_annotations(&p.annotations)?;
            let rec = Recording::new(p.subject_id.clone(), ppg, ecg, annotations)?;
            Ok(rec)
        })
        .collect()
}

fn heatmap_csv(h: &Heatmap) -> String {
    let mut out = String::from("seizure");
    for b in &h.bin_starts {
        out.push_str(&format!(",{b}"));
    }
    out.push('\n');
    for (label, row) in &h.rows {
        out.push_str(label);
        for v in row {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}

struct RunWriter {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl RunWriter {
    fn record(&mut self, rel: &str) -> Result<()> {
        let path = self.dir.join(rel);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(OutputEntry {
            path: rel.to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        io::write_json(&self.dir.join(rel), value)?;
        self.record(rel)
    }

    fn text(&mut self, rel: &str, body: &str) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        self.record(rel)
    }
}

/// Result of [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub significance: SignificanceReport,
    pub detection: BTreeMap<String, HoldoutReport>,
}

/// Runs every stage and writes the outputs to `out/run-<first 8 hex digits of
/// the config digest>/`. On a stage failure the manifest is still written,
/// marked partial, and the stage-tagged error is returned.
pub fn run_pipeline(cfg: &PipelineConfig, out: &Path) -> Result<RunSummary> {
    cfg.validate().map_err(Error::at("config"))?;
    let digest = cfg.digest()?;
    let dir = out.join(format!("run-{}", &digest[..8]));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut w = RunWriter {
        dir: dir.clone(),
        outputs: Vec::new(),
    };
    let result = run_stages(cfg, &mut w);
    let manifest = RunManifest {
        config_sha256: digest,
        status: if result.is_ok() {
            "complete"
        } else {
            "partial"
        }
        .to_string(),
        failed_stage: result.as_ref().err().and_then(|e| match e {
            Error::Stage { stage, .. } => Some(stage.to_string()),
            _ => None,
        }),
        error: result.as_ref().err().map(|e| e.to_string()),
        outputs: w.outputs.clone(),
    };
    io::write_json(&dir.join("run_manifest.json"), &manifest)?;
    let (significance, detection) = result?;
    Ok(RunSummary {
        dir,
        significance,
        detection,
    })
}

type StageOutput = (SignificanceReport, BTreeMap<String, HoldoutReport>);

fn run_stages(cfg: &PipelineConfig, w: &mut RunWriter) -> Result<StageOutput> {
    w.json("config.json", cfg)?;
    let recordings = match &cfg.input {
        InputConfig::Synthetic(corpus) => corpus_scripts(corpus)
            .and_then(|scripts| scripts.iter().map(generate).collect::<Result<Vec<_>>>())
            .map_err(Error::at("synth"))?,
        InputConfig::Files(paths) => load_recordings(paths).map_err(Error::at("ingest"))?,
    };
    let mut analyses = Vec::with_capacity(recordings.len());
    for rec in &recordings {
        log::info!("analyzing {}", rec.subject_id);
        let a = analyze_recording(rec, &cfg.features).map_err(Error::at("features"))?;
        let features_rel = format!("features/{}.csv", rec.subject_id);
        io::write_feature_table(&w.dir.join(&features_rel), &a.features)?;
        w.record(&features_rel)?;
        let zscores_rel = format!("zscores/{}.csv", rec.subject_id);
        io::write_zscore_table(&w.dir.join(&zscores_rel), &a.zscores)?;
        w.record(&zscores_rel)?;
        analyses.push(a);
    }
    let sig = significance(&analyses);
    w.json("table3.json", &sig)?;
    for &f in &FeatureName::ALL {
        let h = heatmap(
            &analyses,
            &recordings,
            f,
            cfg.heatmap.before_s,
            cfg.heatmap.after_s,
            cfg.heatmap.bin_s,
        );
        w.text(&format!("heatmaps/{}.csv", f.as_str()), &heatmap_csv(&h))?;
    }
    let mut metrics = BTreeMap::new();
    for &n in &cfg.feature_sets {
        log::info!("holdout with {n} features");
        let features = FeatureName::set(n)?;
        let report = detection(&recordings, &analyses, features, &cfg.window, &cfg.holdout)
            .map_err(Error::at("detector"))?;
        metrics.insert(format!("LSTM{n}"), report);
    }
    w.json("metrics.json", &metrics)?;
    Ok((sig, metrics))
}
