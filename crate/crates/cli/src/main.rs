use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ictal_ppg::detector::train::predict_all;
use ictal_ppg::detector::{alarms, evaluate, make_windows, train, DetectorConfig, WindowedDataset};
use ictal_ppg::error::{Error, Result};
use ictal_ppg::features::{extract_features, FeatureConfig, FeatureName};
use ictal_ppg::io::{self, ModelFile, PulseFile};
use ictal_ppg::pipeline::{run_pipeline, table_baseline_mask, PipelineConfig, RecordingPaths};
use ictal_ppg::pulse::{detect_rpeaks, segment_series};
use ictal_ppg::stats::{aggregate_table, screen_recording, zscore_table};
use ictal_ppg::sync::{detect_stamps, fit_clock, StampSource};
use ictal_ppg::synth::{corpus_scripts, generate, CorpusConfig, PhysioScript};
use ictal_ppg::types::Recording;

#[derive(Parser)]
#[command(
    name = "ictal-ppg",
    version,
    about = "Seizure-related PPG analysis and detection"
)]
struct Cli {
    /// Log more (repeat for trace output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic recordings from a script (or a corpus config).
    Synth {
        script: PathBuf,
        /// Treat the input as a corpus configuration.
        #[arg(long)]
        corpus: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the device-to-EEG clock model from two stamp sessions.
    Sync {
        /// Device optical channel containing the stamp bursts.
        #[arg(long)]
        device: PathBuf,
        /// EEG analog channel containing the stamp bursts.
        #[arg(long)]
        eeg: PathBuf,
        #[arg(long, value_parser = parse_pair)]
        stamp_window_start: (f64, f64),
        #[arg(long, value_parser = parse_pair)]
        stamp_window_end: (f64, f64),
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        device_rate: Option<f64>,
        #[arg(long)]
        eeg_rate: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect troughs and segment a PPG channel into pulses.
    Segment {
        input: PathBuf,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-pulse feature table from segmented pulses.
    Features {
        pulses: PathBuf,
        #[arg(long)]
        ecg: Option<PathBuf>,
        #[arg(long)]
        ecg_rate: Option<f64>,
        /// Seizure annotations, used to pick the PCA baseline.
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Previous-segment z-scores of a feature table.
    Zscore {
        features: PathBuf,
        /// Start of the recording; segments are counted from here.
        #[arg(long, default_value_t = 0.0)]
        origin: f64,
        #[arg(long, default_value_t = 300.0)]
        segment_length: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Baseline versus post-onset significance screening.
    Screen {
        zscores: PathBuf,
        annotations: PathBuf,
        #[arg(long, default_value = "subject")]
        subject: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a detector on z-score tables.
    Train {
        #[arg(long, value_parser = parse_feature_count)]
        features: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        /// z-score table; repeat once per recording.
        #[arg(long, required = true)]
        zscores: Vec<PathBuf>,
        /// Annotations matching each --zscores, in the same order.
        #[arg(long, required = true)]
        annotations: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a trained detector to a test span and score its alarms.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// z-score table of the test span.
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        /// Span length in hours; defaults to the table's time extent.
        #[arg(long)]
        hours: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole pipeline from a configuration file.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or("expected two comma-separated numbers")?;
    let a: f64 = a
        .trim()
        .parse()
        .map_err(|_| format!("'{a}' is not a number"))?;
    let b: f64 = b
        .trim()
        .parse()
        .map_err(|_| format!("'{b}' is not a number"))?;
    if !(b > a) {
        return Err("window end must follow its start".into());
    }
    Ok((a, b))
}

fn parse_feature_count(s: &str) -> std::result::Result<usize, String> {
    match s {
        "7" => Ok(7),
        "12" => Ok(12),
        _ => Err("feature set must be 7 or 12".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            script,
            corpus,
            out,
        } => synth(&script, corpus, &out),
        Command::Sync {
            device,
            eeg,
            stamp_window_start,
            stamp_window_end,
            threshold,
            device_rate,
            eeg_rate,
            out,
        } => {
            let dev = io::read_series(&device, "device", device_rate)?;
            let analog = io::read_series(&eeg, "eeg", eeg_rate)?;
            let session = |(a, b): (f64, f64)| -> Result<_> {
                Ok((
                    detect_stamps(&dev.window(a, b), threshold, StampSource::Optical)?,
                    detect_stamps(&analog.window(a, b), threshold, StampSource::Analog)?,
                ))
            };
            let start = session(stamp_window_start)?;
            let end = session(stamp_window_end)?;
            let fit = fit_clock((&start.0, &start.1), (&end.0, &end.1))?;
            log::info!(
                "offset {:.4} s, drift {:e}, residual {:.4} s",
                fit.offset,
                fit.drift,
                fit.residual_s
            );
            io::write_json(&out, &fit)
        }
        Command::Segment { input, rate, out } => {
            let ppg = io::read_series(&input, "ppg", rate)?;
            let pulses = segment_series(&ppg);
            log::info!(
                "{} pulses, {} clean",
                pulses.len(),
                pulses.iter().filter(|p| p.clean).count()
            );
            io::write_json(
                &out,
                &PulseFile {
                    start_time: ppg.start_time,
                    sample_rate: ppg.sample_rate,
                    pulses,
                },
            )
        }
        Command::Features {
            pulses,
            ecg,
            ecg_rate,
            annotations,
            config,
            out,
        } => {
            let file: PulseFile = io::read_json(&pulses)?;
            let cfg: FeatureConfig = match config {
                Some(p) => io::read_json(&p)?,
                None => FeatureConfig::default(),
            };
            let rpeaks = ecg
                .map(|p| io::read_series(&p, "ecg", ecg_rate))
                .transpose()?
                .map(|s| detect_rpeaks(&s));
            let annotations = annotations
                .map(|p| io::read_annotations(&p))
                .transpose()?
                .unwrap_or_default();
            let ex = extract_features(
                &file.pulses,
                rpeaks.as_ref(),
                &annotations,
                file.start_time,
                &cfg,
            )?;
            io::write_feature_table(&out, &ex.table)
        }
        Command::Zscore {
            features,
            origin,
            segment_length,
            out,
        } => {
            if !(segment_length > 0.0) {
                return Err(Error::Validation("segment length must be positive".into()));
            }
            let table = io::read_feature_table(&features, origin)?;
            io::write_zscore_table(&out, &zscore_table(&table, segment_length))
        }
        Command::Screen {
            zscores,
            annotations,
            subject,
            out,
        } => {
            let z = io::read_zscore_table(&zscores, 0.0)?;
            let annotations = io::read_annotations(&annotations)?;
            let mask = table_baseline_mask(&z, &annotations);
            let reports = screen_recording(&subject, &z, &annotations, &mask);
            io::write_json(&out, &aggregate_table(&reports))
        }
        Command::Train {
            features,
            config,
            zscores,
            annotations,
            out,
        } => {
            if zscores.len() != annotations.len() {
                return Err(Error::Validation(
                    "give one --annotations file per --zscores table".into(),
                ));
            }
            let cfg: DetectorConfig = match config {
                Some(p) => io::read_json(&p)?,
                None => DetectorConfig::default(),
            };
            let names = FeatureName::set(features)?;
            let mut data = WindowedDataset::empty(names.len(), cfg.window.length);
            for (z, a) in zscores.iter().zip(&annotations) {
                let table = io::read_zscore_table(z, 0.0)?;
                let ann = io::read_annotations(a)?;
                let w = make_windows(&table, names, &ann, &cfg.window)?;
                for i in 0..w.len() {
                    data.push(
                        w.windows[i].clone(),
                        w.labels[i],
                        w.start_times[i],
                        w.window_times[i],
                        w.end_times[i],
                    );
                }
            }
            log::info!("{} windows, {} ictal", data.len(), data.n_positive());
            let (params, report) = train(&data, &cfg.train)?;
            log::info!(
                "best epoch {} of {}",
                report.best_epoch + 1,
                report.train_loss.len()
            );
            io::write_json(
                &out,
                &ModelFile::new(&params, names, &cfg.window, &cfg.alarm),
            )
        }
        Command::Eval {
            model,
            test,
            annotations,
            hours,
            out,
        } => {
            let model: ModelFile = io::read_json(&model)?;
            let params = model.params()?;
            let table = io::read_zscore_table(&test, 0.0)?;
            let ann = io::read_annotations(&annotations)?;
            let data = make_windows(&table, &model.features, &ann, &model.window)?;
            let probs = predict_all(&params, &data);
            let alarm_times = alarms(&data.window_times, &probs, &model.alarm);
            let hours = hours.unwrap_or_else(|| match (table.times.first(), table.ends.last()) {
                (Some(a), Some(b)) => (b - a) / 3600.0,
                _ => 0.0,
            });
            let metrics = evaluate(&alarm_times, &ann, hours);
            log::info!(
                "{} alarms, tp {} fp {} fn {}",
                alarm_times.len(),
                metrics.tp,
                metrics.fp,
                metrics.fn_
            );
            io::write_json(&out, &metrics)
        }
        Command::Run(args) => {
            let cfg: PipelineConfig = match &args.config {
                Some(p) => io::read_json(p)?,
                None => PipelineConfig::default(),
            };
            let summary = run_pipeline(&cfg, &args.out)?;
            println!("{}", summary.dir.display());
            Ok(())
        }
    }
}

fn write_recording(rec: &Recording, dir: &Path) -> Result<RecordingPaths> {
    let ppg = dir.join("ppg.csv");
    io::write_series(&ppg, &rec.ppg)?;
    let ecg = match &rec.ecg {
        Some(s) => {
            let p = dir.join("ecg.csv");
            io::write_series(&p, s)?;
            Some(p)
        }
        None => None,
    };
    let annotations = dir.join("annotations.json");
    io::write_json(&annotations, &rec.annotations)?;
    Ok(RecordingPaths {
        subject_id: rec.subject_id.clone(),
        ppg,
        ecg,
        annotations,
        ppg_rate: None,
        ecg_rate: None,
    })
}

fn synth(script: &Path, corpus: bool, out: &Path) -> Result<()> {
    if corpus {
        let cfg: CorpusConfig = io::read_json(script)?;
        let mut listing = Vec::new();
        for s in corpus_scripts(&cfg)? {
            let dir = out.join(&s.subject_id);
            log::info!("generating {}", s.subject_id);
            listing.push(write_recording(&generate(&s)?, &dir)?);
            io::write_json(&dir.join("script.json"), &s)?;
        }
        io::write_json(&out.join("recordings.json"), &listing)
    } else {
        let s: PhysioScript = io::read_json(script)?;
        write_recording(&generate(&s)?, out).map(|_| ())
    }
}
