//! File formats: channel CSVs, annotation and pulse JSON, feature and
//! z-score tables, model files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::detector::{AlarmConfig, LstmParams, WindowConfig};
use crate::error::{Error, Result};
use crate::features::{FeatureName, FeatureTable};
use crate::pulse::Pulse;
use crate::stats::ZScoreTable;
use crate::types::{validate_annotations, SampleSeries, SeizureAnnotation};

/// Relative tolerance on sample spacing for timestamped CSVs.
const SPACING_TOLERANCE: f64 = 1e-3;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(|e| Error::parse(path, e.to_string()))
}

fn csv_reader(path: &Path, has_headers: bool) -> Result<csv::Reader<BufReader<File>>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .trim(csv::Trim::All)
        .from_reader(open(path)?))
}

fn parse_f64(path: &Path, line: u64, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::parse(path, format!("line {line}: '{s}' is not a number")))
}

/// Reads one channel. A `t,value` header means timestamped rows whose
/// spacing must be uniform; without a header every row holds one value and
/// `rate` must be given.
pub fn read_series(path: &Path, channel: &str, rate: Option<f64>) -> Result<SampleSeries> {
    let mut first_line = String::new();
    std::io::BufRead::read_line(&mut open(path)?, &mut first_line)
        .map_err(|e| Error::io(path, e))?;
    let header = first_line.trim().to_ascii_lowercase().replace(' ', "");
    if header == "t,value" {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (k, rec) in csv_reader(path, true)?.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
            let line = k as u64 + 2;
            if rec.len() != 2 {
                return Err(Error::parse(
                    path,
                    format!("line {line}: expected 2 fields"),
                ));
            }
            times.push(parse_f64(path, line, &rec[0])?);
            values.push(parse_f64(path, line, &rec[1])?);
        }
        if times.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "{}: fewer than 2 samples",
                path.display()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(format!(
                "{}: timestamps are not increasing",
                path.display()
            )));
        }
        let span = times[times.len() - 1] - times[0];
        let dt = span / (times.len() - 1) as f64;
        let uneven = times
            .windows(2)
            .any(|w| ((w[1] - w[0]) - dt).abs() > SPACING_TOLERANCE * dt);
        if uneven {
            return Err(Error::Validation(format!(
                "{}: samples are not evenly spaced",
                path.display()
            )));
        }
        SampleSeries::new(channel, rate.unwrap_or(1.0 / dt), times[0], values)
    } else {
        let Some(rate) = rate else {
            return Err(Error::Validation(format!(
                "{}: headerless CSV needs a sample rate",
                path.display()
            )));
        };
        let mut values = Vec::new();
        for (k, rec) in csv_reader(path, false)?.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
            let line = k as u64 + 1;
            let field = rec.get(rec.len().saturating_sub(1)).unwrap_or("");
            values.push(parse_f64(path, line, field)?);
        }
        SampleSeries::new(channel, rate, 0.0, values)
    }
}

pub fn write_series(path: &Path, series: &SampleSeries) -> Result<()> {
    let mut w = create(path)?;
    let mut body = String::from("t,value\n");
    for (i, v) in series.samples.iter().enumerate() {
        body.push_str(&format!(
            "{},{}\n",
            series.start_time + i as f64 / series.sample_rate,
            v
        ));
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_annotations(path: &Path) -> Result<Vec<SeizureAnnotation>> {
    let annotations: Vec<SeizureAnnotation> = read_json(path)?;
    validate_annotations(&annotations)?;
    Ok(annotations)
}

/// Contents of pulses.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseFile {
    /// Start of the PPG series, used as the segment-grid origin.
    pub start_time: f64,
    pub sample_rate: f64,
    pub pulses: Vec<Pulse>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn table_header() -> Vec<&'static str> {
    let mut h = vec!["pulse_time"];
    h.extend(FeatureName::ALL.iter().map(|f| f.as_str()));
    h.push("pulse_end");
    h
}

fn write_table(
    path: &Path,
    times: &[f64],
    ends: &[f64],
    columns: &[Vec<Option<f64>>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let io_err = |e: csv::Error| Error::parse(path, e.to_string());
    w.write_record(table_header()).map_err(io_err)?;
    for i in 0..times.len() {
        let mut row = vec![times[i].to_string()];
        row.extend(columns.iter().map(|c| cell(c[i])));
        row.push(ends[i].to_string());
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

type RawTable = (Vec<f64>, Vec<f64>, Vec<Vec<Option<f64>>>);

fn read_table(path: &Path) -> Result<RawTable> {
    let mut r = csv_reader(path, true)?;
    let headers = r
        .headers()
        .map_err(|e| Error::parse(path, e.to_string()))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, format!("missing column '{name}'")))
    };
    let t_col = find("pulse_time")?;
    let end_col = find("pulse_end")?;
    let feature_cols = FeatureName::ALL
        .iter()
        .map(|f| find(f.as_str()))
        .collect::<Result<Vec<_>>>()?;
    let mut times = Vec::new();
    let mut ends = Vec::new();
    let mut columns = vec![Vec::new(); FeatureName::ALL.len()];
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
        let line = k as u64 + 2;
        times.push(parse_f64(path, line, &rec[t_col])?);
        ends.push(parse_f64(path, line, &rec[end_col])?);
        for (col, &j) in columns.iter_mut().zip(&feature_cols) {
            let s = &rec[j];
            col.push(if s.is_empty() {
                None
            } else {
                Some(parse_f64(path, line, s)?)
            });
        }
    }
    Ok((times, ends, columns))
}

/// features.csv: `pulse_time`, the twelve features, `pulse_end`; an empty
/// cell is an undefined value.
pub fn write_feature_table(path: &Path, table: &FeatureTable) -> Result<()> {
    write_table(path, &table.times, &table.ends, &table.columns)
}

pub fn read_feature_table(path: &Path, origin: f64) -> Result<FeatureTable> {
    let (times, ends, columns) = read_table(path)?;
    Ok(FeatureTable {
        origin,
        times,
        ends,
        columns,
    })
}

/// zscores.csv, laid out like features.csv.
pub fn write_zscore_table(path: &Path, table: &ZScoreTable) -> Result<()> {
    write_table(path, &table.times, &table.ends, &table.columns)
}

pub fn read_zscore_table(path: &Path, origin: f64) -> Result<ZScoreTable> {
    let (times, ends, columns) = read_table(path)?;
    Ok(ZScoreTable {
        origin,
        times,
        ends,
        columns,
    })
}

/// Row-major matrix with its shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

/// One LSTM layer with its gate blocks spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct LayerFile {
    pub input: usize,
    pub hidden: usize,
    /// Each weight matrix acts on the concatenation `[h_prev, x]`.
    pub W_f: Matrix,
    pub W_i: Matrix,
    pub W_c: Matrix,
    pub W_o: Matrix,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_c: Vec<f64>,
    pub b_o: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub weights: Matrix,
    pub bias: f64,
}

/// model.json: network weights plus the settings needed to apply it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub features: Vec<FeatureName>,
    pub window: WindowConfig,
    pub alarm: AlarmConfig,
    pub layer1: LayerFile,
    pub layer2: LayerFile,
    pub output: OutputFile,
}

impl ModelFile {
    pub fn new(
        params: &LstmParams,
        features: &[FeatureName],
        window: &WindowConfig,
        alarm: &AlarmConfig,
    ) -> Self {
        let layer = |shape: crate::detector::lstm::LayerShape| {
            let cols = shape.cols();
            let h = shape.hidden;
            let w = shape.weights(&params.theta);
            let b = shape.biases(&params.theta);
            let block = |g: usize| Matrix {
                shape: [h, cols],
                data: w[g * h * cols..(g + 1) * h * cols].to_vec(),
            };
            LayerFile {
                input: shape.input,
                hidden: h,
                W_f: block(0),
                W_i: block(1),
                W_c: block(2),
                W_o: block(3),
                b_f: b[..h].to_vec(),
                b_i: b[h..2 * h].to_vec(),
                b_c: b[2 * h..3 * h].to_vec(),
                b_o: b[3 * h..].to_vec(),
            }
        };
        let h2 = params.layer2.hidden;
        ModelFile {
            features: features.to_vec(),
            window: window.clone(),
            alarm: alarm.clone(),
            layer1: layer(params.layer1),
            layer2: layer(params.layer2),
            output: OutputFile {
                weights: Matrix {
                    shape: [1, h2],
                    data: params.theta[params.head..params.head + h2].to_vec(),
                },
                bias: params.theta[params.head + h2],
            },
        }
    }

    pub fn params(&self) -> Result<LstmParams> {
        if self.layer1.input != self.features.len() || self.layer2.input != self.layer1.hidden {
            return Err(Error::Validation("model layer sizes do not chain".into()));
        }
        let mut p = LstmParams::zeros(self.layer1.input, self.layer1.hidden, self.layer2.hidden);
        for (file, shape) in [(&self.layer1, p.layer1), (&self.layer2, p.layer2)] {
            let cols = shape.cols();
            let h = shape.hidden;
            let mut at = shape.offset;
            for m in [&file.W_f, &file.W_i, &file.W_c, &file.W_o] {
                if m.shape != [h, cols] || m.data.len() != h * cols {
                    return Err(Error::Validation(format!(
                        "weight matrix must be {h}x{cols}"
                    )));
                }
                p.theta[at..at + h * cols].copy_from_slice(&m.data);
                at += h * cols;
            }
            for b in [&file.b_f, &file.b_i, &file.b_c, &file.b_o] {
                if b.len() != h {
                    return Err(Error::Validation(format!(
                        "bias vectors must have {h} entries"
                    )));
                }
                p.theta[at..at + h].copy_from_slice(b);
                at += h;
            }
        }
        let h2 = p.layer2.hidden;
        if self.output.weights.data.len() != h2 {
            return Err(Error::Validation(format!(
                "output weights must have {h2} entries"
            )));
        }
        let head = p.head;
        p.theta[head..head + h2].copy_from_slice(&self.output.weights.data);
        p.theta[head + h2] = self.output.bias;
        p.validate()?;
        Ok(p)
    }
}
