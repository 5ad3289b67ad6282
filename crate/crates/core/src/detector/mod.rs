//! Windowed two-layer LSTM seizure detector.

pub mod alarm;
pub mod dataset;
pub mod holdout;
pub mod lstm;
pub mod train;

pub use alarm::{alarms, evaluate, AlarmConfig, EvalMetrics};
pub use dataset::{make_windows, WindowConfig, WindowedDataset};
pub use holdout::{holdout_protocol, HoldoutConfig, HoldoutRecording, HoldoutReport};
pub use lstm::{forward, lstm_cell, LstmParams};
pub use train::{predict_all, train, TrainConfig, TrainReport};

use serde::{Deserialize, Serialize};

/// Settings for training a single model (the `train` configuration file).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub window: WindowConfig,
    pub train: TrainConfig,
    pub alarm: AlarmConfig,
}
