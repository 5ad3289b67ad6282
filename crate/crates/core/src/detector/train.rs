//! Class-weighted training with Adam and early stopping.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::WindowedDataset;
use super::lstm::{
    accumulate_gradient, forward_trace, sample_dropout_mask, weighted_bce, LstmParams,
    DROPOUT_KEEP, LAYER2_HIDDEN,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    pub seed: u64,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    /// Share of training windows held out for early stopping.
    pub validation_fraction: f64,
    /// Share of negative windows visited per epoch (a fresh random draw each
    /// epoch, reweighted so the expected loss is unchanged).
    pub negative_fraction: f64,
    pub dropout_keep: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch: 32,
            lr: 1e-3,
            seed: 0,
            patience: 10,
            validation_fraction: 0.1,
            negative_fraction: 0.1,
            dropout_keep: DROPOUT_KEEP,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch == 0 {
            return Err(Error::Validation(
                "epochs and batch must be positive".into(),
            ));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Validation("learning rate must be positive".into()));
        }
        if !(0.0..0.9).contains(&self.validation_fraction) {
            return Err(Error::Validation(
                "validation_fraction must lie in [0, 0.9)".into(),
            ));
        }
        if !(self.negative_fraction > 0.0 && self.negative_fraction <= 1.0) {
            return Err(Error::Validation(
                "negative_fraction must lie in (0, 1]".into(),
            ));
        }
        if !(self.dropout_keep > 0.0 && self.dropout_keep <= 1.0) {
            return Err(Error::Validation("dropout_keep must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Adam with the usual bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, theta: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for k in 0..theta.len() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * grad[k];
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * grad[k] * grad[k];
            let mh = self.m[k] / c1;
            let vh = self.v[k] / c2;
            theta[k] -= self.lr * mh / (vh.sqrt() + self.eps);
        }
    }
}

/// `N / (2·N_c)` for the negative and positive class.
pub fn class_weights(labels: &[bool]) -> (f64, f64) {
    let n = labels.len() as f64;
    let pos = labels.iter().filter(|&&l| l).count() as f64;
    let neg = n - pos;
    (n / (2.0 * neg), n / (2.0 * pos))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
    pub best_epoch: usize,
}

/// Mean class-weighted loss in evaluation mode.
pub fn mean_loss(
    params: &LstmParams,
    data: &WindowedDataset,
    idx: &[usize],
    weights: (f64, f64),
) -> f64 {
    if idx.is_empty() {
        return f64::NAN;
    }
    idx.iter()
        .map(|&i| {
            let w = if data.labels[i] { weights.1 } else { weights.0 };
            weighted_bce(
                forward_trace(params, &data.windows[i], None).logit,
                data.labels[i],
                w,
            )
        })
        .sum::<f64>()
        / idx.len() as f64
}

/// Trains a fresh network (layer-1 width = feature count, layer-2 width 5).
pub fn train(data: &WindowedDataset, cfg: &TrainConfig) -> Result<(LstmParams, TrainReport)> {
    cfg.validate()?;
    let n_pos = data.n_positive();
    if data.is_empty() || n_pos == 0 {
        return Err(Error::SingleClass("no ictal windows"));
    }
    if n_pos == data.len() {
        return Err(Error::SingleClass("no interictal windows"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = data.n_features;
    let mut params = LstmParams::init(f, f, LAYER2_HIDDEN, &mut rng);

    // Stratified validation split.
    let mut pos: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i]).collect();
    let mut neg: Vec<usize> = (0..data.len()).filter(|&i| !data.labels[i]).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let n_val_pos =
        ((pos.len() as f64 * cfg.validation_fraction).round() as usize).min(pos.len() - 1);
    let n_val_neg =
        ((neg.len() as f64 * cfg.validation_fraction).round() as usize).min(neg.len() - 1);
    let val: Vec<usize> = pos[..n_val_pos]
        .iter()
        .chain(&neg[..n_val_neg])
        .copied()
        .collect();
    let train_pos = pos[n_val_pos..].to_vec();
    let train_neg = neg[n_val_neg..].to_vec();

    let train_labels: Vec<bool> = train_pos
        .iter()
        .chain(&train_neg)
        .map(|&i| data.labels[i])
        .collect();
    let weights = class_weights(&train_labels);
    let neg_weight = weights.0 / cfg.negative_fraction;

    let steps = data.length;
    let h1 = params.layer1.hidden;
    let mut adam = Adam::new(params.len(), cfg.lr);
    let mut grad = vec![0.0; params.len()];
    let mut report = TrainReport {
        train_loss: Vec::new(),
        validation_loss: Vec::new(),
        best_epoch: 0,
    };
    let mut best = (f64::INFINITY, params.clone());
    let mut since_best = 0;
    for epoch in 0..cfg.epochs {
        let mut order = train_pos.clone();
        if cfg.negative_fraction < 1.0 {
            let take = ((train_neg.len() as f64 * cfg.negative_fraction).ceil() as usize).max(1);
            order.extend(train_neg.choose_multiple(&mut rng, take));
        } else {
            order.extend_from_slice(&train_neg);
        }
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let w = if data.labels[i] {
                    weights.1
                } else {
                    neg_weight
                };
                let mask = (cfg.dropout_keep < 1.0)
                    .then(|| sample_dropout_mask(steps, h1, cfg.dropout_keep, &mut rng));
                epoch_loss += accumulate_gradient(
                    &params,
                    &data.windows[i],
                    data.labels[i],
                    w,
                    mask.as_deref(),
                    &mut grad,
                );
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam.step(&mut params.theta, &grad);
        }
        if params.theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "parameters diverged in epoch {epoch}"
            )));
        }
        report.train_loss.push(epoch_loss / order.len() as f64);
        let val_loss = if val.is_empty() {
            report.train_loss[epoch]
        } else {
            mean_loss(&params, data, &val, weights)
        };
        report.validation_loss.push(val_loss);
        log::debug!(
            "epoch {epoch}: train {:.4} validation {val_loss:.4}",
            report.train_loss[epoch]
        );
        if val_loss < best.0 {
            best = (val_loss, params.clone());
            report.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }
    Ok((best.1, report))
}

/// Evaluation-mode probabilities for every window.
pub fn predict_all(params: &LstmParams, data: &WindowedDataset) -> Vec<f64> {
    data.windows
        .iter()
        .map(|w| forward_trace(params, w, None).probability)
        .collect()
}
