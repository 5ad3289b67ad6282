//! Two-layer LSTM classifier with a logistic output head, forward pass and
//! backpropagation through time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden width of the second layer.
pub const LAYER2_HIDDEN: usize = 5;
/// Keep probability of the dropout applied to layer-1 outputs.
pub const DROPOUT_KEEP: f64 = 0.8;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Shape of one LSTM layer inside the flat parameter vector.
///
/// The layer's weights form one `4H × (H + In)` row-major matrix whose row
/// blocks are the forget, input, candidate and output gates, acting on the
/// concatenation `[h_prev, x]`; the `4H` biases follow in the same order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub input: usize,
    pub hidden: usize,
    pub offset: usize,
}

impl LayerShape {
    pub fn cols(&self) -> usize {
        self.hidden + self.input
    }

    pub fn weight_len(&self) -> usize {
        4 * self.hidden * self.cols()
    }

    pub fn len(&self) -> usize {
        self.weight_len() + 4 * self.hidden
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights<'a>(&self, theta: &'a [f64]) -> &'a [f64] {
        &theta[self.offset..self.offset + self.weight_len()]
    }

    pub fn biases<'a>(&self, theta: &'a [f64]) -> &'a [f64] {
        let b = self.offset + self.weight_len();
        &theta[b..b + 4 * self.hidden]
    }
}

/// All network parameters in one flat vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub n_features: usize,
    pub layer1: LayerShape,
    pub layer2: LayerShape,
    /// Offset of the output weights (`layer2.hidden` values, then the bias).
    pub head: usize,
    pub theta: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(n_features: usize, hidden1: usize, hidden2: usize) -> Self {
        let layer1 = LayerShape {
            input: n_features,
            hidden: hidden1,
            offset: 0,
        };
        let layer2 = LayerShape {
            input: hidden1,
            hidden: hidden2,
            offset: layer1.len(),
        };
        let head = layer2.offset + layer2.len();
        LstmParams {
            n_features,
            layer1,
            layer2,
            head,
            theta: vec![0.0; head + hidden2 + 1],
        }
    }

    /// Layer-1 width equal to the feature count, layer-2 width 5.
    pub fn for_features(n_features: usize) -> Self {
        Self::zeros(n_features, n_features, LAYER2_HIDDEN)
    }

    /// Uniform ±1/√fan_in weights, forget-gate biases 1, other biases 0.
    pub fn init<R: Rng>(n_features: usize, hidden1: usize, hidden2: usize, rng: &mut R) -> Self {
        let mut p = Self::zeros(n_features, hidden1, hidden2);
        for layer in [p.layer1, p.layer2] {
            let bound = 1.0 / (layer.cols() as f64).sqrt();
            let w = layer.offset;
            for v in &mut p.theta[w..w + layer.weight_len()] {
                *v = rng.random_range(-bound..bound);
            }
            let b = w + layer.weight_len();
            for v in &mut p.theta[b..b + layer.hidden] {
                *v = 1.0;
            }
        }
        let bound = 1.0 / (hidden2 as f64).sqrt();
        for v in &mut p.theta[p.head..p.head + hidden2] {
            *v = rng.random_range(-bound..bound);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let expected = Self::zeros(self.n_features, self.layer1.hidden, self.layer2.hidden);
        if expected.layer1 != self.layer1
            || expected.layer2 != self.layer2
            || expected.head != self.head
            || expected.theta.len() != self.theta.len()
        {
            return Err(Error::Validation(
                "inconsistent LSTM parameter shapes".into(),
            ));
        }
        if self.theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("LSTM parameters".into()));
        }
        Ok(())
    }

    fn head_weights(&self) -> &[f64] {
        &self.theta[self.head..self.head + self.layer2.hidden]
    }

    fn head_bias(&self) -> f64 {
        self.theta[self.head + self.layer2.hidden]
    }
}

/// Gate activations and states of one cell step.
#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

/// One LSTM step for `layer`:
/// `f, i, o = σ(W·[h_prev, x] + b)`, `c̃ = tanh(W·[h_prev, x] + b)`,
/// `c = f ⊙ c_prev + i ⊙ c̃`, `h = o ⊙ tanh(c)`.
pub fn lstm_cell(
    layer: &LayerShape,
    theta: &[f64],
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> CellState {
    let h = layer.hidden;
    let cols = layer.cols();
    let w = layer.weights(theta);
    let b = layer.biases(theta);
    let mut a = b.to_vec();
    for (r, ar) in a.iter_mut().enumerate() {
        let row = &w[r * cols..(r + 1) * cols];
        let mut s = 0.0;
        for (wv, hv) in row[..h].iter().zip(h_prev) {
            s += wv * hv;
        }
        for (wv, xv) in row[h..].iter().zip(x) {
            s += wv * xv;
        }
        *ar += s;
    }
    let f: Vec<f64> = a[..h].iter().map(|&v| sigmoid(v)).collect();
    let i: Vec<f64> = a[h..2 * h].iter().map(|&v| sigmoid(v)).collect();
    let g: Vec<f64> = a[2 * h..3 * h].iter().map(|&v| v.tanh()).collect();
    let o: Vec<f64> = a[3 * h..].iter().map(|&v| sigmoid(v)).collect();
    let c: Vec<f64> = (0..h).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
    let hv: Vec<f64> = (0..h).map(|k| o[k] * c[k].tanh()).collect();
    CellState {
        f,
        i,
        g,
        o,
        c,
        h: hv,
    }
}

/// Per-step dropout scaling of layer-1 outputs (`keep` or zero, divided by
/// the keep probability), `steps × hidden1`.
pub type DropoutMask = Vec<f64>;

pub fn sample_dropout_mask<R: Rng>(
    steps: usize,
    hidden: usize,
    keep: f64,
    rng: &mut R,
) -> DropoutMask {
    (0..steps * hidden)
        .map(|_| {
            if rng.random::<f64>() < keep {
                1.0 / keep
            } else {
                0.0
            }
        })
        .collect()
}

/// Cached activations of a full forward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    layer1: Vec<CellState>,
    layer2: Vec<CellState>,
    /// Dropped-out layer-1 outputs fed to layer 2.
    x2: Vec<Vec<f64>>,
    pub logit: f64,
    pub probability: f64,
}

fn run_layer(
    layer: &LayerShape,
    theta: &[f64],
    inputs: impl Iterator<Item = Vec<f64>>,
) -> (Vec<CellState>, Vec<Vec<f64>>) {
    let mut h = vec![0.0; layer.hidden];
    let mut c = vec![0.0; layer.hidden];
    let mut states = Vec::new();
    let mut xs = Vec::new();
    for x in inputs {
        let s = lstm_cell(layer, theta, &x, &h, &c);
        h.clone_from(&s.h);
        c.clone_from(&s.c);
        states.push(s);
        xs.push(x);
    }
    (states, xs)
}

/// Forward pass over a window (`steps × n_features`, step-major).
pub fn forward_trace(params: &LstmParams, window: &[f64], mask: Option<&[f64]>) -> Trace {
    let f = params.n_features;
    let steps = window.len() / f;
    let h1 = params.layer1.hidden;
    let (layer1, _) = run_layer(
        &params.layer1,
        &params.theta,
        (0..steps).map(|t| window[t * f..(t + 1) * f].to_vec()),
    );
    let x2: Vec<Vec<f64>> = layer1
        .iter()
        .enumerate()
        .map(|(t, s)| match mask {
            Some(m) => {
                s.h.iter()
                    .zip(&m[t * h1..(t + 1) * h1])
                    .map(|(h, k)| h * k)
                    .collect()
            }
            None => s.h.clone(),
        })
        .collect();
    let (layer2, x2) = run_layer(&params.layer2, &params.theta, x2.into_iter());
    let last = layer2
        .last()
        .map(|s| s.h.clone())
        .unwrap_or_else(|| vec![0.0; params.layer2.hidden]);
    let logit = params.head_bias()
        + params
            .head_weights()
            .iter()
            .zip(&last)
            .map(|(w, h)| w * h)
            .sum::<f64>();
    Trace {
        layer1,
        layer2,
        x2,
        logit,
        probability: sigmoid(logit),
    }
}

/// Seizure probability of a window; `mask` applies training-time dropout.
pub fn forward(params: &LstmParams, window: &[f64], mask: Option<&[f64]>) -> f64 {
    forward_trace(params, window, mask).probability
}

/// Evaluation-mode probability that rejects non-finite input.
pub fn predict(params: &LstmParams, window: &[f64]) -> Result<f64> {
    if window.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("detector input window".into()));
    }
    if !window.len().is_multiple_of(params.n_features) {
        return Err(Error::Validation(format!(
            "window of {} values is not a multiple of {} features",
            window.len(),
            params.n_features
        )));
    }
    Ok(forward(params, window, None))
}

/// Weighted binary cross-entropy from a logit: `w·(softplus(s) − y·s)`.
pub fn weighted_bce(logit: f64, label: bool, weight: f64) -> f64 {
    let softplus = if logit > 0.0 {
        logit + (-logit).exp().ln_1p()
    } else {
        logit.exp().ln_1p()
    };
    weight * (softplus - if label { logit } else { 0.0 })
}

/// Backward pass through one layer. `dh_ext[t]` is the loss gradient reaching
/// `h_t` from above; returns the gradients with respect to the inputs.
fn backward_layer(
    layer: &LayerShape,
    theta: &[f64],
    states: &[CellState],
    inputs: &[Vec<f64>],
    dh_ext: &[Vec<f64>],
    grad: &mut [f64],
) -> Vec<Vec<f64>> {
    let h = layer.hidden;
    let cols = layer.cols();
    let w = layer.weights(theta);
    let (gw_start, gb_start) = (layer.offset, layer.offset + layer.weight_len());
    let steps = states.len();
    let mut dx = vec![vec![0.0; layer.input]; steps];
    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];
    let zeros = vec![0.0; h];
    let mut da = vec![0.0; 4 * h];
    for t in (0..steps).rev() {
        let s = &states[t];
        let (h_prev, c_prev) = if t > 0 {
            (&states[t - 1].h, &states[t - 1].c)
        } else {
            (&zeros, &zeros)
        };
        for k in 0..h {
            let dh = dh_ext[t][k] + dh_next[k];
            let tc = s.c[k].tanh();
            let dc = dc_next[k] + dh * s.o[k] * (1.0 - tc * tc);
            da[k] = dc * c_prev[k] * s.f[k] * (1.0 - s.f[k]);
            da[h + k] = dc * s.g[k] * s.i[k] * (1.0 - s.i[k]);
            da[2 * h + k] = dc * s.i[k] * (1.0 - s.g[k] * s.g[k]);
            da[3 * h + k] = dh * tc * s.o[k] * (1.0 - s.o[k]);
            dc_next[k] = dc * s.f[k];
        }
        dh_next.iter_mut().for_each(|v| *v = 0.0);
        let x = &inputs[t];
        for (r, &dar) in da.iter().enumerate() {
            if dar == 0.0 {
                continue;
            }
            grad[gb_start + r] += dar;
            let row_w = &w[r * cols..(r + 1) * cols];
            let row_g = &mut grad[gw_start + r * cols..gw_start + (r + 1) * cols];
            for k in 0..h {
                row_g[k] += dar * h_prev[k];
                dh_next[k] += dar * row_w[k];
            }
            for (k, &xv) in x.iter().enumerate() {
                row_g[h + k] += dar * xv;
                dx[t][k] += dar * row_w[h + k];
            }
        }
    }
    dx
}

/// Adds `d(weighted BCE)/dθ` for one window to `grad`; returns the loss.
pub fn accumulate_gradient(
    params: &LstmParams,
    window: &[f64],
    label: bool,
    weight: f64,
    mask: Option<&[f64]>,
    grad: &mut [f64],
) -> f64 {
    let f = params.n_features;
    let steps = window.len() / f;
    let trace = forward_trace(params, window, mask);
    let loss = weighted_bce(trace.logit, label, weight);
    let dlogit = weight * (trace.probability - if label { 1.0 } else { 0.0 });
    let h2 = params.layer2.hidden;
    let last = trace
        .layer2
        .last()
        .map(|s| s.h.clone())
        .unwrap_or_else(|| vec![0.0; h2]);
    for k in 0..h2 {
        grad[params.head + k] += dlogit * last[k];
    }
    grad[params.head + h2] += dlogit;

    let mut dh2 = vec![vec![0.0; h2]; steps];
    if let Some(d) = dh2.last_mut() {
        for (k, v) in d.iter_mut().enumerate() {
            *v = dlogit * params.head_weights()[k];
        }
    }
    let dx2 = backward_layer(
        &params.layer2,
        &params.theta,
        &trace.layer2,
        &trace.x2,
        &dh2,
        grad,
    );
    let h1 = params.layer1.hidden;
    let dh1: Vec<Vec<f64>> = dx2
        .into_iter()
        .enumerate()
        .map(|(t, d)| match mask {
            Some(m) => d
                .iter()
                .zip(&m[t * h1..(t + 1) * h1])
                .map(|(a, k)| a * k)
                .collect(),
            None => d,
        })
        .collect();
    let inputs: Vec<Vec<f64>> = (0..steps)
        .map(|t| window[t * f..(t + 1) * f].to_vec())
        .collect();
    backward_layer(
        &params.layer1,
        &params.theta,
        &trace.layer1,
        &inputs,
        &dh1,
        grad,
    );
    loss
}
