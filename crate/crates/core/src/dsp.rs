//! Small signal-processing helpers shared by segmentation and features.

use std::collections::VecDeque;

/// Centered moving average; windows are truncated at the edges.
pub fn moving_average(x: &[f64], window: usize) -> Vec<f64> {
    let n = x.len();
    if n == 0 || window <= 1 {
        return x.to_vec();
    }
    let half = window / 2;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in x {
        acc += v;
        prefix.push(acc);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + window - half).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Centered sliding `max - min` over `window` samples (truncated at edges).
pub fn sliding_range(x: &[f64], window: usize) -> Vec<f64> {
    let n = x.len();
    let half = window / 2;
    let mut out = vec![0.0; n];
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for (i, slot) in out.iter_mut().enumerate() {
        let hi = (i + half + 1).min(n);
        while next < hi {
            while maxq.back().is_some_and(|&j| x[j] <= x[next]) {
                maxq.pop_back();
            }
            maxq.push_back(next);
            while minq.back().is_some_and(|&j| x[j] >= x[next]) {
                minq.pop_back();
            }
            minq.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(half);
        while maxq.front().is_some_and(|&j| j < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < lo) {
            minq.pop_front();
        }
        *slot = x[maxq[0]] - x[minq[0]];
    }
    out
}

/// Vertex of the least-squares parabola through `y` sampled at
/// `-h..=h` (so `y.len() == 2h + 1`), as an offset from the center sample.
///
/// Returns `None` when the fit is not convex/concave as requested.
pub fn quadratic_vertex(y: &[f64], want_minimum: bool) -> Option<f64> {
    let n = y.len();
    if n < 3 || n.is_multiple_of(2) {
        return None;
    }
    let h = (n / 2) as f64;
    let xs = || (0..n).map(|i| i as f64 - h);
    let m2 = xs().map(|x| x * x).sum::<f64>() / n as f64;
    let (mut s1, mut s11, mut s2, mut s22) = (0.0, 0.0, 0.0, 0.0);
    for (x, &v) in xs().zip(y) {
        s1 += x * v;
        s11 += x * x;
        let q = x * x - m2;
        s2 += q * v;
        s22 += q * q;
    }
    let b1 = s1 / s11;
    let b2 = s2 / s22;
    if (want_minimum && b2 <= 0.0) || (!want_minimum && b2 >= 0.0) {
        return None;
    }
    let v = -b1 / (2.0 * b2);
    v.is_finite().then_some(v)
}

/// Three-point parabolic interpolation around index `i`; returns the
/// sub-sample offset in `[-0.5, 0.5]`.
pub fn parabolic_offset(y: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= y.len() {
        return 0.0;
    }
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom.abs() < f64::EPSILON * (a.abs() + b.abs() + c.abs()).max(1e-300) {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

/// Linear resampling of `x` onto `n` equally spaced points spanning the
/// first to the last sample.
pub fn resample_linear(x: &[f64], n: usize) -> Vec<f64> {
    match (x.len(), n) {
        (_, 0) => Vec::new(),
        (0, _) => vec![0.0; n],
        (1, _) => vec![x[0]; n],
        (len, 1) => vec![x[len / 2]],
        (len, _) => {
            let scale = (len - 1) as f64 / (n - 1) as f64;
            (0..n)
                .map(|j| {
                    let pos = j as f64 * scale;
                    let k = (pos.floor() as usize).min(len - 2);
                    let frac = pos - k as f64;
                    x[k] + frac * (x[k + 1] - x[k])
                })
                .collect()
        }
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population standard deviation.
pub fn pop_std(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}
