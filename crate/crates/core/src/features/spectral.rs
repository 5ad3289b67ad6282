//! Frequency-domain rate variability from unevenly spaced beats.

use std::f64::consts::PI;

pub const GRID_START_HZ: f64 = 0.0033;
pub const GRID_STEP_HZ: f64 = 0.005;
pub const GRID_END_HZ: f64 = 0.4;
pub const LF_BAND: (f64, f64) = (0.04, 0.15);
pub const HF_BAND: (f64, f64) = (0.15, 0.4);

/// Normalized band powers; each is `None` when undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralHrv {
    pub lf_norm: Option<f64>,
    pub hf_norm: Option<f64>,
    pub lf_hf: Option<f64>,
}

/// Frequencies of the evaluation grid.
pub fn frequency_grid() -> Vec<f64> {
    let n = ((GRID_END_HZ - GRID_START_HZ) / GRID_STEP_HZ).floor() as usize + 1;
    (0..n)
        .map(|j| GRID_START_HZ + j as f64 * GRID_STEP_HZ)
        .collect()
}

/// Least-squares (Lomb–Scargle) periodogram of `values` sampled at `times`,
/// evaluated on `f0 + j·df` for `j < n`. The mean is removed first.
pub fn lomb_scargle(times: &[f64], values: &[f64], f0: f64, df: f64, n: usize) -> Vec<f64> {
    let m = times.len();
    if m < 2 {
        return vec![0.0; n];
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    // Rounding residue of a constant series is not signal.
    let spread = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if spread <= 1e-12 * mean.abs().max(1.0) {
        return vec![0.0; n];
    }
    let t_ref = times[m - 1];
    // e^{i ω t} for the current frequency and the per-step rotation, per point.
    let mut cur: Vec<(f64, f64)> = Vec::with_capacity(m);
    let mut step: Vec<(f64, f64)> = Vec::with_capacity(m);
    for &t in times {
        let dt = t - t_ref;
        let (s, c) = (2.0 * PI * f0 * dt).sin_cos();
        cur.push((c, s));
        let (s, c) = (2.0 * PI * df * dt).sin_cos();
        step.push((c, s));
    }
    let mut power = Vec::with_capacity(n);
    for _ in 0..n {
        let (mut yc, mut ys, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
        for (k, &(c, s)) in cur.iter().enumerate() {
            let y = values[k] - mean;
            yc += y * c;
            ys += y * s;
            c2 += c * c - s * s;
            s2 += 2.0 * c * s;
        }
        // Time offset tau that decouples the sine and cosine fits.
        let two_wt = s2.atan2(c2);
        let (sin_wt, cos_wt) = (0.5 * two_wt).sin_cos();
        let half = 0.5 * m as f64;
        let (cos2, sin2, cs) = (cos_wt * cos_wt, sin_wt * sin_wt, cos_wt * sin_wt);
        let cc_sum = half + 0.5 * c2;
        let ss_sum = half - 0.5 * c2;
        let cs_sum = 0.5 * s2;
        let cos_den = cos2 * cc_sum + 2.0 * cs * cs_sum + sin2 * ss_sum;
        let sin_den = sin2 * cc_sum - 2.0 * cs * cs_sum + cos2 * ss_sum;
        let cos_num = cos_wt * yc + sin_wt * ys;
        let sin_num = cos_wt * ys - sin_wt * yc;
        let mut p = 0.0;
        if cos_den > 1e-12 * m as f64 {
            p += cos_num * cos_num / cos_den;
        }
        if sin_den > 1e-12 * m as f64 {
            p += sin_num * sin_num / sin_den;
        }
        power.push(0.5 * p);
        for (z, r) in cur.iter_mut().zip(&step) {
            *z = (z.0 * r.0 - z.1 * r.1, z.0 * r.1 + z.1 * r.0);
        }
    }
    power
}

/// Band summary of a periodogram on [`frequency_grid`].
pub fn band_powers(freqs: &[f64], power: &[f64]) -> SpectralHrv {
    let (mut lf, mut hf, mut total) = (0.0, 0.0, 0.0);
    for (&f, &p) in freqs.iter().zip(power) {
        total += p;
        if f >= LF_BAND.0 && f < LF_BAND.1 {
            lf += p;
        } else if f >= HF_BAND.0 && f <= HF_BAND.1 {
            hf += p;
        }
    }
    if !(total > 0.0) {
        return SpectralHrv::default();
    }
    SpectralHrv {
        lf_norm: Some(lf / total),
        hf_norm: Some(hf / total),
        lf_hf: (hf > 0.0).then(|| lf / hf),
    }
}

/// LF/HF summary of the HR series `hr` at beat times `times`.
pub fn spectral_hrv(times: &[f64], hr: &[f64]) -> SpectralHrv {
    let freqs = frequency_grid();
    let power = lomb_scargle(times, hr, GRID_START_HZ, GRID_STEP_HZ, freqs.len());
    band_powers(&freqs, &power)
}

/// Trailing-window spectral features for every beat. A beat gets values once
/// its window of `window_s` seconds is covered by data and holds at least
/// `min_beats` beats.
pub fn trailing_spectral(
    times: &[f64],
    hr: &[f64],
    window_s: f64,
    min_beats: usize,
) -> Vec<SpectralHrv> {
    let mut out = vec![SpectralHrv::default(); times.len()];
    let Some(&first) = times.first() else {
        return out;
    };
    let mut lo = 0;
    for i in 0..times.len() {
        let t0 = times[i] - window_s;
        while times[lo] <= t0 {
            lo += 1;
        }
        if t0 < first || i + 1 - lo < min_beats {
            continue;
        }
        out[i] = spectral_hrv(&times[lo..=i], &hr[lo..=i]);
    }
    out
}
