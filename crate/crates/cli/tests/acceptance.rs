//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. `ACCEPTANCE_CRITERIA=1,3` runs a subset.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ictal_ppg::detector::lstm::{
    accumulate_gradient, forward_trace, lstm_cell, sample_dropout_mask, weighted_bce, LstmParams,
};
use ictal_ppg::features::hrv::{rmssd, sdnn};
use ictal_ppg::features::morphology::{
    normalized_crest_time, normalized_max_velocity_time, pulse_amplitude, pulse_transit_time,
};
use ictal_ppg::features::pca::{fit_profiles, pca1_of_profile};
use ictal_ppg::features::spectral::{frequency_grid, spectral_hrv, HF_BAND, LF_BAND};
use ictal_ppg::features::{FeatureConfig, FeatureName};
use ictal_ppg::pipeline::{
    analyze_recording, detection, significance, InputConfig, PipelineConfig,
};
use ictal_ppg::pulse::{detect_rpeaks, detect_troughs, segment_series, Pulse};
use ictal_ppg::stats::{one_way_anova, zscore_values};
use ictal_ppg::synth::{corpus_scripts, generate, generate_with_truth, CorpusConfig, PhysioScript};
use ictal_ppg::types::Recording;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(
        took <= budget,
        format!("took {took:.1?}, budget {budget:?}"),
    )
}

// ---------------------------------------------------------------- criterion 1

/// Natural cubic spline through `(x, y)`, evaluated at `at` (sorted).
fn spline(x: &[f64], y: &[f64], at: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    // Second derivatives from the tridiagonal system (Thomas algorithm).
    let mut diag = vec![1.0; n];
    let mut rhs = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 1..n - 1 {
        let lower = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]) - lower * upper[i - 1];
        upper[i] = h[i] / diag[i];
        let r = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        rhs[i] = (r - lower * rhs[i - 1]) / diag[i];
    }
    let mut m = vec![0.0; n];
    for i in (1..n - 1).rev() {
        m[i] = rhs[i] - upper[i] * m[i + 1];
    }
    let mut j = 0;
    at.iter()
        .map(|&t| {
            while j + 2 < n && x[j + 1] < t {
                j += 1;
            }
            let (a, b) = (x[j + 1] - t, t - x[j]);
            let hj = h[j];
            m[j] * a.powi(3) / (6.0 * hj)
                + m[j + 1] * b.powi(3) / (6.0 * hj)
                + (y[j] / hj - m[j] * hj / 6.0) * a
                + (y[j + 1] / hj - m[j + 1] * hj / 6.0) * b
        })
        .collect()
}

/// Band summary of the spline-resampled series by direct DFT.
fn dft_bands(times: &[f64], values: &[f64]) -> (f64, f64) {
    let fs = 4.0;
    let (t0, t1) = (times[0], *times.last().unwrap());
    let n = ((t1 - t0) * fs) as usize;
    let grid: Vec<f64> = (0..n).map(|k| t0 + k as f64 / fs).collect();
    let even = spline(times, values, &grid);
    let m = even.iter().sum::<f64>() / n as f64;
    let (mut lf, mut hf, mut total) = (0.0, 0.0, 0.0);
    for f in frequency_grid() {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, v) in even.iter().enumerate() {
            let ph = 2.0 * PI * f * k as f64 / fs;
            re += (v - m) * ph.cos();
            im -= (v - m) * ph.sin();
        }
        let p = re * re + im * im;
        total += p;
        if f >= LF_BAND.0 && f < LF_BAND.1 {
            lf += p;
        } else if f >= HF_BAND.0 && f <= HF_BAND.1 {
            hf += p;
        }
    }
    (lf / total, hf / total)
}

/// Beat times and per-beat HR over `duration` for an HR modulated by the
/// given (frequency, relative depth) components.
fn modulated_beats(duration: f64, parts: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let rate = |t: f64| {
        1.1 * (1.0
            + parts
                .iter()
                .map(|(f, a)| a * (2.0 * PI * f * t).sin())
                .sum::<f64>())
    };
    let mut times = vec![0.0];
    while *times.last().unwrap() < duration {
        let t = *times.last().unwrap();
        times.push(t + 1.0 / rate(t));
    }
    let hr: Vec<f64> = times.windows(2).map(|w| 1.0 / (w[1] - w[0])).collect();
    times.pop();
    (times, hr)
}

fn clean_interior(pulses: &[Pulse], lo: f64, hi: f64) -> Vec<&Pulse> {
    pulses
        .iter()
        .filter(|p| p.clean && p.trough_time > lo && p.next_trough_time < hi)
        .collect()
}

fn constructed_pulse(upstroke: impl Fn(f64) -> f64, crest: f64, fs: f64) -> Pulse {
    let samples: Vec<f64> = (0..=fs as usize)
        .map(|j| {
            let t = j as f64 / fs;
            if t <= crest {
                upstroke(t)
            } else {
                1.0 - (t - crest) / (1.0 - crest)
            }
        })
        .collect();
    Pulse {
        trough_time: 0.0,
        next_trough_time: 1.0,
        systolic_peak_time: crest,
        systolic_peak_value: 1.0,
        trough_value: 0.0,
        notch_count: 0,
        samples,
        sample_rate: fs,
        first_sample_time: 0.0,
        clean: true,
    }
}

/// Location of the largest derivative on a dense grid.
fn argmax_derivative(d: impl Fn(f64) -> f64, hi: f64) -> f64 {
    (0..=100_000)
        .map(|k| hi * k as f64 / 100_000.0)
        .fold((0.0, f64::NEG_INFINITY), |a, t| {
            if d(t) > a.1 {
                (t, d(t))
            } else {
                a
            }
        })
        .0
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn covariance(profiles: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for b in profiles {
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] += b[i] * b[j];
            }
        }
    }
    c.iter().map(|v| v / profiles.len() as f64).collect()
}

fn mat_vec(c: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| dot(&c[i * n..(i + 1) * n], v)).collect()
}

fn feature_oracles() -> Outcome {
    let start = Instant::now();
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol;

    check(
        close(sdnn(&[0.8, 1.0]).unwrap(), 0.1, 1e-12),
        "SDNN {0.8, 1.0}",
    )?;
    let by_hand = ((0.04 + 0.0 + 0.04) / 3.0f64).sqrt();
    check(
        close(sdnn(&[0.7, 0.9, 1.1]).unwrap(), by_hand, 1e-12),
        "SDNN formula",
    )?;
    check(
        close(sdnn(&[0.7, 0.9, 1.1]).unwrap(), 0.1633, 5e-5),
        "SDNN {0.7, 0.9, 1.1}",
    )?;
    check(
        close(rmssd(&[0.8, 0.9, 1.0]).unwrap(), 0.1, 1e-12),
        "RMSSD {0.8, 0.9, 1.0}",
    )?;
    check(
        close(rmssd(&[1.0, 0.8]).unwrap(), 0.2, 1e-12),
        "RMSSD {1.0, 0.8}",
    )?;

    let window = 120.0;
    for (parts, name) in [
        (vec![(0.1, 0.05)], "0.10 Hz"),
        (vec![(0.3, 0.05)], "0.30 Hz"),
        (vec![(0.1, 0.04), (0.3, 0.04)], "0.10 + 0.30 Hz"),
    ] {
        let (times, hr) = modulated_beats(window, &parts);
        let s = spectral_hrv(&times, &hr);
        let (lf, hf) = (s.lf_norm.unwrap(), s.hf_norm.unwrap());
        let (olf, ohf) = dft_bands(&times, &hr);
        let ok = match parts.len() {
            1 if parts[0].0 < 0.15 => lf >= 0.9 && hf <= 0.05 && olf >= 0.9 && ohf <= 0.05,
            1 => hf >= 0.9 && ohf >= 0.9,
            _ => close(lf / hf, 1.0, 0.15) && close(olf / ohf, 1.0, 0.15),
        };
        check(
            ok && close(lf, olf, 0.05) && close(hf, ohf, 0.05),
            format!("spectral {name}: LF {lf:.3} HF {hf:.3}, DFT LF {olf:.3} HF {ohf:.3}"),
        )?;
    }

    let mut script = PhysioScript::steady(60.0, 1.0, 11);
    script.pulse_shape.amplitude = 0.6;
    let rec = generate(&script).map_err(|e| e.to_string())?;
    let pulses = segment_series(&rec.ppg);
    let inner = clean_interior(&pulses, 1.0, 59.0);
    check(
        inner.len() >= 50,
        format!("only {} clean pulses", inner.len()),
    )?;
    for p in &inner {
        let pa = pulse_amplitude(p);
        check(
            close(pa, 0.6, 0.006),
            format!("PA {pa} at {}", p.trough_time),
        )?;
        let nct = normalized_crest_time(p);
        check(
            close(nct, 0.30, 0.02),
            format!("tNCT {nct} at {}", p.trough_time),
        )?;
    }

    let mut script = PhysioScript::steady(60.0, 1.25, 12);
    script.conduction_delay = 0.2;
    let rec = generate(&script).map_err(|e| e.to_string())?;
    let pulses = segment_series(&rec.ppg);
    let r = detect_rpeaks(rec.ecg.as_ref().unwrap());
    for p in clean_interior(&pulses, 2.0, 58.0) {
        let ptt = pulse_transit_time(p, &r).ok_or("PTT undefined")?;
        check(
            close(ptt, 0.25, 0.02),
            format!("PTT {ptt} at {}", p.trough_time),
        )?;
    }

    let fs = 64.0;
    let smooth = |t: f64| {
        let s = t / 0.3;
        3.0 * s * s - 2.0 * s * s * s
    };
    let expected = argmax_derivative(|t| 6.0 * (t / 0.3) * (1.0 - t / 0.3) / 0.3, 0.3);
    let v = normalized_max_velocity_time(&constructed_pulse(smooth, 0.3, fs))
        .ok_or("tNMV undefined")?;
    check(
        close(v, expected, 0.005) && close(expected, 0.15, 1e-4),
        format!("tNMV piecewise {v}"),
    )?;
    let sine = |t: f64| 0.5 * (1.0 - (PI * t / 0.4).cos());
    let expected = argmax_derivative(|t| 0.5 * PI / 0.4 * (PI * t / 0.4).sin(), 0.4);
    let v =
        normalized_max_velocity_time(&constructed_pulse(sine, 0.4, fs)).ok_or("tNMV undefined")?;
    check(
        close(v, expected, 0.005) && close(expected, 0.2, 1e-4),
        format!("tNMV sinusoid {v}"),
    )?;

    // Two orthogonal shapes, weights 3:1 with random signs. C = V S Vᵀ with
    // V = [u v], so the leading eigenpair comes from the 2×2 matrix S·G.
    let n = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let u: Vec<f64> = (0..n)
        .map(|i| (2.0 * PI * i as f64 / n as f64).sin())
        .collect();
    let w: Vec<f64> = (0..n)
        .map(|i| (6.0 * PI * i as f64 / n as f64).cos())
        .collect();
    let coef: Vec<(f64, f64)> = (0..40)
        .map(|_| {
            let s = |r: &mut ChaCha8Rng| if r.random::<bool>() { 1.0 } else { -1.0 };
            (3.0 * s(&mut rng), s(&mut rng))
        })
        .collect();
    let profiles: Vec<Vec<f64>> = coef
        .iter()
        .map(|(a, b)| (0..n).map(|i| a * u[i] + b * w[i]).collect())
        .collect();
    let k = coef.len() as f64;
    let s11 = coef.iter().map(|c| c.0 * c.0).sum::<f64>() / k;
    let s12 = coef.iter().map(|c| c.0 * c.1).sum::<f64>() / k;
    let s22 = coef.iter().map(|c| c.1 * c.1).sum::<f64>() / k;
    let (g11, g22) = (dot(&u, &u), dot(&w, &w));
    let (m11, m12, m21, m22) = (s11 * g11, s12 * g22, s12 * g11, s22 * g22);
    let (tr, det) = (m11 + m22, m11 * m22 - m12 * m21);
    let lambda = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
    let (c1, c2) = (m12, lambda - m11);
    let psi_oracle = unit(&(0..n).map(|i| c1 * u[i] + c2 * w[i]).collect::<Vec<_>>());
    let fit = fit_profiles(&profiles, n).map_err(|e| e.to_string())?;
    let cos = dot(&fit.first_component, &psi_oracle).abs();
    let align = dot(&fit.first_component, &unit(&u)).abs();
    check(
        cos >= 1.0 - 1e-9 && close(fit.eigenvalues[0], lambda, 1e-9 * lambda) && align >= 0.95,
        format!("3:1 shapes: cos {cos}, dominant alignment {align}"),
    )?;

    // Random K = 20 set against power iteration.
    let profiles: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let c = covariance(&profiles, n);
    let mut v = unit(&vec![1.0; n]);
    for _ in 0..1_000_000 {
        let next = unit(&mat_vec(&c, &v));
        let delta = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if delta <= 1e-12 {
            break;
        }
    }
    let fit = fit_profiles(&profiles, n).map_err(|e| e.to_string())?;
    let cos = dot(&fit.first_component, &v).abs();
    check(cos >= 0.999, format!("random K=20: cosine {cos}"))?;

    within_budget(start, Duration::from_secs(60))?;
    Ok(format!("all oracles agree ({:.1?})", start.elapsed()))
}

// ---------------------------------------------------------------- criterion 2

fn pca_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..1000 {
        let n = rng.random_range(5..=50);
        let k = rng.random_range(10..=40);
        let rank = rng.random_range(1..=n);
        let basis: Vec<Vec<f64>> = (0..rank)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let profiles: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let w: Vec<f64> = (0..rank).map(|_| rng.random_range(-1.0..1.0)).collect();
                (0..n)
                    .map(|i| (0..rank).map(|r| w[r] * basis[r][i]).sum())
                    .collect()
            })
            .collect();
        let fit = fit_profiles(&profiles, n).map_err(|e| format!("case {case}: {e}"))?;
        let psi = &fit.first_component;
        let pulse: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = pca1_of_profile(&pulse, &fit).ok_or("undefined PCA1")?;
        check((0.0..=1.0).contains(&v), format!("case {case}: PCA1 {v}"))?;

        let scale = rng.random_range(0.01..100.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let own: Vec<f64> = psi.iter().map(|x| x * scale).collect();
        let self_err = (pca1_of_profile(&own, &fit).unwrap() - 1.0).abs();
        let p = dot(&pulse, psi);
        let ortho: Vec<f64> = pulse.iter().zip(psi).map(|(r, s)| r - p * s).collect();
        let ortho_val = pca1_of_profile(&ortho, &fit).unwrap_or(0.0);

        let c = covariance(&profiles, n);
        let lambda = fit.eigenvalues[0];
        let cpsi = mat_vec(&c, psi);
        let residual = cpsi
            .iter()
            .zip(psi)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let rel = residual / lambda;
        check(
            self_err <= 1e-12,
            format!("case {case}: self-projection off by {self_err}"),
        )?;
        check(
            ortho_val <= 1e-12,
            format!("case {case}: orthogonal projection {ortho_val}"),
        )?;
        check(rel <= 1e-9, format!("case {case}: eigen residual {rel}·λ₁"))?;
        worst = (
            worst.0.max(self_err),
            worst.1.max(ortho_val),
            worst.2.max(rel),
        );
    }
    Ok(format!(
        "1000 cases; worst self {:.1e}, orthogonal {:.1e}, residual {:.1e}·λ₁",
        worst.0, worst.1, worst.2
    ))
}

// ---------------------------------------------------------------- criterion 3

fn random_params(f: usize, h1: usize, h2: usize, scale: f64, rng: &mut ChaCha8Rng) -> LstmParams {
    let mut p = LstmParams::zeros(f, h1, h2);
    for v in &mut p.theta {
        *v = rng.random_range(-scale..scale);
    }
    p
}

fn gradient_error(f: usize, mask: bool, rng: &mut ChaCha8Rng) -> f64 {
    let steps = 3;
    let mut p = random_params(f, f, 5, 0.5, rng);
    let window: Vec<f64> = (0..steps * f)
        .map(|_| rng.random_range(-2.0..2.0))
        .collect();
    let m = mask.then(|| sample_dropout_mask(steps, f, 0.8, rng));
    let label = rng.random::<bool>();
    let weight = rng.random_range(0.5..3.0);
    let mut grad = vec![0.0; p.len()];
    accumulate_gradient(&p, &window, label, weight, m.as_deref(), &mut grad);
    let loss =
        |p: &LstmParams| weighted_bce(forward_trace(p, &window, m.as_deref()).logit, label, weight);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for j in 0..p.len() {
        let v = p.theta[j];
        p.theta[j] = v + h;
        let up = loss(&p);
        p.theta[j] = v - h;
        let down = loss(&p);
        p.theta[j] = v;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - grad[j]).abs() / fd.abs().max(grad[j].abs()).max(1e-6));
    }
    worst
}

fn lstm_checks() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for f in [2, 7, 12] {
        for mask in [false, true] {
            let err = gradient_error(f, mask, &mut rng);
            check(
                err <= 1e-4,
                format!("F={f} dropout={mask}: relative error {err:.2e}"),
            )?;
            worst = worst.max(err);
        }
    }
    for cell in 0..10_000 {
        let f = rng.random_range(1..=12);
        let h = rng.random_range(1..=12);
        let p = random_params(f, h, 1, 1.0, &mut rng);
        let x: Vec<f64> = (0..f).map(|_| rng.random_range(-3.0..3.0)).collect();
        let hp: Vec<f64> = (0..h).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cp: Vec<f64> = (0..h).map(|_| rng.random_range(-3.0..3.0)).collect();
        let s = lstm_cell(&p.layer1, &p.theta, &x, &hp, &cp);
        let open_unit = |v: &f64| *v > 0.0 && *v < 1.0;
        let open_signed = |v: &f64| *v > -1.0 && *v < 1.0;
        check(
            s.f.iter().all(open_unit) && s.i.iter().all(open_unit) && s.o.iter().all(open_unit),
            format!("cell {cell}: sigmoid gate out of (0, 1)"),
        )?;
        check(
            s.g.iter().all(open_signed) && s.h.iter().all(open_signed),
            format!("cell {cell}: candidate or output out of (-1, 1)"),
        )?;
    }
    within_budget(start, Duration::from_secs(60))?;
    Ok(format!(
        "worst gradient relative error {worst:.2e}; 10000 cells in range ({:.1?})",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- criterion 4

fn student_t(a: &[f64], b: &[f64]) -> f64 {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let ss = |x: &[f64], m: f64| x.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    let (ma, mb) = (mean(a), mean(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = (ss(a, ma) + ss(b, mb)) / (na + nb - 2.0);
    (ma - mb) / (pooled * (1.0 / na + 1.0 / nb)).sqrt()
}

fn zscore_anova() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_affine: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for case in 0..100 {
        let n = rng.random_range(50..400);
        let mut times: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2000.0)).collect();
        times.sort_by(f64::total_cmp);
        let x: Vec<Option<f64>> = (0..n)
            .map(|_| (rng.random::<f64>() > 0.05).then(|| rng.random_range(-50.0..50.0)))
            .collect();
        let zx = zscore_values(&times, &x, 0.0, 300.0);

        let scale = 2f64.powi(rng.random_range(-10..10));
        let scaled: Vec<Option<f64>> = x.iter().map(|v| v.map(|v| v * scale)).collect();
        check(
            zscore_values(&times, &scaled, 0.0, 300.0) == zx,
            format!("case {case}: scaling by {scale} changed z"),
        )?;

        let (a, b) = (rng.random_range(0.01..100.0), rng.random_range(-1e3..1e3));
        let mapped: Vec<Option<f64>> = x.iter().map(|v| v.map(|v| a * v + b)).collect();
        for (p, q) in zx.iter().zip(zscore_values(&times, &mapped, 0.0, 300.0)) {
            match (p, q) {
                (Some(p), Some(q)) => {
                    worst_affine = worst_affine.max((p - q).abs() / (1.0 + p.abs()))
                }
                (None, None) => {}
                _ => return Err(format!("case {case}: definedness changed under a·x + b")),
            }
        }

        let na = rng.random_range(10..150);
        let nb = rng.random_range(10..150);
        let shift = rng.random_range(-3.0..3.0);
        let g1: Vec<f64> = (0..na).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g2: Vec<f64> = (0..nb)
            .map(|_| shift + rng.random_range(-2.0..2.0))
            .collect();
        let (f, _) = one_way_anova(&g1, &g2);
        let t = student_t(&g1, &g2);
        worst_f = worst_f.max((f - t * t).abs());
    }
    check(
        worst_affine <= 1e-9,
        format!("affine map moved z by {worst_affine:.1e}"),
    )?;
    check(worst_f <= 1e-10, format!("|F - t²| reached {worst_f:.1e}"))?;
    Ok(format!(
        "power-of-two scaling bit-identical, general a·x + b within {worst_affine:.1e}; |F - t²| ≤ {worst_f:.1e}"
    ))
}

// ---------------------------------------------------------------- criterion 5

fn synthetic_reproduction() -> Outcome {
    let start = Instant::now();
    let cfg = PipelineConfig::default();
    let InputConfig::Synthetic(corpus) = &cfg.input else {
        return Err("default input is not synthetic".into());
    };
    let scripts = corpus_scripts(corpus).map_err(|e| e.to_string())?;
    let recordings: Vec<Recording> = scripts
        .iter()
        .map(generate)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let hours: f64 = recordings.iter().map(|r| r.duration()).sum::<f64>() / 3600.0;
    let n_seizures: usize = recordings.iter().map(|r| r.annotations.len()).sum();
    check(
        (hours - 30.0).abs() < 0.01 && n_seizures == 12,
        format!("corpus {hours:.2} h, {n_seizures} seizures"),
    )?;
    let analyses = recordings
        .iter()
        .map(|r| analyze_recording(r, &FeatureConfig::default()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let table = significance(&analyses);
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for (f, increase) in [
        (FeatureName::HR, true),
        (FeatureName::TNct, true),
        (FeatureName::TNmv, true),
        (FeatureName::PA, false),
        (FeatureName::PCA1, false),
        (FeatureName::PTT, false),
    ] {
        let s = &table.features[&f];
        let pct = if increase {
            s.increase_pct
        } else {
            s.decrease_pct
        };
        summary.push(format!(
            "{} {}{pct:.0}%",
            f.as_str(),
            if increase { '+' } else { '-' }
        ));
        if pct < 80.0 {
            failures.push(f.as_str());
        }
    }
    println!("  criterion 5a: {}", summary.join(", "));

    let mut reports = BTreeMap::new();
    for n in [12, 7] {
        let features = FeatureName::set(n).map_err(|e| e.to_string())?;
        let r = detection(&recordings, &analyses, features, &cfg.window, &cfg.holdout)
            .map_err(|e| e.to_string())?;
        println!(
            "  criterion 5b: LSTM{n} sensitivity {:?} PPV {:?} FAR {:?}/h over {} repetitions",
            r.sensitivity,
            r.ppv,
            r.far,
            r.repetitions.len()
        );
        reports.insert(n, r);
    }
    let sens12 = reports[&12].sensitivity.unwrap_or(0.0);
    let far12 = reports[&12].far.ok_or("LSTM12 FAR undefined")?;
    let far7 = reports[&7].far.ok_or("LSTM7 FAR undefined")?;
    check(
        failures.is_empty(),
        format!("direction below 80% for {failures:?}"),
    )?;
    check(
        sens12 >= 0.9,
        format!("LSTM12 mean sensitivity {sens12:.3}"),
    )?;
    check(
        far12 < far7,
        format!("LSTM12 FAR {far12:.3}/h is not below LSTM7 FAR {far7:.3}/h"),
    )?;
    within_budget(start, Duration::from_secs(30 * 60))?;
    Ok(format!(
        "LSTM12 sensitivity {sens12:.3}, FAR {far12:.3}/h vs LSTM7 {far7:.3}/h ({:.1?})",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- criterion 6

fn nearest(sorted: &[f64], t: f64) -> f64 {
    let i = sorted.partition_point(|&x| x < t);
    [i.wrapping_sub(1), i]
        .iter()
        .filter_map(|&j| sorted.get(j))
        .map(|x| (x - t).abs())
        .fold(f64::INFINITY, f64::min)
}

fn segmentation_recovery() -> Outcome {
    let (ppg_tol, ecg_tol) = (1.0 / 64.0, 2.0 / 500.0);
    let mut worst = (0.0f64, 0.0f64);
    for (seed, hr) in [(60, 1.0), (61, 1.2), (62, 1.4), (63, 1.7)] {
        let mut script = PhysioScript::steady(300.0, hr, seed);
        script.noise_sd = 0.02;
        script.ecg_noise_sd = 0.02;
        script.hrv_lf_amp = 0.04;
        script.hrv_hf_amp = 0.03;
        let (rec, truth) = generate_with_truth(&script).map_err(|e| e.to_string())?;
        let troughs = detect_troughs(&rec.ppg);
        let r = detect_rpeaks(rec.ecg.as_ref().unwrap());
        for (truth_times, found, tol, what) in [
            (&truth.troughs, &troughs, ppg_tol, "trough"),
            (&truth.r_peaks, &r.peak_times, ecg_tol, "R peak"),
        ] {
            let interior = |t: &&f64| **t > 2.0 && **t < 298.0;
            for &t in truth_times.iter().filter(interior) {
                let e = nearest(found, t);
                check(
                    e <= tol,
                    format!("HR {hr}: {what} at {t:.3} s missed by {e:.4} s"),
                )?;
                if what == "trough" {
                    worst.0 = worst.0.max(e);
                } else {
                    worst.1 = worst.1.max(e);
                }
            }
            let spurious = found
                .iter()
                .filter(interior)
                .filter(|&&f| nearest(truth_times, f) > 0.2)
                .count();
            check(
                spurious == 0,
                format!("HR {hr}: {spurious} spurious {what}s"),
            )?;
        }
    }

    let (mut n_art, mut n_clean) = (0, 0);
    for (seed, hr) in [(64, 1.0), (65, 1.3)] {
        let mut script = PhysioScript::steady(300.0, hr, seed);
        script.artifact_fraction = 0.1;
        script.hrv_lf_amp = 0.04;
        let (rec, truth) = generate_with_truth(&script).map_err(|e| e.to_string())?;
        let artifacts = truth.artifact_troughs();
        for p in segment_series(&rec.ppg) {
            if p.trough_time < 2.0 || p.next_trough_time > 298.0 {
                continue;
            }
            let artifact = nearest(&artifacts, p.trough_time) <= ppg_tol;
            if artifact {
                n_art += 1;
                check(
                    !p.clean,
                    format!("artifact at {:.3} s accepted", p.trough_time),
                )?;
            } else {
                n_clean += 1;
                check(
                    p.clean,
                    format!("clean pulse at {:.3} s rejected", p.trough_time),
                )?;
            }
        }
    }
    check(n_art >= 20, format!("only {n_art} artifacts injected"))?;
    Ok(format!(
        "worst trough {:.1} samples, worst R peak {:.1} samples; {n_art}/{n_art} artifacts rejected, {n_clean}/{n_clean} clean pulses accepted",
        worst.0 * 64.0,
        worst.1 * 500.0
    ))
}

// ---------------------------------------------------------------- criterion 7

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let p = entry.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = PipelineConfig::default();
    cfg.input = InputConfig::Synthetic(CorpusConfig {
        n_recordings: 2,
        hours_per_recording: 2.0,
        seizure_rate: 1.0,
        seed: 17,
        ..CorpusConfig::default()
    });
    cfg.holdout.repetitions = 2;
    cfg.holdout.train.epochs = 3;
    let cfg_path = tmp.path().join("config.json");
    std::fs::write(&cfg_path, serde_json::to_vec_pretty(&cfg).unwrap())
        .map_err(|e| e.to_string())?;
    let mut dirs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_ictal-ppg"))
            .args(["run", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        check(
            status.status.success(),
            format!(
                "run {name} failed: {}",
                String::from_utf8_lossy(&status.stderr)
            ),
        )?;
        dirs.push(out);
    }
    let (a, b) = (files_under(&dirs[0]), files_under(&dirs[1]));
    check(a == b, "runs produced different file sets")?;
    check(a.len() > 10, format!("only {} outputs", a.len()))?;
    for rel in &a {
        let x = std::fs::read(dirs[0].join(rel)).map_err(|e| e.to_string())?;
        let y = std::fs::read(dirs[1].join(rel)).map_err(|e| e.to_string())?;
        check(x == y, format!("{} differs", rel.display()))?;
    }
    Ok(format!("{} files bit-identical across two runs", a.len()))
}

fn main() -> ExitCode {
    let selected: Option<Vec<usize>> = std::env::var("ACCEPTANCE_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|v| v.trim().parse().ok()).collect());
    let criteria: [(usize, &str, fn() -> Outcome); 7] = [
        (1, "feature formula oracles", feature_oracles),
        (2, "PCA1 bounds and algebra", pca_algebra),
        (3, "LSTM gradient check and gate ranges", lstm_checks),
        (4, "z-score invariance and ANOVA", zscore_anova),
        (
            5,
            "end-to-end synthetic reproduction",
            synthetic_reproduction,
        ),
        (6, "segmentation recovery", segmentation_recovery),
        (7, "determinism", determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if selected.as_ref().is_some_and(|s| !s.contains(&id)) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {id} ({name}): PASS - {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL - {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
