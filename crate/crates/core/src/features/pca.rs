//! Baseline principal component of pulse second differences and the PCA1
//! subspace-projection feature.

use serde::{Deserialize, Serialize};

use crate::dsp::resample_linear;
use crate::error::{Error, Result};
use crate::pulse::Pulse;

pub const DEFAULT_RESAMPLE_N: usize = 100;
pub const MIN_BASELINE_PULSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinePca {
    /// Unit-norm first principal direction ψ₁.
    pub first_component: Vec<f64>,
    /// Eigenvalues of the baseline covariance, descending.
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    /// Number of baseline pulses used.
    pub k: usize,
}

/// Second difference with symmetric edge padding; output length equals input.
pub fn second_difference(b: &[f64]) -> Vec<f64> {
    let n = b.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut out = Vec::with_capacity(n);
    out.push(b[1] - b[0]);
    for i in 1..n - 1 {
        out.push(b[i + 1] - 2.0 * b[i] + b[i - 1]);
    }
    out.push(b[n - 2] - b[n - 1]);
    out
}

/// Pulse samples resampled to `n` points, then second-differenced.
pub fn pulse_acceleration(pulse: &Pulse, n: usize) -> Vec<f64> {
    second_difference(&resample_linear(&pulse.samples, n))
}

/// Eigen-decomposition of a symmetric `n × n` row-major matrix by cyclic
/// Jacobi rotations. Returns eigenvalues (descending) and the matching unit
/// eigenvectors as rows.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n, "matrix must be n × n");
    let mut m = a.to_vec();
    // v holds eigenvectors as columns, row-major.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale > 0.0 {
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| m[p * n + q] * m[p * n + q])
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[p * n + q];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let (app, aqq) = (m[p * n + p], m[q * n + q]);
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                        m[k * n + p] = c * mkp - s * mkq;
                        m[k * n + q] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                        m[p * n + k] = c * mpk - s * mqk;
                        m[q * n + k] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    (values, vectors)
}

/// Fits ψ₁ on the acceleration profiles of `baseline` pulses.
pub fn fit_baseline_pca(baseline: &[&Pulse], n: usize) -> Result<BaselinePca> {
    let profiles: Vec<Vec<f64>> = baseline.iter().map(|p| pulse_acceleration(p, n)).collect();
    fit_profiles(&profiles, n)
}

/// Fits ψ₁ on precomputed acceleration profiles (the columns of B).
pub fn fit_profiles(profiles: &[Vec<f64>], n: usize) -> Result<BaselinePca> {
    let k = profiles.len();
    if k < MIN_BASELINE_PULSES {
        return Err(Error::InsufficientBaseline {
            found: k,
            required: MIN_BASELINE_PULSES,
        });
    }
    if n < 3 {
        return Err(Error::Validation(format!(
            "resample length {n} is too short"
        )));
    }
    let mut cov = vec![0.0; n * n];
    for b in profiles {
        if b.len() != n {
            return Err(Error::Validation(
                "acceleration profile length mismatch".into(),
            ));
        }
        for i in 0..n {
            let bi = b[i];
            if bi == 0.0 {
                continue;
            }
            let row = &mut cov[i * n..(i + 1) * n];
            for (c, &bj) in row.iter_mut().zip(b) {
                *c += bi * bj;
            }
        }
    }
    for c in &mut cov {
        *c /= k as f64;
    }
    if cov.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("baseline covariance".into()));
    }
    let (mut eigenvalues, vectors) = symmetric_eigen(&cov, n);
    for e in &mut eigenvalues {
        // Round-off can leave tiny negatives on a positive semi-definite matrix.
        if *e < 0.0 && *e > -1e-12 * eigenvalues_scale(&cov) {
            *e = 0.0;
        }
    }
    let mut psi = vectors.into_iter().next().expect("n >= 3");
    let lead = psi
        .iter()
        .cloned()
        .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
    if lead < 0.0 {
        psi.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(BaselinePca {
        first_component: psi,
        eigenvalues,
        n,
        k,
    })
}

fn eigenvalues_scale(cov: &[f64]) -> f64 {
    cov.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// `(ψ₁ᵀb″)² / (b″ᵀb″)`; `None` for a zero profile.
pub fn pca1_of_profile(profile: &[f64], baseline: &BaselinePca) -> Option<f64> {
    let norm2: f64 = profile.iter().map(|x| x * x).sum();
    if !(norm2 > 0.0) {
        return None;
    }
    let proj: f64 = profile
        .iter()
        .zip(&baseline.first_component)
        .map(|(a, b)| a * b)
        .sum();
    Some((proj * proj / norm2).clamp(0.0, 1.0))
}

pub fn pca1(pulse: &Pulse, baseline: &BaselinePca) -> Option<f64> {
    pca1_of_profile(&pulse_acceleration(pulse, baseline.n), baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn second_difference_symmetric_padding() {
        let b = [1.0, 4.0, 9.0, 16.0];
        assert_eq!(second_difference(&b), vec![3.0, 2.0, 2.0, -7.0]);
    }

    #[test]
    fn jacobi_on_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1.
        let (vals, vecs) = symmetric_eigen(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs[0][0].abs() - s).abs() < 1e-14 && (vecs[0][1].abs() - s).abs() < 1e-14);
    }

    #[test]
    fn identical_profiles_give_rank_one() {
        let shape: Vec<f64> = (0..20).map(|i| ((i as f64) * 0.7).sin()).collect();
        let profiles = vec![shape.clone(); 12];
        let pca = fit_profiles(&profiles, 20).unwrap();
        let norm = shape.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cos: f64 = shape
            .iter()
            .zip(&pca.first_component)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / norm;
        assert!((cos.abs() - 1.0).abs() < 1e-12);
        assert!(pca.eigenvalues[1].abs() < 1e-12 * pca.eigenvalues[0]);
    }

    #[test]
    fn too_few_baseline_pulses() {
        let profiles = vec![vec![1.0, 2.0, 3.0]; 9];
        assert!(matches!(
            fit_profiles(&profiles, 3),
            Err(Error::InsufficientBaseline {
                found: 9,
                required: 10
            })
        ));
    }

    #[test]
    fn sign_convention_largest_entry_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let profiles: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let pca = fit_profiles(&profiles, 8).unwrap();
        let lead =
            pca.first_component
                .iter()
                .cloned()
                .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        assert!(lead > 0.0);
    }

    #[test]
    fn projection_examples() {
        let mut psi = vec![0.0; 4];
        psi[0] = 1.0;
        let pca = BaselinePca {
            first_component: psi,
            eigenvalues: vec![1.0, 0.0, 0.0, 0.0],
            n: 4,
            k: 10,
        };
        assert_eq!(pca1_of_profile(&[2.0, 0.0, 0.0, 0.0], &pca), Some(1.0));
        assert_eq!(pca1_of_profile(&[0.0, 3.0, 0.0, 0.0], &pca), Some(0.0));
        let half = pca1_of_profile(&[1.0, 1.0, 0.0, 0.0], &pca).unwrap();
        assert!((half - 0.5).abs() < 1e-15);
        assert_eq!(pca1_of_profile(&[0.0; 4], &pca), None);
    }
}
