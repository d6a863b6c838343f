//! Complex Gaussian noise, the Gaussian-norm tail estimate and the a
//! posteriori error certificate built on it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{check_model, matched_error, Verdict};
use crate::error::{Error, Result};
use crate::torus::{ExponentialSum, MatchPartition, SampleGrid};

/// `η_k = X_{k,1} + i X_{k,2}` with each component `N(0, σ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma: f64,
    seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        Ok(NoiseModel { sigma, seed })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for one independent stream, e.g. one trial of a sweep.
    pub fn rng(&self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

pub fn draw_noise<R: Rng + ?Sized>(rng: &mut R, sigma: f64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect()
}

/// `count` draws from stream 0 of the model's seed.
pub fn sample_noise(model: &NoiseModel, count: usize) -> Vec<Complex64> {
    sample_noise_stream(model, 0, count)
}

pub fn sample_noise_stream(model: &NoiseModel, stream: u64, count: usize) -> Vec<Complex64> {
    draw_noise(&mut model.rng(stream), model.sigma, count)
}

/// `|‖v+η‖² − 2Kσ²|^{1/2} + (2+√2)σK^{(1+δ)/4}`.
pub fn gauss_norm_estimator(noisy_residual_norm_sq: f64, k: usize, sigma: f64, delta: f64) -> f64 {
    let k = k as f64;
    (noisy_residual_norm_sq - 2.0 * k * sigma * sigma).abs().sqrt()
        + (2.0 + std::f64::consts::SQRT_2) * sigma * k.powf((1.0 + delta) / 4.0)
}

/// `1 − e^{−K^{(1+δ)/2}} − 2e^{−K^δ/8}`; may be negative for small `K`.
pub fn success_probability(k: usize, delta: f64) -> f64 {
    let k = k as f64;
    1.0 - (-k.powf((1.0 + delta) / 2.0)).exp() - 2.0 * (-k.powf(delta) / 8.0).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CminSource {
    /// Estimate only (ground truth unknown).
    Estimate,
    /// Minimum over ground truth and estimate.
    TruthAndEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct APosterioriCertificate {
    pub estimator: f64,
    /// `estimator²`.
    pub premise_value: f64,
    /// `(4N+4)/3 · c_min²`.
    pub premise_threshold: f64,
    pub c_min: f64,
    pub c_min_source: CminSource,
    pub success_probability: f64,
    pub probability_vacuous: bool,
    pub delta: f64,
    pub verdict: Verdict,
    /// Present in experiment mode whenever the matching is total.
    pub weighted_error: Option<f64>,
    pub matching: Option<MatchPartition>,
    /// Whether `weighted_error ≤ estimator²`.
    pub estimate_holds: Option<bool>,
}

fn check_inputs(noisy: &[Complex64], n: usize, sigma: f64, delta: f64) -> Result<SampleGrid> {
    let grid = SampleGrid::symmetric(n)?;
    if noisy.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} samples on −N..N, got {}",
            grid.len(),
            noisy.len()
        )));
    }
    if !(sigma >= 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "need σ ≥ 0 and δ ∈ (0,1), got σ = {sigma}, δ = {delta}"
        )));
    }
    Ok(grid)
}

fn certificate_core(
    noisy: &[Complex64],
    g: &ExponentialSum,
    grid: &SampleGrid,
    n: usize,
    sigma: f64,
    delta: f64,
    c_min: f64,
    c_min_source: CminSource,
) -> APosterioriCertificate {
    let residual_sq: f64 = grid
        .iter()
        .zip(noisy)
        .map(|(k, y)| (y - g.eval_int(k)).norm_sqr())
        .sum();
    let estimator = gauss_norm_estimator(residual_sq, grid.len(), sigma, delta);
    let premise_value = estimator * estimator;
    let premise_threshold = (4.0 * n as f64 + 4.0) / 3.0 * c_min * c_min;
    let p = success_probability(grid.len(), delta);
    APosterioriCertificate {
        estimator,
        premise_value,
        premise_threshold,
        c_min,
        c_min_source,
        success_probability: p,
        probability_vacuous: p <= 0.0,
        delta,
        verdict: if premise_value <= premise_threshold {
            Verdict::Certified
        } else {
            Verdict::PremiseFailed
        },
        weighted_error: None,
        matching: None,
        estimate_holds: None,
    }
}

/// Certificate for an estimate `g` from noisy samples on `−N..N` when the
/// ground truth is unknown; `c_min` comes from `g`.
pub fn apost_certificate(
    noisy: &[Complex64],
    g: &ExponentialSum,
    n: usize,
    sigma: f64,
    delta: f64,
    q: f64,
) -> Result<APosterioriCertificate> {
    let grid = check_inputs(noisy, n, sigma, delta)?;
    check_model(g, g, n, q)?;
    Ok(certificate_core(noisy, g, &grid, n, sigma, delta, g.min_modulus(), CminSource::Estimate))
}

/// Certificate with known ground truth `f`: additionally evaluates the
/// weighted frequency/coefficient error and whether it stays below
/// `estimator²`.
pub fn apost_certificate_with_truth(
    noisy: &[Complex64],
    g: &ExponentialSum,
    f: &ExponentialSum,
    n: usize,
    sigma: f64,
    delta: f64,
    q: f64,
) -> Result<APosterioriCertificate> {
    let grid = check_inputs(noisy, n, sigma, delta)?;
    check_model(f, g, n, q)?;
    let c_min = f.min_modulus().min(g.min_modulus());
    let mut cert = certificate_core(noisy, g, &grid, n, sigma, delta, c_min, CminSource::TruthAndEstimate);
    let certified = cert.verdict == Verdict::Certified;
    match matched_error(f, g, n) {
        Ok((matching, error)) => {
            if certified && error.is_none() {
                return Err(Error::UnmatchedFrequencies {
                    count: matching.unmatched.len(),
                });
            }
            cert.weighted_error = error;
            cert.estimate_holds = error.map(|e| e <= cert.premise_value);
            cert.matching = Some(matching);
        }
        Err(e) if certified => return Err(e),
        Err(_) => {}
    }
    Ok(cert)
}
