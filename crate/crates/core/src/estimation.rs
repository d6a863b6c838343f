//! ESPRIT frequency estimation and least-squares coefficient fits.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{cis_turns, ExponentialSum, Frequency, SampleGrid};

const SVD_EPS: f64 = f64::EPSILON;
const MAX_ITERATIONS: usize = 10_000;

/// Relative size of the `M`-th singular value below which the Hankel matrix
/// counts as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Gram condition number beyond which a coefficient fit is flagged.
pub const ILL_CONDITIONED_GRAM: f64 = 1e12;

/// Coefficients below this modulus are dropped from an estimate.
pub const COEFFICIENT_FLOOR: f64 = 1e-14;

/// `⌊(L+1)/2⌋`.
pub fn default_window(len: usize) -> usize {
    (len + 1) / 2
}

/// Estimates `model_order` frequencies from equispaced samples.
///
/// The Hankel matrix `H[r, c] = s[r + c]` has `window` columns. Its transpose
/// has the same structure with `L − window + 1` columns, so the orientation
/// with more rows is used for the shift-invariance step.
pub fn esprit(samples: &[Complex64], model_order: usize, window: usize) -> Result<Vec<Frequency>> {
    let len = samples.len();
    if model_order == 0 || window < model_order || window + model_order > len + 1 {
        return Err(Error::InvalidInput(format!(
            "need 1 ≤ M ≤ window ≤ L − M + 1, got M = {model_order}, window = {window}, L = {len}"
        )));
    }
    let rows = (len - window + 1).max(window);
    let cols = len - rows + 1;
    if rows <= model_order {
        return Err(Error::InvalidInput(format!(
            "{len} samples cannot resolve {model_order} frequencies"
        )));
    }
    let hankel = DMatrix::from_fn(rows, cols, |r, c| samples[r + c]);
    let svd = SVD::try_new(hankel, true, false, SVD_EPS, MAX_ITERATIONS)
        .ok_or(Error::ConvergenceFailure)?;
    let sigma = &svd.singular_values;
    if sigma[model_order - 1] < RANK_TOLERANCE * sigma[0] || sigma[0] == 0.0 {
        return Err(Error::RankDeficient {
            order: model_order,
            sigma_m: sigma[model_order - 1],
            sigma_1: sigma[0],
        });
    }
    let u = svd.u.ok_or(Error::ConvergenceFailure)?;
    let signal = u.columns(0, model_order);
    let upper = signal.rows(0, rows - 1).into_owned();
    let lower = signal.rows(1, rows - 1).into_owned();
    let psi = qr_solve(upper, &lower)?;
    let eigenvalues = Schur::try_new(psi, SVD_EPS, MAX_ITERATIONS)
        .and_then(|s| s.eigenvalues())
        .ok_or(Error::ConvergenceFailure)?;
    let mut frequencies: Vec<Frequency> = eigenvalues
        .iter()
        .map(|z| Frequency::new(z.arg() / (2.0 * PI)))
        .collect();
    frequencies.sort_by(|a, b| a.value().total_cmp(&b.value()));
    Ok(frequencies)
}

/// Least-squares solution of `a x = b` for a tall `a` of full column rank,
/// by Householder QR.
fn qr_solve(a: DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let qr = a.qr();
    let rhs = qr.q().adjoint() * b;
    qr.r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::InvalidInput("least-squares system is rank deficient".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresFit {
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
    pub gram_condition: f64,
    pub ill_conditioned: bool,
}

/// Minimizes `‖V c − s‖₂` with `V[k, j] = e^{2πi k y_j}` over the grid.
pub fn least_squares_coefficients(
    samples: &[Complex64],
    grid: &SampleGrid,
    frequencies: &[Frequency],
) -> Result<LeastSquaresFit> {
    if samples.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "{} samples for a grid of {} points",
            samples.len(),
            grid.len()
        )));
    }
    if frequencies.is_empty() || frequencies.len() > grid.len() {
        return Err(Error::InvalidInput(format!(
            "cannot fit {} frequencies on {} samples",
            frequencies.len(),
            grid.len()
        )));
    }
    for (i, y) in frequencies.iter().enumerate() {
        if frequencies[..i].contains(y) {
            return Err(Error::DuplicateFrequency { frequency: y.value() });
        }
    }
    let points: Vec<i64> = grid.iter().collect();
    let v = DMatrix::from_fn(points.len(), frequencies.len(), |r, j| {
        cis_turns(points[r] as f64 * frequencies[j].value())
    });
    let b = DMatrix::from_column_slice(samples.len(), 1, samples);
    let gram = SymmetricEigen::try_new(v.adjoint() * &v, SVD_EPS, MAX_ITERATIONS)
        .ok_or(Error::ConvergenceFailure)?;
    let (l_max, l_min) = (gram.eigenvalues.max(), gram.eigenvalues.min());
    let gram_condition = if l_min > 0.0 { l_max / l_min } else { f64::INFINITY };
    let c = qr_solve(v.clone(), &b)?;
    let residual_norm = (&v * &c - &b).norm();
    Ok(LeastSquaresFit {
        coefficients: c.iter().copied().collect(),
        residual_norm,
        gram_condition,
        ill_conditioned: gram_condition > ILL_CONDITIONED_GRAM,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub frequencies: Vec<Frequency>,
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
    pub ill_conditioned: bool,
}

impl EstimationResult {
    pub fn to_sum(&self) -> Result<ExponentialSum> {
        ExponentialSum::new(
            self.frequencies
                .iter()
                .map(|y| y.value())
                .zip(self.coefficients.iter().copied()),
        )
    }
}

/// ESPRIT followed by a coefficient fit; terms with negligible coefficients
/// are dropped. `window` defaults to [`default_window`].
pub fn estimate(
    samples: &[Complex64],
    grid: &SampleGrid,
    model_order: usize,
    window: Option<usize>,
) -> Result<EstimationResult> {
    let window = window.unwrap_or_else(|| default_window(samples.len()));
    let frequencies = esprit(samples, model_order, window)?;
    let fit = least_squares_coefficients(samples, grid, &frequencies)?;
    let (frequencies, coefficients) = frequencies
        .into_iter()
        .zip(fit.coefficients)
        .filter(|(_, c)| c.norm() >= COEFFICIENT_FLOOR)
        .unzip();
    Ok(EstimationResult {
        frequencies,
        coefficients,
        residual_norm: fit.residual_norm,
        ill_conditioned: fit.ill_conditioned,
    })
}
