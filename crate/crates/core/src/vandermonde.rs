//! Vandermonde matrices on the torus and their smallest singular values.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{at_least, collision_threshold, is_separated, vandermonde_bound_pairs, vandermonde_bound_separated};
use crate::error::{Error, Result};
use crate::torus::{cis_turns, match_partition, separation, wrap_distance, Frequency};

const EIGEN_EPS: f64 = f64::EPSILON;
const MAX_ITERATIONS: usize = 10_000;

/// Below this ratio `λ_min/λ_max` of the Gram matrix, σ_min is taken from a
/// dense SVD instead.
const GRAM_RATIO_CUTOFF: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VandermondeSpec {
    frequencies: Vec<Frequency>,
    rows: usize,
}

impl VandermondeSpec {
    pub fn new(frequencies: Vec<Frequency>, rows: usize) -> Result<Self> {
        if rows == 0 || frequencies.is_empty() {
            return Err(Error::InvalidInput(
                "a Vandermonde matrix needs at least one row and one column".into(),
            ));
        }
        for (i, a) in frequencies.iter().enumerate() {
            if frequencies[..i].contains(a) {
                return Err(Error::DuplicateFrequency { frequency: a.value() });
            }
        }
        Ok(VandermondeSpec { frequencies, rows })
    }

    pub fn from_values(values: &[f64], rows: usize) -> Result<Self> {
        Self::new(values.iter().map(|&v| Frequency::new(v)).collect(), rows)
    }

    pub fn frequencies(&self) -> &[Frequency] {
        &self.frequencies
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn columns(&self) -> usize {
        self.frequencies.len()
    }
}

/// `V[k, j] = e^{2πi k y_j}`, `k = 0..N−1`.
pub fn build(spec: &VandermondeSpec) -> DMatrix<Complex64> {
    DMatrix::from_fn(spec.rows, spec.columns(), |k, j| {
        cis_turns(k as f64 * spec.frequencies[j].value())
    })
}

fn gram(matrix: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    if matrix.ncols() <= matrix.nrows() {
        matrix.adjoint() * matrix
    } else {
        matrix * matrix.adjoint()
    }
}

/// Smallest singular value of the full SVD (zero when columns exceed rows).
pub fn sigma_min_dense(matrix: &DMatrix<Complex64>) -> Result<f64> {
    if matrix.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let svd = SVD::try_new(matrix.clone(), false, false, EIGEN_EPS, MAX_ITERATIONS)
        .ok_or(Error::ConvergenceFailure)?;
    let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if matrix.ncols() > matrix.nrows() { 0.0 } else { smallest })
}

/// Smallest singular value via the Gram matrix, switching to a dense SVD when
/// the Gram spectrum is too spread for squaring to be accurate.
pub fn sigma_min(matrix: &DMatrix<Complex64>) -> Result<f64> {
    if matrix.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if matrix.ncols() > matrix.nrows() {
        return Ok(0.0);
    }
    match SymmetricEigen::try_new(gram(matrix), EIGEN_EPS, MAX_ITERATIONS) {
        Some(eig) => {
            let max = eig.eigenvalues.max();
            let min = eig.eigenvalues.min();
            if min > GRAM_RATIO_CUTOFF * max {
                Ok(min.sqrt())
            } else {
                sigma_min_dense(matrix)
            }
        }
        None => sigma_min_dense(matrix),
    }
}

/// Unit right singular vector for the smallest singular value, as the
/// eigenvector of `VᴴV` with the smallest eigenvalue.
pub fn smallest_right_singular_vector(matrix: &DMatrix<Complex64>) -> Result<DVector<Complex64>> {
    let eig = SymmetricEigen::try_new(matrix.adjoint() * matrix, EIGEN_EPS, MAX_ITERATIONS)
        .ok_or(Error::ConvergenceFailure)?;
    let smallest = eig.eigenvalues.imin();
    Ok(eig.eigenvectors.column(smallest).into_owned())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Separated,
    Pairs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub rows: usize,
    pub columns: usize,
    pub q: f64,
    pub tau: Option<f64>,
    pub sigma_min: f64,
    pub sigma_min_squared: f64,
    pub bound: f64,
    /// `σ_min²/bound`, infinite for a zero bound.
    pub ratio: f64,
    pub bound_kind: BoundKind,
    pub holds: bool,
    /// Norm of the projection of the smallest right singular vector onto the
    /// span of the pair patterns `(e_y − e_n)/√2`.
    pub pair_alignment: Option<f64>,
}

impl SigmaReport {
    fn new(
        rows: usize,
        columns: usize,
        q: f64,
        tau: Option<f64>,
        sigma_min: f64,
        bound: f64,
        bound_kind: BoundKind,
    ) -> Self {
        let sq = sigma_min * sigma_min;
        SigmaReport {
            rows,
            columns,
            q,
            tau,
            sigma_min,
            sigma_min_squared: sq,
            bound,
            ratio: if bound == 0.0 { f64::INFINITY } else { sq / bound },
            bound_kind,
            holds: sq >= bound - 1e-9 * sq.max(1.0),
            pair_alignment: None,
        }
    }

    pub const CSV_HEADER: &'static str = "N,M,q,tau,sigma_min_sq,bound,ratio,holds";

    pub fn csv_row(&self) -> String {
        let tau = self.tau.map(|t| t.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.rows, self.columns, self.q, tau, self.sigma_min_squared, self.bound, self.ratio, self.holds
        )
    }
}

pub fn verify_separated(spec: &VandermondeSpec, q: f64) -> Result<SigmaReport> {
    let sep = separation(spec.frequencies());
    if !(q > 0.0) || !is_separated(spec.frequencies(), q) {
        return Err(Error::PreconditionViolated(format!(
            "separation {sep} is below q = {q}"
        )));
    }
    let bound = vandermonde_bound_separated(spec.rows, q)?;
    let sigma = sigma_min(&build(spec))?;
    Ok(SigmaReport::new(spec.rows, spec.columns(), q, None, sigma, bound, BoundKind::Separated))
}

/// Checks the pair-collision bound for the matrix with columns `Y` then `Y′`.
pub fn verify_pairs(first: &VandermondeSpec, second: &VandermondeSpec, q: f64) -> Result<SigmaReport> {
    if first.rows != second.rows {
        return Err(Error::InvalidInput("row counts differ".into()));
    }
    let n = first.rows;
    let threshold = collision_threshold(n);
    if !at_least(q, threshold) {
        return Err(Error::PreconditionViolated(format!(
            "q = {q} is below 3/(N+1) = {threshold}"
        )));
    }
    for spec in [first, second] {
        let sep = separation(spec.frequencies());
        if !is_separated(spec.frequencies(), q) {
            return Err(Error::PreconditionViolated(format!(
                "separation {sep} is below q = {q}"
            )));
        }
    }
    let partition = match_partition(first.frequencies(), second.frequencies(), threshold)
        .map_err(|e| match e {
            Error::AmbiguousMatch { .. } => Error::PreconditionViolated(e.to_string()),
            other => other,
        })?;

    let tau = first
        .frequencies()
        .iter()
        .flat_map(|&y| second.frequencies().iter().map(move |&yp| wrap_distance(y, yp)))
        .fold(f64::INFINITY, f64::min);
    let bound = vandermonde_bound_pairs(n, q, tau)?;

    let mut columns = first.frequencies.clone();
    columns.extend_from_slice(second.frequencies());
    let spec = VandermondeSpec::new(columns, n)?;
    let matrix = build(&spec);
    let sigma = sigma_min(&matrix)?;
    let mut report = SigmaReport::new(n, spec.columns(), q, Some(tau), sigma, bound, BoundKind::Pairs);
    if spec.columns() <= n && !partition.pairs.is_empty() {
        let v = smallest_right_singular_vector(&matrix)?;
        let index = |set: &[Frequency], y: Frequency| set.iter().position(|&x| x == y);
        let mut projection = 0.0;
        for &(y, partner) in &partition.pairs {
            let (Some(i), Some(j)) = (index(first.frequencies(), y), index(second.frequencies(), partner))
            else {
                continue;
            };
            projection += ((v[i] - v[first.columns() + j]) / std::f64::consts::SQRT_2).norm_sqr();
        }
        report.pair_alignment = Some(projection.sqrt());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_examples() {
        let v = build(&VandermondeSpec::from_values(&[0.0, 0.5], 2).unwrap());
        let expected = [[1.0, 1.0], [1.0, -1.0]];
        for k in 0..2 {
            for j in 0..2 {
                assert!((v[(k, j)] - Complex64::new(expected[k][j], 0.0)).norm() < 1e-15);
            }
        }
        let v = build(&VandermondeSpec::from_values(&[0.37], 5).unwrap());
        assert!(v.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let v = build(&VandermondeSpec::from_values(&[0.1, 0.3, 0.6, 0.9], 41).unwrap());
        assert_eq!(v.shape(), (41, 4));
        for col in v.column_iter() {
            assert!((col.norm() - 41f64.sqrt()).abs() < 1e-12);
        }
        assert!(matches!(
            VandermondeSpec::from_values(&[0.25, 1.25], 3),
            Err(Error::DuplicateFrequency { .. })
        ));
    }

    #[test]
    fn sigma_examples() {
        let v = build(&VandermondeSpec::from_values(&[0.42], 9).unwrap());
        assert!((sigma_min(&v).unwrap() - 3.0).abs() < 1e-13);
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]).map(|x| Complex64::new(x, 0.0));
        assert!((sigma_min(&h).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((sigma_min_dense(&h).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn dft_grid_is_scaled_unitary() {
        for n in [4usize, 16, 37] {
            let values: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
            let v = build(&VandermondeSpec::from_values(&values, n).unwrap());
            assert!((sigma_min(&v).unwrap() - (n as f64).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn verify_examples() {
        let spec = VandermondeSpec::from_values(&[0.1, 0.3, 0.6, 0.9], 41).unwrap();
        let r = verify_separated(&spec, 0.2).unwrap();
        assert!((r.bound - 37.0).abs() < 1e-12);
        assert!(r.holds && r.sigma_min_squared >= 37.0);

        let tau = 1e-3;
        let y = VandermondeSpec::from_values(&[0.2, 0.7], 20).unwrap();
        let yp = VandermondeSpec::from_values(&[0.2 + tau, 0.7 + tau], 20).unwrap();
        let r = verify_pairs(&y, &yp, 0.5).unwrap();
        assert!((r.tau.unwrap() - tau).abs() < 1e-15);
        assert!((r.bound - 1.880_707_949_763_139e-4).abs() < 1e-12);
        assert!(r.holds, "{r:?}");
        assert!(r.pair_alignment.unwrap() > 0.9);

        let yp = VandermondeSpec::from_values(&[0.45, 0.95], 20).unwrap();
        let r = verify_pairs(&y, &yp, 0.25).unwrap();
        assert!((r.bound - 14.0).abs() < 1e-12);
        assert!(r.holds);

        assert!(matches!(
            verify_separated(&spec, 0.25),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            verify_pairs(&y, &yp, 0.1),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn shift_invariance() {
        let base = [0.05, 0.31, 0.33, 0.8];
        let s0 = sigma_min(&build(&VandermondeSpec::from_values(&base, 30).unwrap())).unwrap();
        for s in [0.1, 0.5, 0.977] {
            let shifted: Vec<f64> = base.iter().map(|y| y + s).collect();
            let s1 = sigma_min(&build(&VandermondeSpec::from_values(&shifted, 30).unwrap())).unwrap();
            assert!((s0 - s1).abs() < 1e-10 * s0);
        }
    }
}
