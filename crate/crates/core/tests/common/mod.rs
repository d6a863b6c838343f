//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order as f64;
    (0..order)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if order == 0 { 1.0 } else { p1 };
                dp = n * (x * p - p0) / (x * x - 1.0);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre rule over unit panels of `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: i64, b: i64, rule: &[(f64, f64)]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for left in a..b {
        let mid = left as f64 + 0.5;
        for &(x, w) in rule {
            total += f(mid + 0.5 * x) * (0.5 * w);
        }
    }
    total
}

/// Singular values of a complex matrix given by its columns, from one-sided
/// (Hestenes) Jacobi rotations; sorted descending.
pub fn jacobi_singular_values(mut columns: Vec<Vec<Complex64>>) -> Vec<f64> {
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let m = columns.len();
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..m {
            for j in i + 1..m {
                let alpha = dot(&columns[i], &columns[i]).re;
                let beta = dot(&columns[j], &columns[j]).re;
                let gamma = dot(&columns[i], &columns[j]);
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..columns[i].len() {
                    let a = columns[i][r];
                    let b = columns[j][r] * phase.conj();
                    columns[i][r] = a * c - b * s;
                    columns[j][r] = a * s + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns.iter().map(|c| dot(c, c).re.sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `e^{2πi t}` evaluated directly, independent of the library helper.
pub fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}
