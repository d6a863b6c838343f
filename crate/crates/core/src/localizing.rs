//! The localizing minorant `φ ≤ χ_[0,3]`, its Fourier transform and dilations.
//!
//! `φ` is band-limited (`supp φ̂ ⊂ [-1, 1]`), lies below the indicator of
//! `[0, 3]`, and has `φ̂(0) = 2` with `|φ̂|` maximal at the origin. It is the
//! Hermite interpolant on the integers of the data
//!
//! | k | φ(k) | φ'(k) |
//! |---|------|-------|
//! | 0 | 0    | 2/3   |
//! | 1 | 1    | 0     |
//! | 2 | 1    | 0     |
//! | 3 | 0    | -2/3  |
//!
//! and vanishes (with its derivative) at every other integer.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NODE_WINDOW: f64 = 1e-4;

/// Value and derivative of a band-limited function at an integer node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteNodeData {
    pub node: i64,
    pub value: f64,
    pub derivative: f64,
}

/// The nodal data that reproduces `φ`.
pub fn phi_hermite_nodes() -> [HermiteNodeData; 4] {
    [
        HermiteNodeData { node: 0, value: 0.0, derivative: 2.0 / 3.0 },
        HermiteNodeData { node: 1, value: 1.0, derivative: 0.0 },
        HermiteNodeData { node: 2, value: 1.0, derivative: 0.0 },
        HermiteNodeData { node: 3, value: 0.0, derivative: -2.0 / 3.0 },
    ]
}

/// `sin(πt)`, exactly zero at integers.
fn sin_pi(t: f64) -> f64 {
    let k = t.round();
    let s = (PI * (t - k)).sin();
    if k.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        sin_pi(t) / (PI * t)
    }
}

/// `sin²(πx)/π² · (f(k)/(x-k)² + f'(k)/(x-k))` summed over the nodes,
/// written with `sin²(πx) = sin²(π(x-k))`.
pub fn jagerman_fogel_eval(nodes: &[HermiteNodeData], x: f64) -> f64 {
    nodes
        .iter()
        .map(|n| {
            let t = x - n.node as f64;
            let s = sinc(t);
            n.value * s * s + n.derivative * s * sin_pi(t) / PI
        })
        .sum()
}

/// `φ(x) = sin²(πx)/π² · (⅔(1/x − 1/(x−3)) + 1/(x−1)² + 1/(x−2)²)`.
///
/// Away from the nodes the bracket is evaluated as `-(3u+8)/(u(u+2)²)`
/// with `u = x(x-3)` and `u+2 = (x-1)(x-2)`, which has no cancellation
/// for large `|x|` or near the nodes.
pub fn phi(x: f64) -> f64 {
    if (0..=3).any(|k| (x - k as f64).abs() < NODE_WINDOW) {
        return jagerman_fogel_eval(&phi_hermite_nodes(), x);
    }
    let s = (PI * (x - x.round())).sin();
    let u = x * (x - 3.0);
    let v = (x - 1.0) * (x - 2.0);
    s * s / (PI * PI) * (-(3.0 * u + 8.0) / (u * v * v))
}

/// `e^{3πiw} φ̂(w)` for `w ∈ [0, 1]`; real, so `|φ̂(w)| = |R(w)|`.
fn phi_hat_real_part(w: f64) -> f64 {
    2.0 * (1.0 - w) * (PI * w).cos() + 2.0 / (3.0 * PI) * (3.0 * PI * w).sin()
}

/// Closed-form Fourier transform `φ̂(w) = ∫ φ(x) e^{-2πixw} dx`.
pub fn phi_hat(w: f64) -> Complex64 {
    if w.abs() >= 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    if w < 0.0 {
        return phi_hat(-w).conj();
    }
    let e = |t: f64| Complex64::from_polar(1.0, -2.0 * PI * t);
    let first = (1.0 - w) * (e(w) + e(2.0 * w));
    let second = (Complex64::new(1.0, 0.0) - e(3.0 * w)) / Complex64::new(0.0, 3.0 * PI);
    first + second
}

/// `φ̂(0) − |φ̂(w)|` for `|w| ≤ 1`.
pub fn phi_hat_gap(w: f64) -> Result<f64> {
    let w = w.abs();
    if w > 1.0 || w.is_nan() {
        return Err(Error::Domain {
            operation: "phi_hat_gap",
            value: w,
        });
    }
    let r = phi_hat_real_part(w);
    if r >= 0.0 {
        // 2 − R(w) with the O(1) part cancelled analytically
        let half = (0.5 * PI * w).sin();
        Ok(4.0 * half * half + 2.0 * w * (PI * w).cos()
            - 2.0 / (3.0 * PI) * (3.0 * PI * w).sin())
    } else {
        Ok(2.0 + r)
    }
}

/// `φ_N(x) = φ(3x/(N+1))`, localizing to `[0, N+1]`, with
/// `φ̂_N(w) = (N+1)/3 · φ̂((N+1)w/3)` supported in `[-3/(N+1), 3/(N+1)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilatedLocalizer {
    n_param: usize,
}

impl DilatedLocalizer {
    pub fn new(n_param: usize) -> Result<Self> {
        if n_param == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        Ok(DilatedLocalizer { n_param })
    }

    pub fn n_param(&self) -> usize {
        self.n_param
    }

    fn stretch(&self) -> f64 {
        (self.n_param + 1) as f64 / 3.0
    }

    /// Half-width `3/(N+1)` of the Fourier support.
    pub fn support_radius(&self) -> f64 {
        3.0 / (self.n_param + 1) as f64
    }

    pub fn phi(&self, x: f64) -> f64 {
        phi(x / self.stretch())
    }

    pub fn phi_hat(&self, w: f64) -> Complex64 {
        self.stretch() * phi_hat(self.stretch() * w)
    }

    /// `Σ_m φ̂_N(u + m)`, the kernel seen by integer samples.
    pub fn periodized_hat(&self, u: f64) -> Complex64 {
        let r = self.support_radius();
        let lo = (-u - r).floor() as i64;
        let hi = (-u + r).ceil() as i64;
        (lo..=hi).map(|m| self.phi_hat(u + m as f64)).sum()
    }

    /// Principal argument of `φ̂_N(w)` for `0 < |w| < 3/(N+1)`; zero at `w = 0`.
    pub fn phase_theta(&self, w: f64) -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        if !(w.abs() < self.support_radius()) {
            return Err(Error::Domain {
                operation: "phase_theta",
                value: w,
            });
        }
        Ok(self.phi_hat(w).arg())
    }
}
