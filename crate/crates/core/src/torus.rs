//! Exponential sums on the torus `T = R/Z`.
//!
//! A sum `f(x) = Σ c_y e^{2πiyx}` is stored as its frequency/coefficient
//! pairs, sorted ascending by the frequency representative in `[0, 1)`.
//! All vectors of coefficients produced by this crate use that order.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the torus, stored as its representative in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct Frequency(f64);

impl Frequency {
    /// Reduces `value` modulo 1.
    pub fn new(value: f64) -> Self {
        let r = value.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        Frequency(if r >= 1.0 { 0.0 } else { r })
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Representative of `other - self` in `[-1/2, 1/2)`.
    pub fn signed_offset(self, other: Frequency) -> f64 {
        let d = other.0 - self.0;
        if d >= 0.5 {
            d - 1.0
        } else if d < -0.5 {
            d + 1.0
        } else {
            d
        }
    }

    pub fn shifted(self, by: f64) -> Self {
        Frequency::new(self.0 + by)
    }
}

impl From<f64> for Frequency {
    fn from(value: f64) -> Self {
        Frequency::new(value)
    }
}

impl From<Frequency> for f64 {
    fn from(f: Frequency) -> f64 {
        f.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Wrap-around distance `min_k |a - b - k|`, a value in `[0, 1/2]`.
pub fn wrap_distance(a: Frequency, b: Frequency) -> f64 {
    let d = (a.0 - b.0).abs();
    d.min(1.0 - d)
}

/// Minimum pairwise wrap distance; `1/2` for sets with fewer than two points.
pub fn separation(frequencies: &[Frequency]) -> f64 {
    if frequencies.len() < 2 {
        return 0.5;
    }
    let mut sorted: Vec<f64> = frequencies.iter().map(|f| f.0).collect();
    sorted.sort_by(f64::total_cmp);
    let wrap_gap = sorted[0] + 1.0 - sorted[sorted.len() - 1];
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(wrap_gap.min(0.5), f64::min)
}

/// `e^{2πi t}` with `t` reduced to its fractional part first.
pub(crate) fn cis_turns(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t.fract())
}

/// Contiguous integer sampling range `start, start+1, ..., end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct SampleGrid {
    start: i64,
    end: i64,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    start: i64,
    end: i64,
}

impl TryFrom<GridRepr> for SampleGrid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        SampleGrid::new(r.start, r.end)
    }
}

impl From<SampleGrid> for GridRepr {
    fn from(g: SampleGrid) -> Self {
        GridRepr {
            start: g.start,
            end: g.end,
        }
    }
}

impl SampleGrid {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidGrid { start, end });
        }
        Ok(SampleGrid { start, end })
    }

    /// The grid `-n, ..., n`.
    pub fn symmetric(n: usize) -> Result<Self> {
        let n = n as i64;
        SampleGrid::new(-n, n)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + Clone {
        self.start..=self.end
    }
}

/// A finite exponential sum with nonzero coefficients and distinct frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SumRepr", into = "SumRepr")]
pub struct ExponentialSum {
    terms: Vec<(Frequency, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct SumRepr {
    frequencies: Vec<f64>,
    coefficients: Vec<[f64; 2]>,
}

impl TryFrom<SumRepr> for ExponentialSum {
    type Error = Error;
    fn try_from(r: SumRepr) -> Result<Self> {
        if r.frequencies.len() != r.coefficients.len() {
            return Err(Error::InvalidInput(format!(
                "{} frequencies but {} coefficients",
                r.frequencies.len(),
                r.coefficients.len()
            )));
        }
        ExponentialSum::new(
            r.frequencies
                .into_iter()
                .zip(r.coefficients)
                .map(|(y, [re, im])| (y, Complex64::new(re, im))),
        )
    }
}

impl From<ExponentialSum> for SumRepr {
    fn from(s: ExponentialSum) -> Self {
        SumRepr {
            frequencies: s.terms.iter().map(|(y, _)| y.0).collect(),
            coefficients: s.terms.iter().map(|(_, c)| [c.re, c.im]).collect(),
        }
    }
}

impl ExponentialSum {
    /// Builds a sum from `(frequency, coefficient)` pairs; frequencies are
    /// reduced modulo 1 and sorted.
    pub fn new<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Complex64)>,
    {
        let mut terms: Vec<(Frequency, Complex64)> = terms
            .into_iter()
            .map(|(y, c)| (Frequency::new(y), c))
            .collect();
        for (y, c) in &terms {
            if *c == Complex64::new(0.0, 0.0) || !c.is_finite() || !y.0.is_finite() {
                return Err(Error::ZeroCoefficient { frequency: y.0 });
            }
        }
        terms.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0));
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateFrequency {
                frequency: w[0].0 .0,
            });
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput("exponential sum has no terms".into()));
        }
        Ok(ExponentialSum { terms })
    }

    pub fn from_parts(frequencies: &[f64], coefficients: &[Complex64]) -> Result<Self> {
        if frequencies.len() != coefficients.len() {
            return Err(Error::InvalidInput(
                "frequency and coefficient counts differ".into(),
            ));
        }
        ExponentialSum::new(frequencies.iter().copied().zip(coefficients.iter().copied()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Frequency, Complex64)] {
        &self.terms
    }

    pub fn frequencies(&self) -> Vec<Frequency> {
        self.terms.iter().map(|(y, _)| *y).collect()
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.terms.iter().map(|(_, c)| *c).collect()
    }

    pub fn coefficient(&self, y: Frequency) -> Option<Complex64> {
        self.terms
            .binary_search_by(|(f, _)| f.0.total_cmp(&y.0))
            .ok()
            .map(|i| self.terms[i].1)
    }

    /// `‖c‖₂²`.
    pub fn coefficient_norm_sq(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn min_modulus(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, c)| c.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn separation(&self) -> f64 {
        separation(&self.frequencies())
    }

    /// Evaluates `f(x)` at a real point.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(y, c)| c * cis_turns(y.0 * x))
            .sum()
    }

    /// Evaluates `f(k)` at an integer; the phase `y·k` is reduced exactly
    /// enough for the grids used here (|k| far below 2^40).
    pub fn eval_int(&self, k: i64) -> Complex64 {
        self.eval(k as f64)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        ExponentialSum::new(self.terms.iter().map(|(y, c)| (y.0, c * factor)))
    }

    /// The sum of `self` and `other`; equal frequencies are merged and
    /// cancelling terms dropped.
    pub fn combined(&self, other: &ExponentialSum, other_sign: f64) -> Option<Self> {
        let mut terms: Vec<(f64, Complex64)> =
            self.terms.iter().map(|(y, c)| (y.0, *c)).collect();
        for (y, c) in &other.terms {
            let c = c * other_sign;
            match terms.iter_mut().find(|(f, _)| *f == y.0) {
                Some(entry) => entry.1 += c,
                None => terms.push((y.0, c)),
            }
        }
        terms.retain(|(_, c)| c.norm() > 0.0);
        ExponentialSum::new(terms).ok()
    }
}

/// Samples of `f` on the grid, in grid order.
pub fn sample(f: &ExponentialSum, grid: &SampleGrid) -> Vec<Complex64> {
    grid.iter().map(|k| f.eval_int(k)).collect()
}

/// Samples of `f` at arbitrary real points.
pub fn sample_points(f: &ExponentialSum, points: &[f64]) -> Vec<Complex64> {
    points.iter().map(|&x| f.eval(x)).collect()
}

/// `Σ_{k=A}^{B} |f(k)|²`.
pub fn energy(f: &ExponentialSum, grid: &SampleGrid) -> f64 {
    grid.iter().map(|k| f.eval_int(k).norm_sqr()).sum()
}

/// `Σ_k |f(x_k)|²` over arbitrary points.
pub fn energy_at(f: &ExponentialSum, points: &[f64]) -> f64 {
    points.iter().map(|&x| f.eval(x).norm_sqr()).sum()
}

/// Which input set an unmatched frequency came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    First,
    Second,
}

/// The decomposition of two frequency sets into matched pairs (`Y₁` with
/// partners `Y₂`) and unmatched points (`Y₃`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchPartition {
    pub pairs: Vec<(Frequency, Frequency)>,
    pub unmatched: Vec<(Frequency, Origin)>,
    pub threshold: f64,
}

impl MatchPartition {
    pub fn is_total(&self) -> bool {
        self.unmatched.is_empty()
    }

    /// Partner `n(y)` of a first-set frequency.
    pub fn partner(&self, y: Frequency) -> Option<Frequency> {
        self.pairs.iter().find(|(a, _)| *a == y).map(|(_, b)| *b)
    }
}

/// Pairs each `y ∈ first` with the unique `y' ∈ second` at wrap distance
/// strictly below `threshold`. Points without a candidate are unmatched;
/// two or more candidates on either side is an error.
pub fn match_partition(
    first: &[Frequency],
    second: &[Frequency],
    threshold: f64,
) -> Result<MatchPartition> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let candidates = |y: Frequency, others: &[Frequency]| -> Vec<Frequency> {
        others
            .iter()
            .copied()
            .filter(|o| wrap_distance(y, *o) < threshold)
            .collect()
    };
    for (set, others) in [(first, second), (second, first)] {
        for &y in set {
            let c = candidates(y, others);
            if c.len() >= 2 {
                return Err(Error::AmbiguousMatch {
                    frequency: y.0,
                    candidates: c.len(),
                    threshold,
                });
            }
        }
    }

    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for &y in first {
        match candidates(y, second).first() {
            Some(&p) => pairs.push((y, p)),
            None => unmatched.push((y, Origin::First)),
        }
    }
    for &y in second {
        if candidates(y, first).is_empty() {
            unmatched.push((y, Origin::Second));
        }
    }
    Ok(MatchPartition {
        pairs,
        unmatched,
        threshold,
    })
}
