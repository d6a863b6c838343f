//! Lower (and upper) bounds on sampled energy, as computable right-hand
//! sides, plus checkers that compare them against exact sums.
//!
//! Every check produces a [`BoundReport`]. The inequalities are proven, so
//! `holds == false` always means either a violated precondition that slipped
//! through or an implementation bug; the only tolerance is a relative
//! floating-point guard of `1e-12`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localizing::DilatedLocalizer;
use crate::torus::{
    cis_turns, energy, match_partition, separation, wrap_distance, ExponentialSum, Frequency,
    MatchPartition, Origin, SampleGrid,
};

/// Relative slack allowed before an inequality is reported as failing.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Relative slack used when comparing a separation against a required value.
pub(crate) const SEPARATION_TOLERANCE: f64 = 1e-12;

pub(crate) fn at_least(value: f64, required: f64) -> bool {
    value >= required * (1.0 - SEPARATION_TOLERANCE)
}

fn within_tolerance(slack: f64, scale: f64) -> bool {
    slack >= -RELATIVE_TOLERANCE * scale.abs().max(1.0)
}

/// One inequality instance `lhs ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub constants: BTreeMap<String, f64>,
    pub holds: bool,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64, constants: BTreeMap<String, f64>) -> Self {
        let slack = lhs - rhs;
        BoundReport {
            lhs,
            rhs,
            slack,
            constants,
            holds: within_tolerance(slack, lhs),
        }
    }

    pub const CSV_HEADER: &'static str = "lhs,rhs,slack,holds";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.lhs, self.rhs, self.slack, self.holds)
    }
}

/// `(B−A+2−1/q, B−A+1/q)`, the lower constant clamped at zero.
pub fn wellsep_constants(grid: &SampleGrid, q: f64) -> Result<(f64, f64)> {
    let (lower, upper) = wellsep_constants_raw(grid, q)?;
    Ok((lower.max(0.0), upper))
}

fn wellsep_constants_raw(grid: &SampleGrid, q: f64) -> Result<(f64, f64)> {
    if !(q > 0.0) {
        return Err(Error::InvalidInput(format!("q must be positive, got {q}")));
    }
    let width = (grid.end() - grid.start()) as f64;
    // (span·q − 1)/q is exactly zero at q = 1/span for small spans
    let span = width + 2.0;
    let lower = (span * q - 1.0) / q;
    let upper = width + 1.0 / q;
    Ok((lower, upper))
}

/// Two-sided check `lower·‖c‖² ≤ Σ_{k=A}^{B}|f(k)|² ≤ upper·‖c‖²` for a
/// `q`-separated sum. The report's `lhs`/`rhs` carry the lower inequality;
/// the upper one lives in `constants` (`upper_bound`, `upper_slack`).
pub fn check_wellsep(f: &ExponentialSum, grid: &SampleGrid, q: f64) -> Result<BoundReport> {
    let (raw_lower, upper) = wellsep_constants_raw(grid, q)?;
    let sep = f.separation();
    if !is_separated(&f.frequencies(), q) {
        return Err(Error::SeparationViolated {
            separation: sep,
            required: q,
        });
    }
    let norm_sq = f.coefficient_norm_sq();
    let lhs = energy(f, grid);
    let lower = raw_lower.max(0.0);
    let upper_bound = upper * norm_sq;
    let upper_slack = upper_bound - lhs;
    let width = (grid.end() - grid.start()) as f64;

    let mut constants = BTreeMap::new();
    constants.insert("q".into(), q);
    constants.insert("lower_constant".into(), lower);
    constants.insert("upper_constant".into(), upper);
    constants.insert("coefficient_norm_sq".into(), norm_sq);
    constants.insert("upper_bound".into(), upper_bound);
    constants.insert("upper_slack".into(), upper_slack);
    constants.insert("vacuous".into(), if raw_lower <= 0.0 { 1.0 } else { 0.0 });
    constants.insert("moitra_constant".into(), width - 1.0 / q);
    constants.insert("aubel_bolcskei_constant".into(), width + 1.5 - 1.0 / q);

    let mut report = BoundReport::new(lhs, lower * norm_sq, constants);
    report.holds = report.holds && within_tolerance(upper_slack, upper_bound);
    Ok(report)
}

/// Form of the pair-collision lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MainBoundVariant {
    /// Samples `k = 1..N`, pair coefficients rotated by the phase of `φ̂_N`.
    Modulated,
    /// Samples `k = 1..N`, bound independent of coefficient phases.
    Weakened,
    /// Samples `k − (N+1)/2`, `k = 1..N`, no rotation.
    Symmetric,
}

impl MainBoundVariant {
    pub const ALL: [MainBoundVariant; 3] = [
        MainBoundVariant::Modulated,
        MainBoundVariant::Weakened,
        MainBoundVariant::Symmetric,
    ];

    /// The points at which the variant samples, given `N` samples.
    pub fn sample_points(self, n: usize) -> Vec<f64> {
        let shift = match self {
            MainBoundVariant::Symmetric => (n as f64 + 1.0) / 2.0,
            _ => 0.0,
        };
        (1..=n).map(|k| k as f64 - shift).collect()
    }
}

/// Pair threshold `3/(N+1)`.
pub fn collision_threshold(n: usize) -> f64 {
    3.0 / (n as f64 + 1.0)
}

fn pair_diff_weight(n: usize) -> f64 {
    let m = n as f64 + 1.0;
    PI * PI * m * m * m / (2.0 * 243.0)
}

fn lookup(first: &ExponentialSum, second: &ExponentialSum, y: Frequency, origin: Origin) -> Result<Complex64> {
    let sum = match origin {
        Origin::First => first,
        Origin::Second => second,
    };
    sum.coefficient(y)
        .ok_or_else(|| Error::InvalidInput(format!("frequency {y} is not part of the sum")))
}

fn check_threshold(partition: &MatchPartition, n: usize) -> Result<f64> {
    let required = collision_threshold(n);
    if (partition.threshold - required).abs() > 1e-12 * required {
        return Err(Error::ThresholdMismatch {
            found: partition.threshold,
            required,
        });
    }
    Ok(required)
}

/// Right-hand side of the pair-collision bound together with its constants.
pub fn main_bound_terms(
    partition: &MatchPartition,
    first: &ExponentialSum,
    second: &ExponentialSum,
    n: usize,
    variant: MainBoundVariant,
) -> Result<(f64, BTreeMap<String, f64>)> {
    let threshold = check_threshold(partition, n)?;
    let loc = DilatedLocalizer::new(n)?;
    let m = n as f64 + 1.0;
    let single_weight = 2.0 * m / 3.0;
    let sum_weight = m / 3.0;
    let diff_weight = pair_diff_weight(n);

    let mut rhs = 0.0;
    for &(y, origin) in &partition.unmatched {
        rhs += single_weight * lookup(first, second, y, origin)?.norm_sqr();
    }
    for &(y, partner) in &partition.pairs {
        let cy = lookup(first, second, y, Origin::First)?;
        let cn = lookup(first, second, partner, Origin::Second)?;
        let offset = y.signed_offset(partner);
        let gap_sq = offset * offset;
        rhs += match variant {
            MainBoundVariant::Modulated => {
                let kernel = loc.periodized_hat(offset);
                let theta = if kernel.norm() > 0.0 { kernel.arg() } else { 0.0 };
                let rotated = cn * Complex64::from_polar(1.0, -theta);
                sum_weight * (cy + rotated).norm_sqr()
                    + diff_weight * gap_sq * (cy - rotated).norm_sqr()
            }
            MainBoundVariant::Weakened => diff_weight * gap_sq * (cy.norm_sqr() + cn.norm_sqr()),
            MainBoundVariant::Symmetric => {
                sum_weight * (cy + cn).norm_sqr() + diff_weight * gap_sq * (cy - cn).norm_sqr()
            }
        };
    }

    let mut constants = BTreeMap::new();
    constants.insert("N".into(), n as f64);
    constants.insert("threshold".into(), threshold);
    constants.insert("Y3_weight".into(), single_weight);
    constants.insert("pair_sum_weight".into(), sum_weight);
    constants.insert("pair_diff_weight".into(), diff_weight);
    Ok((rhs, constants))
}

pub fn main_bound_rhs(
    partition: &MatchPartition,
    first: &ExponentialSum,
    second: &ExponentialSum,
    n: usize,
    variant: MainBoundVariant,
) -> Result<f64> {
    main_bound_terms(partition, first, second, n, variant).map(|(rhs, _)| rhs)
}

/// Checks the pair-collision bound for the signal `first + second`, whose
/// frequencies are decomposed by `partition`.
pub fn check_main_bound(
    first: &ExponentialSum,
    second: &ExponentialSum,
    partition: &MatchPartition,
    n: usize,
    variant: MainBoundVariant,
) -> Result<BoundReport> {
    let threshold = check_threshold(partition, n)?;
    for set in [first, second] {
        let sep = set.separation();
        if !is_separated(&set.frequencies(), threshold) {
            return Err(Error::SeparationViolated {
                separation: sep,
                required: threshold,
            });
        }
    }
    let count = |o: Origin| partition.unmatched.iter().filter(|(_, u)| *u == o).count();
    if partition.pairs.len() + count(Origin::First) != first.len()
        || partition.pairs.len() + count(Origin::Second) != second.len()
    {
        return Err(Error::InvalidInput(
            "partition does not cover both frequency sets".into(),
        ));
    }
    if first.terms().iter().any(|(y, _)| second.coefficient(*y).is_some()) {
        return Err(Error::ModelViolation(
            "paired sets must not share a frequency".into(),
        ));
    }
    let lhs = paired_energy(first, second, partition, &variant.sample_points(n));
    let (rhs, constants) = main_bound_terms(partition, first, second, n, variant)?;
    Ok(BoundReport::new(lhs, rhs, constants))
}

/// `Σ_x |first(x) + second(x)|²` with each partner taken at its unwrapped
/// offset from its match, which matters at half-integer points.
fn paired_energy(first: &ExponentialSum, second: &ExponentialSum, partition: &MatchPartition, points: &[f64]) -> f64 {
    let mut terms: Vec<(f64, Complex64)> = first.terms().iter().map(|(y, c)| (y.value(), *c)).collect();
    for (yp, c) in second.terms() {
        let rep = match partition.pairs.iter().find(|(_, partner)| partner == yp) {
            Some((y, _)) => y.value() + y.signed_offset(*yp),
            None => yp.value(),
        };
        terms.push((rep, *c));
    }
    points
        .iter()
        .map(|&x| {
            terms
                .iter()
                .map(|(y, c)| c * cis_turns(y * x))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum()
}

/// Builds the partition at `3/(N+1)` and checks the bound.
pub fn main_bound_report(
    first: &ExponentialSum,
    second: &ExponentialSum,
    n: usize,
    variant: MainBoundVariant,
) -> Result<BoundReport> {
    let partition = match_partition(&first.frequencies(), &second.frequencies(), collision_threshold(n))?;
    check_main_bound(first, second, &partition, n, variant)
}

/// `Σ_{y,y'} c_y conj(c_{y'}) Σ_m φ̂_N(y' − y + m)`, which equals
/// `Σ_{k∈Z} φ_N(k)|f(k)|²` by Poisson summation.
pub fn localized_energy(f: &ExponentialSum, n: usize) -> Result<f64> {
    let loc = DilatedLocalizer::new(n)?;
    let terms = f.terms();
    let mut total = Complex64::new(0.0, 0.0);
    for (y, cy) in terms {
        for (yp, cp) in terms {
            total += cy * cp.conj() * loc.periodized_hat(y.signed_offset(*yp));
        }
    }
    Ok(total.re)
}

/// `Σ_{y∈Y^f} [(N+1)/3 |c_y − c_{n(y)}|² + 2π²(N+1)³/3⁵ |y − n(y)|² |c_y + c_{n(y)}|²]`
/// for a matching of `f` (first) against `g` (second).
pub fn weighted_frequency_error(
    matching: &MatchPartition,
    f: &ExponentialSum,
    g: &ExponentialSum,
    n: usize,
) -> Result<f64> {
    if !matching.unmatched.is_empty() {
        return Err(Error::UnmatchedFrequencies {
            count: matching.unmatched.len(),
        });
    }
    let m = n as f64 + 1.0;
    let coefficient_weight = m / 3.0;
    let frequency_weight = 2.0 * PI * PI * m * m * m / 243.0;
    let mut total = 0.0;
    for &(y, partner) in &matching.pairs {
        let cy = lookup(f, g, y, Origin::First)?;
        let cn = lookup(f, g, partner, Origin::Second)?;
        let d = wrap_distance(y, partner);
        total += coefficient_weight * (cy - cn).norm_sqr()
            + frequency_weight * d * d * (cy + cn).norm_sqr();
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    PremiseFailed,
}

/// Outcome of the conditional well-posedness check for two sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellPosednessCertificate {
    /// `Σ_{k=−N}^{N} |f(k) − g(k)|²`.
    pub premise_value: f64,
    /// `(4N+4)/3 · c_min²`.
    pub premise_threshold: f64,
    pub premise_holds: bool,
    pub c_min: f64,
    /// Matching at `3/(2N+2)`; always present when certified.
    pub matching: Option<MatchPartition>,
    pub weighted_error: Option<f64>,
    /// Whether `weighted_error ≤ premise_value`.
    pub estimate_holds: Option<bool>,
    pub verdict: Verdict,
}

/// Pair threshold `3/(2N+2)` for the symmetric grid `−N..N`.
pub fn symmetric_threshold(n: usize) -> f64 {
    3.0 / (2.0 * n as f64 + 2.0)
}

pub(crate) fn check_model(f: &ExponentialSum, g: &ExponentialSum, n: usize, q: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::ModelViolation("N must be positive".into()));
    }
    let required_q = symmetric_threshold(n);
    if !at_least(q, required_q) {
        return Err(Error::ModelViolation(format!(
            "q = {q} is below 3/(2N+2) = {required_q}"
        )));
    }
    for (name, s) in [("f", f), ("g", g)] {
        let sep = s.separation();
        if !is_separated(&s.frequencies(), 2.0 * q) {
            return Err(Error::ModelViolation(format!(
                "separation of {name} is {sep}, below 2q = {}",
                2.0 * q
            )));
        }
    }
    Ok(())
}

/// Matching of `f` against `g` at `3/(2N+2)` and the weighted error, when
/// the matching is total.
pub(crate) fn matched_error(
    f: &ExponentialSum,
    g: &ExponentialSum,
    n: usize,
) -> Result<(MatchPartition, Option<f64>)> {
    let matching = match_partition(&f.frequencies(), &g.frequencies(), symmetric_threshold(n))?;
    let error = if matching.is_total() {
        Some(weighted_frequency_error(&matching, f, g, n)?)
    } else {
        None
    };
    Ok((matching, error))
}

pub fn wellposedness_certificate(
    f: &ExponentialSum,
    g: &ExponentialSum,
    n: usize,
    q: f64,
) -> Result<WellPosednessCertificate> {
    check_model(f, g, n, q)?;
    let grid = SampleGrid::symmetric(n)?;
    let premise_value: f64 = grid
        .iter()
        .map(|k| (f.eval_int(k) - g.eval_int(k)).norm_sqr())
        .sum();
    let c_min = f.min_modulus().min(g.min_modulus());
    let premise_threshold = (4.0 * n as f64 + 4.0) / 3.0 * c_min * c_min;
    let premise_holds = premise_value < premise_threshold;

    let matched = matched_error(f, g, n);
    let (matching, weighted_error) = match matched {
        Ok((m, e)) => (Some(m), e),
        Err(e) if premise_holds => return Err(e),
        Err(_) => (None, None),
    };
    if premise_holds && weighted_error.is_none() {
        let count = matching.as_ref().map_or(0, |m| m.unmatched.len());
        return Err(Error::UnmatchedFrequencies { count });
    }
    let estimate_holds = weighted_error.map(|e| within_tolerance(premise_value - e, premise_value));
    Ok(WellPosednessCertificate {
        premise_value,
        premise_threshold,
        premise_holds,
        c_min,
        matching,
        weighted_error,
        estimate_holds,
        verdict: if premise_holds {
            Verdict::Certified
        } else {
            Verdict::PremiseFailed
        },
    })
}

/// `max(0, N+1−1/q)`, a lower bound on `σ_min²` of an `N`-row Vandermonde
/// matrix with `q`-separated nodes.
pub fn vandermonde_bound_separated(n: usize, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidInput(format!("q must be positive, got {q}")));
    }
    Ok(((n as f64 + 1.0) * q - 1.0).max(0.0) / q)
}

/// Lower bound on `σ_min²` for two `q`-separated node sets colliding in
/// pairs at minimal distance `tau`.
pub fn vandermonde_bound_pairs(n: usize, q: f64, tau: f64) -> Result<f64> {
    let threshold = collision_threshold(n);
    if !at_least(q, threshold) {
        return Err(Error::PreconditionViolated(format!(
            "q = {q} is below 3/(N+1) = {threshold}"
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::PreconditionViolated(format!("tau = {tau} is negative")));
    }
    if tau < threshold {
        Ok(pair_diff_weight(n) * tau * tau)
    } else {
        Ok(2.0 * (n as f64 + 1.0) / 3.0)
    }
}

/// Whether every point of `set` is at least `q` away from the others (up to
/// the relative separation tolerance). Sets with at most one point qualify
/// for every `q`.
pub fn is_separated(set: &[Frequency], q: f64) -> bool {
    set.len() <= 1 || at_least(separation(set), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::sample;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model_sum() -> ExponentialSum {
        ExponentialSum::from_parts(
            &[0.1, 0.3, 0.6, 0.9],
            &[c(1.1, 0.0), c(-1.1, 0.0), c(2.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn wellsep_constant_examples() {
        let g = SampleGrid::new(0, 20).unwrap();
        let (l, u) = wellsep_constants(&g, 0.2).unwrap();
        assert!((l - 17.0).abs() < 1e-12 && (u - 25.0).abs() < 1e-12);
        let (l, u) = wellsep_constants(&g, 1.0 / 22.0).unwrap();
        assert_eq!(l, 0.0);
        assert!((u - 42.0).abs() < 1e-12);
        let (l, u) = wellsep_constants(&SampleGrid::new(0, 1).unwrap(), 0.5).unwrap();
        assert_eq!((l, u), (1.0, 3.0));
        assert!(wellsep_constants(&g, 0.0).is_err());
    }

    #[test]
    fn check_wellsep_examples() {
        let f = ExponentialSum::new([(0.3, c(1.0, 0.0))]).unwrap();
        let r = check_wellsep(&f, &SampleGrid::new(0, 20).unwrap(), 0.5).unwrap();
        assert!((r.lhs - 21.0).abs() < 1e-12);
        assert!((r.rhs - 20.0).abs() < 1e-12);
        assert!((r.constants["upper_bound"] - 22.0).abs() < 1e-12);
        assert!(r.holds);

        let r = check_wellsep(&model_sum(), &SampleGrid::symmetric(20).unwrap(), 0.2).unwrap();
        assert!(r.holds);
        assert!(r.lhs >= r.rhs && r.lhs <= r.constants["upper_bound"]);

        assert!(matches!(
            check_wellsep(&model_sum(), &SampleGrid::symmetric(20).unwrap(), 0.25),
            Err(Error::SeparationViolated { .. })
        ));
    }

    #[test]
    fn main_bound_single_frequency() {
        let f = ExponentialSum::new([(0.4, c(1.0, 0.0))]).unwrap();
        let empty_second = ExponentialSum::new([(0.9, c(1e-300, 0.0))]).unwrap();
        for variant in MainBoundVariant::ALL {
            let p = MatchPartition {
                pairs: vec![],
                unmatched: vec![(Frequency::new(0.4), Origin::First)],
                threshold: collision_threshold(20),
            };
            let rhs = main_bound_rhs(&p, &f, &empty_second, 20, variant).unwrap();
            assert!((rhs - 14.0).abs() < 1e-12);
        }
        let r = main_bound_report(&f, &ExponentialSum::new([(0.9, c(1e-9, 0.0))]).unwrap(), 20, MainBoundVariant::Weakened).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn main_bound_pair_examples() {
        let tau = 1e-3;
        let first = ExponentialSum::new([(0.0, c(1.0, 0.0))]).unwrap();
        let second = ExponentialSum::new([(tau, c(-1.0, 0.0))]).unwrap();
        let r = main_bound_report(&first, &second, 20, MainBoundVariant::Weakened).unwrap();
        // π²·21³/486 · 2τ², 40-digit reference
        assert!((r.rhs - 3.761_415_899_526_278e-4).abs() < 1e-17);
        assert!((r.lhs - 0.113_209_236_527_015_3).abs() < 1e-12);
        assert!(r.holds);

        let second = ExponentialSum::new([(tau, c(1.0, 0.0))]).unwrap();
        let r = main_bound_report(&first, &second, 20, MainBoundVariant::Symmetric).unwrap();
        assert!((r.rhs - 28.0).abs() < 1e-3);
        assert!((r.lhs - 80.0).abs() < 0.05);
        assert!(r.holds);
    }

    #[test]
    fn threshold_mismatch() {
        let f = ExponentialSum::new([(0.4, c(1.0, 0.0))]).unwrap();
        let g = ExponentialSum::new([(0.41, c(1.0, 0.0))]).unwrap();
        let p = match_partition(&f.frequencies(), &g.frequencies(), 0.1).unwrap();
        assert!(matches!(
            main_bound_rhs(&p, &f, &g, 20, MainBoundVariant::Weakened),
            Err(Error::ThresholdMismatch { .. })
        ));
    }

    #[test]
    fn modulated_phase_matches_phase_theta() {
        let loc = DilatedLocalizer::new(20).unwrap();
        for w in [-0.1, -0.01, 0.003, 0.05, 0.13] {
            assert_eq!(loc.periodized_hat(w).arg(), loc.phase_theta(w).unwrap());
        }
    }

    #[test]
    fn poisson_form_matches_localized_samples() {
        let f = ExponentialSum::from_parts(
            &[0.1, 0.13, 0.5, 0.77],
            &[c(1.0, 0.5), c(-0.7, 0.2), c(0.3, -1.0), c(2.0, 0.0)],
        )
        .unwrap();
        let n = 20;
        let loc = DilatedLocalizer::new(n).unwrap();
        let direct: f64 = (-200_000i64..=200_000)
            .map(|k| loc.phi(k as f64) * f.eval_int(k).norm_sqr())
            .sum();
        let form = localized_energy(&f, n).unwrap();
        assert!((direct - form).abs() < 1e-6, "{direct} vs {form}");
        assert!(form <= crate::torus::energy(&f, &SampleGrid::new(1, n as i64).unwrap()));
    }

    #[test]
    fn weighted_error_examples() {
        let f = model_sum();
        let m = match_partition(&f.frequencies(), &f.frequencies(), symmetric_threshold(20)).unwrap();
        assert_eq!(weighted_frequency_error(&m, &f, &f, 20).unwrap(), 0.0);

        let tau = 1e-3;
        let a = ExponentialSum::new([(0.2, c(1.0, 0.0))]).unwrap();
        let b = ExponentialSum::new([(0.2 + tau, c(1.0, 0.0))]).unwrap();
        let m = match_partition(&a.frequencies(), &b.frequencies(), 0.05).unwrap();
        let expected = 2.0 * PI * PI * 21f64.powi(3) / 243.0 * tau * tau * 4.0;
        let got = weighted_frequency_error(&m, &a, &b, 20).unwrap();
        assert!((got - expected).abs() < 1e-9 * expected);

        let eps = 0.01;
        let b = ExponentialSum::new([(0.2, c(1.0 + eps, 0.0))]).unwrap();
        let m = match_partition(&a.frequencies(), &b.frequencies(), 0.05).unwrap();
        let got = weighted_frequency_error(&m, &a, &b, 20).unwrap();
        assert!((got - 7.0 * eps * eps).abs() < 1e-14);

        let lonely = MatchPartition {
            pairs: vec![],
            unmatched: vec![(Frequency::new(0.2), Origin::First)],
            threshold: 0.05,
        };
        assert!(matches!(
            weighted_frequency_error(&lonely, &a, &b, 20),
            Err(Error::UnmatchedFrequencies { count: 1 })
        ));
    }

    #[test]
    fn wellposedness_examples() {
        let f = model_sum();
        let q = symmetric_threshold(20);
        let cert = wellposedness_certificate(&f, &f, 20, q).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.premise_value, 0.0);
        assert_eq!(cert.weighted_error, Some(0.0));
        assert!(cert.matching.unwrap().is_total());

        let g = ExponentialSum::from_parts(
            &[0.1, 0.3 + 1e-4, 0.6, 0.9],
            &[c(1.1, 0.0), c(-1.1, 0.0), c(2.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        let cert = wellposedness_certificate(&f, &g, 20, q).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert!(cert.weighted_error.unwrap() <= cert.premise_value);
        assert_eq!(cert.estimate_holds, Some(true));

        let far = ExponentialSum::from_parts(&[0.45, 0.75], &[c(5.0, 0.0), c(5.0, 0.0)]).unwrap();
        let near = ExponentialSum::from_parts(&[0.0, 0.2], &[c(5.0, 0.0), c(5.0, 0.0)]).unwrap();
        let cert = wellposedness_certificate(&near, &far, 20, q).unwrap();
        assert_eq!(cert.verdict, Verdict::PremiseFailed);
        assert!(cert.premise_value >= cert.premise_threshold);

        assert!(matches!(
            wellposedness_certificate(&f, &f, 20, 0.01),
            Err(Error::ModelViolation(_))
        ));
        assert!(matches!(
            wellposedness_certificate(&f, &f, 20, 0.15),
            Err(Error::ModelViolation(_))
        ));
    }

    #[test]
    fn weighted_error_below_symmetric_bound_of_difference() {
        // The well-posedness constants follow from the symmetric bound for
        // the 2N+1 samples −N..N applied to f − g.
        let n = 20;
        let f = model_sum();
        let g = ExponentialSum::from_parts(
            &[0.1 + 2e-3, 0.3 - 1e-3, 0.6 + 5e-4, 0.9 - 3e-3],
            &[c(1.0, 0.1), c(-1.2, 0.0), c(2.1, -0.1), c(1.9, 0.05)],
        )
        .unwrap();
        let m = match_partition(&f.frequencies(), &g.frequencies(), symmetric_threshold(n)).unwrap();
        let weighted = weighted_frequency_error(&m, &f, &g, n).unwrap();
        let neg_g = g.scaled(c(-1.0, 0.0)).unwrap();
        let sym = main_bound_rhs(&m, &f, &neg_g, 2 * n + 1, MainBoundVariant::Symmetric).unwrap();
        let energy: f64 = sample(&f, &SampleGrid::symmetric(n).unwrap())
            .iter()
            .zip(sample(&g, &SampleGrid::symmetric(n).unwrap()))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        assert!(weighted <= sym && sym <= energy, "{weighted} {sym} {energy}");
        let r = check_main_bound(&f, &neg_g, &m, 2 * n + 1, MainBoundVariant::Symmetric).unwrap();
        assert!((r.lhs - energy).abs() < 1e-10);
    }

    #[test]
    fn vandermonde_bound_examples() {
        assert!((vandermonde_bound_separated(21, 0.2).unwrap() - 17.0).abs() < 1e-12);
        assert_eq!(vandermonde_bound_separated(21, 1.0 / 22.0).unwrap(), 0.0);
        assert!((vandermonde_bound_separated(64, 0.1).unwrap() - 55.0).abs() < 1e-12);

        let q = 0.5;
        let b = vandermonde_bound_pairs(20, q, 1e-3).unwrap();
        assert!((b - 1.880_707_949_763_139e-4).abs() < 1e-17);
        assert!((vandermonde_bound_pairs(20, q, 0.2).unwrap() - 14.0).abs() < 1e-12);
        assert_eq!(vandermonde_bound_pairs(20, q, 0.0).unwrap(), 0.0);
        assert!(matches!(
            vandermonde_bound_pairs(20, 0.1, 0.01),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn symmetric_pair_across_zero() {
        // half-integer points for even N; the pair straddles 0 ≡ 1
        let a = ExponentialSum::new([(0.967_271_471_798_576, c(2.06, -0.70))]).unwrap();
        let b = ExponentialSum::new([(0.043_812_590_473_244, c(1.96, -0.25))]).unwrap();
        for n in [10, 11, 20] {
            let r = main_bound_report(&a, &b, n, MainBoundVariant::Symmetric).unwrap();
            assert!(r.holds, "N = {n}: {} < {}", r.lhs, r.rhs);
            let reference: f64 = MainBoundVariant::Symmetric
                .sample_points(n)
                .iter()
                .map(|&x| {
                    let pi2 = 2.0 * PI * x;
                    (c(2.06, -0.70) * Complex64::from_polar(1.0, pi2 * 0.967_271_471_798_576)
                        + c(1.96, -0.25) * Complex64::from_polar(1.0, pi2 * (0.043_812_590_473_244 + 1.0)))
                    .norm_sqr()
                })
                .sum();
            assert!((r.lhs - reference).abs() < 1e-9 * reference);
        }
    }
}
