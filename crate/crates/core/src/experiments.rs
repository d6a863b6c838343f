//! Experiment drivers: the noisy ESPRIT study with a posteriori
//! certificates, the sharpness sweep, Vandermonde sweeps and the randomized
//! bound suite. Every run is a pure function of its configuration.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_wellsep, collision_threshold, main_bound_report, symmetric_threshold,
    wellposedness_certificate, BoundReport, MainBoundVariant, Verdict,
};
use crate::error::{Error, Result};
use crate::estimation::estimate;
use crate::noise::{apost_certificate_with_truth, draw_noise, gauss_norm_estimator, NoiseModel};
use crate::scenarios::{
    critical_dft_sum, dirichlet_spike_sum, random_pair_configuration, random_separated_frequencies,
    random_wellposedness_case, random_wellsep_case,
};
use crate::torus::{sample, ExponentialSum, SampleGrid};
use crate::vandermonde::{verify_pairs, verify_separated, SigmaReport, VandermondeSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Figure1,
    Sharpness,
    VandermondeSweep,
    BoundSuite,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EspritOptions {
    /// Model order; defaults to the number of terms of the model.
    pub order: Option<usize>,
    /// Hankel window; defaults to `⌊(L+1)/2⌋`.
    pub window: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VandermondeMode {
    Separated,
    Pairs,
}

/// JSON experiment configuration; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub trials: usize,
    pub sigma_grid: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    /// Separation parameter of the certificate; defaults to `3/(2N+2)`.
    pub q: Option<f64>,
    pub model: ExponentialSum,
    pub esprit: EspritOptions,
    pub taus: Vec<f64>,
    pub sharpness_sizes: Vec<usize>,
    pub suite_sizes: Vec<usize>,
    /// Multiplier applied to every lower-bound right-hand side (and divisor
    /// of upper bounds) in the bound suite; `1` checks the bounds as
    /// stated.
    pub perturbation: f64,
}

pub fn default_model() -> ExponentialSum {
    ExponentialSum::from_parts(
        &[0.1, 0.3, 0.6, 0.9],
        &[
            Complex64::new(1.1, 0.0),
            Complex64::new(-1.1, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
        ],
    )
    .expect("valid default model")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Figure1,
            seed: 0,
            trials: 50,
            sigma_grid: vec![1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0],
            n: 20,
            delta: 0.9,
            q: None,
            model: default_model(),
            esprit: EspritOptions::default(),
            taus: vec![1e-3, 1e-4, 1e-5],
            sharpness_sizes: vec![20],
            suite_sizes: vec![10, 20, 50],
            perturbation: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidInput("N must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInput(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if !(self.perturbation > 0.0) {
            return Err(Error::InvalidInput("perturbation must be positive".into()));
        }
        if self.experiment == ExperimentKind::Figure1 && self.sigma_grid.is_empty() {
            return Err(Error::InvalidInput("sigma_grid must not be empty".into()));
        }
        if self.sigma_grid.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidInput("noise levels must be positive".into()));
        }
        Ok(())
    }

    pub fn certificate_q(&self) -> f64 {
        self.q.unwrap_or_else(|| symmetric_threshold(self.n))
    }
}

/// Independent generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn stream_id(block: usize, index: usize) -> u64 {
    ((block as u64) << 32) | index as u64
}

/// Rows of a CSV table with a header line, `\n` line endings.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Certified,
    PremiseFailed,
    /// The estimate is not in `S(2q)`.
    ModelViolation,
    /// The premise held but the matching was not total.
    MatchingFailed,
    EstimationFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub sigma: f64,
    pub seed_index: usize,
    /// `Σ_{k=−N}^{N}|f(k) − g(k)|²`.
    pub sampling_distance: Option<f64>,
    /// Weighted frequency/coefficient error, when the matching is total.
    pub error: Option<f64>,
    pub estimator: Option<f64>,
    pub estimator_sq: Option<f64>,
    pub premise_ok: bool,
    /// Whether `‖f − g‖ ≤ estimator` on the grid.
    pub lemma_event_ok: Option<bool>,
    pub status: TrialStatus,
    /// Certified trial whose error exceeds `estimator²`, or whose matching
    /// failed.
    pub violation: bool,
}

fn run_trial(config: &ExperimentConfig, sigma_index: usize, sigma: f64, trial: usize) -> Result<TrialRecord> {
    let n = config.n;
    let f = &config.model;
    let grid = SampleGrid::symmetric(n)?;
    let model = NoiseModel::new(sigma, config.seed)?;
    let mut rng = model.rng(stream_id(sigma_index, trial));
    let clean = sample(f, &grid);
    let noisy: Vec<Complex64> = clean
        .iter()
        .zip(draw_noise(&mut rng, sigma, grid.len()))
        .map(|(a, b)| a + b)
        .collect();

    let mut record = TrialRecord {
        sigma,
        seed_index: trial,
        sampling_distance: None,
        error: None,
        estimator: None,
        estimator_sq: None,
        premise_ok: false,
        lemma_event_ok: None,
        status: TrialStatus::EstimationFailed,
        violation: false,
    };
    let order = config.esprit.order.unwrap_or(f.len());
    let g = match estimate(&noisy, &grid, order, config.esprit.window).and_then(|r| r.to_sum()) {
        Ok(g) => g,
        Err(_) => return Ok(record),
    };

    let estimate_samples = sample(&g, &grid);
    let residual_sq: f64 = noisy.iter().zip(&estimate_samples).map(|(y, v)| (y - v).norm_sqr()).sum();
    let distance: f64 = clean.iter().zip(&estimate_samples).map(|(a, b)| (a - b).norm_sqr()).sum();
    let estimator = gauss_norm_estimator(residual_sq, grid.len(), sigma, config.delta);
    record.sampling_distance = Some(distance);
    record.estimator = Some(estimator);
    record.estimator_sq = Some(estimator * estimator);
    record.lemma_event_ok = Some(distance.sqrt() <= estimator);

    match apost_certificate_with_truth(&noisy, &g, f, n, sigma, config.delta, config.certificate_q()) {
        Ok(cert) => {
            record.premise_ok = cert.verdict == Verdict::Certified;
            record.error = cert.weighted_error;
            record.status = if record.premise_ok {
                TrialStatus::Certified
            } else {
                TrialStatus::PremiseFailed
            };
            record.violation = record.premise_ok && cert.estimate_holds != Some(true);
        }
        Err(Error::ModelViolation(_)) => record.status = TrialStatus::ModelViolation,
        Err(Error::UnmatchedFrequencies { .. }) | Err(Error::AmbiguousMatch { .. }) => {
            record.premise_ok = true;
            record.status = TrialStatus::MatchingFailed;
            record.violation = true;
        }
        Err(e) => return Err(e),
    }
    Ok(record)
}

/// Per-noise-level aggregate of the certificate study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure1Row {
    pub sigma: f64,
    pub trials: usize,
    pub certified: usize,
    pub certified_fraction: f64,
    pub max_error: Option<f64>,
    pub max_estimator: Option<f64>,
    pub max_estimator_sq: Option<f64>,
    pub max_sampling_distance: Option<f64>,
    pub median_error: Option<f64>,
    pub median_estimator: Option<f64>,
    pub lemma_failures: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure1Output {
    pub rows: Vec<Figure1Row>,
    pub trials: Vec<TrialRecord>,
}

impl Figure1Output {
    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    })
}

fn aggregate(sigma: f64, records: &[TrialRecord]) -> Figure1Row {
    let certified = records.iter().filter(|r| r.premise_ok).count();
    let errors: Vec<f64> = records.iter().filter_map(|r| r.error).collect();
    let estimators: Vec<f64> = records.iter().filter_map(|r| r.estimator).collect();
    Figure1Row {
        sigma,
        trials: records.len(),
        certified,
        certified_fraction: certified as f64 / records.len() as f64,
        max_error: max_of(errors.iter().copied()),
        max_estimator: max_of(estimators.iter().copied()),
        max_estimator_sq: max_of(records.iter().filter_map(|r| r.estimator_sq)),
        max_sampling_distance: max_of(records.iter().filter_map(|r| r.sampling_distance)),
        median_error: median(&errors),
        median_estimator: median(&estimators),
        lemma_failures: records.iter().filter(|r| r.lemma_event_ok == Some(false)).count(),
        violations: records.iter().filter(|r| r.violation).count(),
    }
}

/// Noise → ESPRIT → coefficient fit → certificate, `trials` times per noise
/// level; maxima and medians per level.
pub fn run_figure1(config: &ExperimentConfig) -> Result<Figure1Output> {
    config.validate()?;
    let jobs: Vec<(usize, f64, usize)> = config
        .sigma_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| (0..config.trials).map(move |t| (i, s, t)))
        .collect();
    let trials = jobs
        .par_iter()
        .map(|&(i, s, t)| run_trial(config, i, s, t))
        .collect::<Result<Vec<_>>>()?;
    let rows = config
        .sigma_grid
        .iter()
        .enumerate()
        .map(|(i, &s)| aggregate(s, &trials[i * config.trials..(i + 1) * config.trials]))
        .collect();
    Ok(Figure1Output { rows, trials })
}

/// Spearman rank correlation, ties receiving their average rank.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let rank = (i + j) as f64 / 2.0;
            for &k in &idx[i..=j] {
                out[k] = rank;
            }
            i = j + 1;
        }
        out
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub tau: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub lhs_energy: f64,
    pub rhs_weakened: f64,
    pub ratio: f64,
    /// `lhs/(τ²N³)`, which tends to `4π²/3` as `τN → 0`.
    pub scaled_energy: f64,
    pub holds: bool,
}

/// `f_τ = 1 − e^{2πiτ·}` sampled on `1..N` against the phase-free pair bound.
pub fn sharpness_row(tau: f64, n: usize) -> Result<SharpnessRow> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidInput(format!("tau must lie in (0,1), got {tau}")));
    }
    let one = ExponentialSum::new([(0.0, Complex64::new(1.0, 0.0))])?;
    let minus = ExponentialSum::new([(tau, Complex64::new(-1.0, 0.0))])?;
    let report = main_bound_report(&one, &minus, n, MainBoundVariant::Weakened)?;
    let nf = n as f64;
    Ok(SharpnessRow {
        tau,
        n,
        lhs_energy: report.lhs,
        rhs_weakened: report.rhs,
        ratio: report.lhs / report.rhs,
        scaled_energy: report.lhs / (tau * tau * nf * nf * nf),
        holds: report.holds,
    })
}

pub fn run_sharpness(config: &ExperimentConfig) -> Result<Vec<SharpnessRow>> {
    config
        .sharpness_sizes
        .iter()
        .flat_map(|&n| config.taus.iter().map(move |&tau| sharpness_row(tau, n)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VandermondeRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub q: f64,
    pub tau: Option<f64>,
    pub sigma_min_sq: f64,
    pub bound: f64,
    pub ratio: f64,
    pub holds: bool,
}

impl From<&SigmaReport> for VandermondeRow {
    fn from(r: &SigmaReport) -> Self {
        VandermondeRow {
            n: r.rows,
            m: r.columns,
            q: r.q,
            tau: r.tau,
            sigma_min_sq: r.sigma_min_squared,
            bound: r.bound,
            ratio: r.ratio,
            holds: r.holds,
        }
    }
}

/// One random Vandermonde check for `N` rows.
pub fn vandermonde_case(mode: VandermondeMode, n: usize, seed: u64, stream: u64) -> Result<SigmaReport> {
    use rand::Rng;
    let mut rng = stream_rng(seed, stream);
    match mode {
        VandermondeMode::Separated => {
            let q: f64 = rng.random_range(0.05..=0.4);
            let max_cols = ((1.0 / q).floor() as usize).clamp(1, 8);
            let count = rng.random_range(1..=max_cols);
            let values = random_separated_frequencies(&mut rng, count, q)?;
            verify_separated(&VandermondeSpec::from_values(&values, n)?, q)
        }
        VandermondeMode::Pairs => {
            let t = collision_threshold(n);
            let (a, b) = random_pair_configuration(&mut rng, t)?;
            verify_pairs(
                &VandermondeSpec::new(a.frequencies(), n)?,
                &VandermondeSpec::new(b.frequencies(), n)?,
                t,
            )
        }
    }
}

pub fn run_vandermonde_sweep(config: &ExperimentConfig, mode: VandermondeMode) -> Result<Vec<SigmaReport>> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .suite_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &n)| (0..config.trials).map(move |t| (b, n, t)))
        .map(|(b, n, t)| (n, stream_id(b, t) as usize))
        .collect();
    jobs.par_iter()
        .map(|&(n, stream)| vandermonde_case(mode, n, config.seed, stream as u64))
        .collect()
}

/// A replayable bound check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Wellsep {
        sum: ExponentialSum,
        grid: SampleGrid,
        q: f64,
    },
    Main {
        first: ExponentialSum,
        second: ExponentialSum,
        #[serde(rename = "N")]
        n: usize,
        variant: MainBoundVariant,
    },
    Wellposedness {
        f: ExponentialSum,
        g: ExponentialSum,
        #[serde(rename = "N")]
        n: usize,
        q: f64,
    },
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::Wellsep { .. } => "wellsep",
            Scenario::Main { variant, .. } => match variant {
                MainBoundVariant::Modulated => "main_modulated",
                MainBoundVariant::Weakened => "main_weakened",
                MainBoundVariant::Symmetric => "main_symmetric",
            },
            Scenario::Wellposedness { .. } => "wellposedness",
        }
    }

    /// Evaluates the inequality with every lower-bound right-hand side
    /// multiplied by `perturbation` and every upper bound divided by it.
    pub fn evaluate(&self, perturbation: f64) -> Result<BoundReport> {
        match self {
            Scenario::Wellsep { sum, grid, q } => {
                let base = check_wellsep(sum, grid, *q)?;
                let mut constants = base.constants.clone();
                let upper = constants["upper_bound"] / perturbation;
                constants.insert("upper_bound".into(), upper);
                constants.insert("upper_slack".into(), upper - base.lhs);
                let upper_ok = upper - base.lhs >= -1e-12 * upper.abs().max(1.0);
                let mut report = BoundReport::new(base.lhs, base.rhs * perturbation, constants);
                report.holds = report.holds && upper_ok;
                Ok(report)
            }
            Scenario::Main { first, second, n, variant } => {
                let base = main_bound_report(first, second, *n, *variant)?;
                Ok(BoundReport::new(base.lhs, base.rhs * perturbation, base.constants))
            }
            Scenario::Wellposedness { f, g, n, q } => {
                let cert = wellposedness_certificate(f, g, *n, *q)?;
                let mut constants = std::collections::BTreeMap::new();
                constants.insert("premise_threshold".into(), cert.premise_threshold);
                constants.insert("c_min".into(), cert.c_min);
                let certified = cert.verdict == Verdict::Certified;
                constants.insert("certified".into(), if certified { 1.0 } else { 0.0 });
                let rhs = if certified {
                    cert.weighted_error.unwrap_or(f64::INFINITY) * perturbation
                } else {
                    0.0
                };
                Ok(BoundReport::new(cert.premise_value, rhs, constants))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub seed: u64,
    pub stream: u64,
    pub perturbation: f64,
    pub label: String,
    pub scenario: Scenario,
    pub report: Option<BoundReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<SuiteFailure>,
}

/// The scenarios generated from one `(seed, stream)`: a well-separated
/// case, one pair configuration under all three variants and a
/// well-posedness case, all for `N` samples.
pub fn suite_scenarios(n: usize, seed: u64, stream: u64) -> Result<Vec<Scenario>> {
    let mut rng = stream_rng(seed, stream);
    let (sum, grid, q) = random_wellsep_case(&mut rng)?;
    let mut out = vec![Scenario::Wellsep { sum, grid, q }];
    let (first, second) = random_pair_configuration(&mut rng, collision_threshold(n))?;
    for variant in MainBoundVariant::ALL {
        out.push(Scenario::Main {
            first: first.clone(),
            second: second.clone(),
            n,
            variant,
        });
    }
    let (f, g, q) = random_wellposedness_case(&mut rng, n)?;
    out.push(Scenario::Wellposedness { f, g, n, q });
    Ok(out)
}

/// Deterministic extremal well-separated instances: critical DFT sums
/// (energy equal to the zero lower bound) and Dirichlet spikes (energy equal
/// to the upper bound).
pub fn extremal_scenarios() -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for width in 1..=20i64 {
        let grid = SampleGrid::new(0, width)?;
        let (sum, q) = critical_dft_sum(&grid)?;
        out.push(Scenario::Wellsep { sum, grid, q });
    }
    for p in 1..=20 {
        let (sum, grid, q) = dirichlet_spike_sum(p)?;
        out.push(Scenario::Wellsep { sum, grid, q });
    }
    Ok(out)
}

pub fn run_bound_suite(config: &ExperimentConfig) -> Result<SuiteSummary> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = config
        .suite_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &n)| (0..config.trials).map(move |t| (n, stream_id(b, t))))
        .collect();
    let mut tagged: Vec<(u64, Scenario)> = extremal_scenarios()?
        .into_iter()
        .map(|s| (u64::MAX, s))
        .collect();
    let generated = jobs
        .par_iter()
        .map(|&(n, stream)| suite_scenarios(n, config.seed, stream).map(|v| (stream, v)))
        .collect::<Result<Vec<_>>>()?;
    for (stream, scenarios) in generated {
        tagged.extend(scenarios.into_iter().map(|s| (stream, s)));
    }
    let outcomes: Vec<Option<SuiteFailure>> = tagged
        .par_iter()
        .map(|(stream, scenario)| {
            let failure = |report, error| SuiteFailure {
                seed: config.seed,
                stream: *stream,
                perturbation: config.perturbation,
                label: scenario.label().into(),
                scenario: scenario.clone(),
                report,
                error,
            };
            match scenario.evaluate(config.perturbation) {
                Ok(r) if r.holds => None,
                Ok(r) => Some(failure(Some(r), None)),
                Err(e) => Some(failure(None, Some(e.to_string()))),
            }
        })
        .collect();
    let failures: Vec<SuiteFailure> = outcomes.into_iter().flatten().collect();
    Ok(SuiteSummary {
        total: tagged.len(),
        passed: tagged.len() - failures.len(),
        failed: failures.len(),
        failures,
    })
}
