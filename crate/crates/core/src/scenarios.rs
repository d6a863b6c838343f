//! Random and extremal inputs for the verification suites.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::torus::{cis_turns, ExponentialSum, Frequency, SampleGrid};

/// Relative margin added to every requested gap.
const GAP_MARGIN: f64 = 1e-9;

/// Standard complex Gaussian, redrawn when its modulus is below `1e-6`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        if z.norm() >= 1e-6 {
            return z;
        }
    }
}

/// Splits `slack` into `parts` random nonnegative pieces (uniform on the
/// simplex).
fn split_slack<R: Rng + ?Sized>(rng: &mut R, slack: f64, parts: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..parts).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| slack.max(0.0) * w / total).collect()
}

/// `count` points on the torus with pairwise wrap distance at least `q`.
pub fn random_separated_frequencies<R: Rng + ?Sized>(rng: &mut R, count: usize, q: f64) -> Result<Vec<f64>> {
    if count == 0 || !(q > 0.0) || count as f64 * q > 1.0 {
        return Err(Error::InvalidInput(format!(
            "cannot place {count} points at separation {q}"
        )));
    }
    let gap = if count as f64 * q * (1.0 + GAP_MARGIN) <= 1.0 {
        q * (1.0 + GAP_MARGIN)
    } else {
        q
    };
    let extra = split_slack(rng, 1.0 - count as f64 * gap, count);
    let mut position = rng.random::<f64>();
    let mut points = Vec::with_capacity(count);
    for e in extra {
        points.push(Frequency::new(position).value());
        position += gap + e;
    }
    Ok(points)
}

pub fn random_separated_sum<R: Rng + ?Sized>(rng: &mut R, count: usize, q: f64) -> Result<ExponentialSum> {
    let points = random_separated_frequencies(rng, count, q)?;
    ExponentialSum::new(points.into_iter().map(|y| (y, complex_gaussian(rng))))
}

/// Random instance for the well-separated bounds: `q ∈ [0.05, 0.4]`, at most
/// eight terms, grid width at most 100.
pub fn random_wellsep_case<R: Rng + ?Sized>(rng: &mut R) -> Result<(ExponentialSum, SampleGrid, f64)> {
    let q: f64 = rng.random_range(0.05..=0.4);
    let max_terms = ((1.0 / q).floor() as usize).clamp(1, 8);
    let count = rng.random_range(1..=max_terms);
    let f = random_separated_sum(rng, count, q)?;
    let start = rng.random_range(-50..=50);
    let width = rng.random_range(1..=100);
    Ok((f, SampleGrid::new(start, start + width)?, q))
}

#[derive(Clone, Copy)]
enum Cluster {
    Pair { gap: f64 },
    First,
    Second,
}

/// Two sums whose frequencies form clusters: colliding pairs (one point from
/// each sum, distance below `threshold`) and singletons, all clusters at
/// least `threshold` apart. Both sums are then `threshold`-separated and
/// every point has at most one partner closer than `threshold`.
pub fn random_pair_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    threshold: f64,
) -> Result<(ExponentialSum, ExponentialSum)> {
    if !(threshold > 0.0) || threshold > 1.0 {
        return Err(Error::InvalidThreshold(threshold));
    }
    let spacing = threshold * (1.0 + GAP_MARGIN);
    let gap_scale = threshold.min(1.0 - spacing);
    if gap_scale <= 0.0 {
        return Err(Error::InvalidThreshold(threshold));
    }
    let max_clusters = ((1.0 / spacing).floor() as usize).max(1);
    let mut count = rng.random_range(1..=max_clusters);
    let mut clusters: Vec<Cluster> = (0..count)
        .map(|i| match (i, rng.random_range(0..3)) {
            (0, _) | (_, 0) => {
                let u: f64 = rng.random_range(1e-6..1.0);
                let gap = if rng.random_bool(1.0 / 3.0) {
                    gap_scale * 10f64.powf(-6.0 * u)
                } else {
                    gap_scale * u
                };
                Cluster::Pair { gap }
            }
            (_, 1) => Cluster::First,
            _ => Cluster::Second,
        })
        .collect();
    let extent = |c: &Cluster| match c {
        Cluster::Pair { gap } => *gap,
        _ => 0.0,
    };
    while count > 1 && clusters.iter().map(extent).sum::<f64>() + count as f64 * spacing > 1.0 {
        clusters.pop();
        count -= 1;
    }
    let used: f64 = clusters.iter().map(extent).sum::<f64>() + count as f64 * spacing;
    if count == 1 && used > 1.0 {
        return Err(Error::InvalidThreshold(threshold));
    }
    let extra = split_slack(rng, 1.0 - used, count);

    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut position = rng.random::<f64>();
    for (cluster, e) in clusters.iter().zip(extra) {
        match *cluster {
            Cluster::Pair { gap } => {
                let cy = complex_gaussian(rng);
                let cn = if rng.random_bool(0.25) { -cy } else { complex_gaussian(rng) };
                let (a, b) = (position, position + gap);
                let (p_first, p_second) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
                first.push((Frequency::new(p_first).value(), cy));
                second.push((Frequency::new(p_second).value(), cn));
                position += gap;
            }
            Cluster::First => first.push((Frequency::new(position).value(), complex_gaussian(rng))),
            Cluster::Second => second.push((Frequency::new(position).value(), complex_gaussian(rng))),
        }
        position += spacing + e;
    }
    if second.is_empty() {
        let last = first.pop().ok_or(Error::ModelViolation("empty configuration".into()))?;
        second.push(last);
    }
    if first.is_empty() {
        let last = second.pop().ok_or(Error::ModelViolation("empty configuration".into()))?;
        first.push(last);
    }
    Ok((ExponentialSum::new(first)?, ExponentialSum::new(second)?))
}

/// A sum `f ∈ S(2q)` and a perturbation `g ∈ S(2q)` of it, with
/// `q ≥ 3/(2N+2)`. One case in ten pairs `f` with an unrelated `g`.
pub fn random_wellposedness_case<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> Result<(ExponentialSum, ExponentialSum, f64)> {
    let q = 3.0 / (2.0 * n as f64 + 2.0) * rng.random_range(1.0..1.5);
    let room = 2.0 * q * 1.25;
    let max_terms = ((1.0 / room).floor() as usize).clamp(1, 6);
    let count = rng.random_range(1..=max_terms);
    let f = random_separated_sum(rng, count, room)?;
    if rng.random_bool(0.1) {
        let g = random_separated_sum(rng, count, room)?;
        return Ok((f, g, q));
    }
    let scale = 10f64.powf(-rng.random_range(0.0..6.0));
    let terms = f.terms().iter().map(|(y, c)| {
        let shift = scale * 0.1 * q * rng.random_range(-1.0..=1.0);
        let factor = Complex64::new(1.0, 0.0) + complex_gaussian(rng) * (0.1 * scale);
        (y.value() + shift, c * factor)
    });
    let g = ExponentialSum::new(terms.collect::<Vec<_>>())?;
    Ok((f, g, q))
}

/// Frequencies `j/P` with `c_j = e^{−2πij(A−1)/P}/P`, `P = B−A+2`: the sum
/// vanishes at every grid point, so the lower well-separated bound is
/// attained at `q = 1/P`.
pub fn critical_dft_sum(grid: &SampleGrid) -> Result<(ExponentialSum, f64)> {
    let p = (grid.end() - grid.start() + 2) as usize;
    let a = grid.start();
    let terms = (0..p).map(|j| {
        let c = cis_turns(-((j as i64 * (a - 1)).rem_euclid(p as i64)) as f64 / p as f64) / p as f64;
        (j as f64 / p as f64, c)
    });
    Ok((ExponentialSum::new(terms.collect::<Vec<_>>())?, 1.0 / p as f64))
}

/// Frequencies `j/P` with equal coefficients on the grid `[0, P]`: samples
/// are `P` at both ends and zero elsewhere, so the energy equals the upper
/// well-separated bound at `q = 1/P`.
pub fn dirichlet_spike_sum(p: usize) -> Result<(ExponentialSum, SampleGrid, f64)> {
    if p == 0 {
        return Err(Error::InvalidInput("P must be positive".into()));
    }
    let terms = (0..p).map(|j| (j as f64 / p as f64, Complex64::new(1.0, 0.0)));
    Ok((
        ExponentialSum::new(terms.collect::<Vec<_>>())?,
        SampleGrid::new(0, p as i64)?,
        1.0 / p as f64,
    ))
}

/// Random order of a slice, used to check relabeling invariance.
pub fn shuffled<T: Clone, R: Rng + ?Sized>(rng: &mut R, items: &[T]) -> Vec<T> {
    let mut out = items.to_vec();
    out.shuffle(rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{at_least, collision_threshold, is_separated};
    use crate::torus::{energy, match_partition, separation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separated_frequencies_respect_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let q = rng.random_range(0.01..0.5);
            let count = rng.random_range(1..=(1.0 / q) as usize);
            let y: Vec<Frequency> = random_separated_frequencies(&mut rng, count, q)
                .unwrap()
                .into_iter()
                .map(Frequency::new)
                .collect();
            assert!(at_least(separation(&y), q));
        }
    }

    #[test]
    fn pair_configurations_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [3usize, 10, 20, 50] {
            let t = collision_threshold(n);
            for _ in 0..300 {
                let (a, b) = random_pair_configuration(&mut rng, t).unwrap();
                assert!(is_separated(&a.frequencies(), t) && is_separated(&b.frequencies(), t));
                let p = match_partition(&a.frequencies(), &b.frequencies(), t).unwrap();
                assert!(!p.pairs.is_empty() || !p.unmatched.is_empty());
            }
        }
    }

    #[test]
    fn extremal_sums() {
        for (start, end) in [(0i64, 5i64), (-3, 7), (4, 40)] {
            let grid = SampleGrid::new(start, end).unwrap();
            let (f, q) = critical_dft_sum(&grid).unwrap();
            assert!(energy(&f, &grid) < 1e-18 * f.coefficient_norm_sq());
            assert!(at_least(f.separation(), q));
        }
        let (f, grid, q) = dirichlet_spike_sum(7).unwrap();
        let upper = ((grid.end() - grid.start()) as f64 + 1.0 / q) * f.coefficient_norm_sq();
        assert!((energy(&f, &grid) - upper).abs() < 1e-12 * upper);
    }
}
