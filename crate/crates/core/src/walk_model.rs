//! Step laws of integer-valued random walks and their validation.
//!
//! A [`WalkSpec`] is only constructed through [`validate_step_distribution`],
//! which enforces: unit total mass, zero mean, maximality of the integer
//! lattice, and aperiodicity of the return times to the origin. Support is
//! finite so that every exact computation downstream terminates without
//! truncation error.

use std::path::Path;

use crate::error::{Error, Result, WalkError};
use crate::scalar::Real;

/// Law of a single step: `probs[i] = P[X = min_step + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution<T> {
    min_step: i64,
    probs: Vec<T>,
}

impl<T: Real> StepDistribution<T> {
    pub fn min_step(&self) -> i64 {
        self.min_step
    }

    /// Largest step with stored (positive) probability.
    pub fn max_step(&self) -> i64 {
        self.min_step + self.probs.len() as i64 - 1
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, step: i64) -> T {
        let i = step - self.min_step;
        if i < 0 || i >= self.probs.len() as i64 {
            T::zero()
        } else {
            self.probs[i as usize]
        }
    }

    /// Steps with positive probability, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > T::zero())
            .map(move |(i, &p)| (self.min_step + i as i64, p))
    }

    pub fn mean(&self) -> T {
        self.support().map(|(s, p)| T::of_i64(s) * p).sum()
    }

    pub fn second_moment(&self) -> T {
        self.support().map(|(s, p)| T::of_i64(s * s) * p).sum()
    }
}

/// A validated step law together with its variance and step bound.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec<T> {
    step: StepDistribution<T>,
    variance: T,
    max_step: i64,
}

impl<T: Real> WalkSpec<T> {
    pub fn step(&self) -> &StepDistribution<T> {
        &self.step
    }

    /// The variance ν of a single step.
    pub fn variance(&self) -> T {
        self.variance
    }

    /// Largest `|s|` with `P[X = s] > 0`.
    pub fn max_step(&self) -> i64 {
        self.max_step
    }

    /// Whether `P[X = s] = P[X = −s]` for every `s`, up to roundoff.
    pub fn is_symmetric(&self) -> bool {
        let tol = T::roundoff_tol(1e-15);
        self.step
            .support()
            .all(|(s, p)| (p - self.step.prob(-s)).abs() <= tol)
    }

    /// Reads a walk file: one `step=probability` pair per line, `#` starts
    /// a comment.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let raw = parse_walk_text::<T>(&text)?;
        Ok(validate_step_distribution(&raw)?)
    }
}

/// The variance ν stored in a validated walk.
pub fn variance<T: Real>(spec: &WalkSpec<T>) -> T {
    spec.variance()
}

/// Probe horizon for the aperiodicity certificate: `2·(max_step + 1)²`.
pub fn aperiodicity_horizon(max_step: i64) -> usize {
    let m = max_step as usize + 1;
    2 * m * m
}

/// Validates `(step, probability)` pairs against the standing assumptions.
///
/// Checks run in this order, reporting the first failure: empty input,
/// duplicate steps, negative probabilities, total mass, at least two
/// support points, zero mean, aperiodicity of return times, and finally
/// maximality of the integer lattice. Aperiodicity precedes maximality so
/// that laws like `±1` (supported on the odd coset `1 + 2Z`) are reported
/// as periodic, while laws like `{−2, 0, 2}` whose walk can return at every
/// time are reported as sublattice laws.
pub fn validate_step_distribution<T: Real>(raw: &[(i64, T)]) -> Result<WalkSpec<T>, WalkError> {
    if raw.is_empty() {
        return Err(WalkError::Empty);
    }
    let mut sorted: Vec<(i64, T)> = raw.to_vec();
    sorted.sort_by_key(|&(s, _)| s);
    for w in sorted.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(WalkError::DuplicateStep(w[0].0));
        }
    }
    for &(step, p) in &sorted {
        if !(p >= T::zero()) {
            return Err(WalkError::NegativeProbability {
                step,
                prob: p.as_f64(),
            });
        }
    }

    let tol = T::roundoff_tol(1e-12);
    let mass: T = sorted.iter().map(|&(_, p)| p).sum();
    if (mass - T::one()).abs() > tol {
        return Err(WalkError::Mass(mass.as_f64()));
    }

    let support: Vec<(i64, T)> = sorted.into_iter().filter(|&(_, p)| p > T::zero()).collect();
    if support.len() < 2 {
        return Err(WalkError::Degenerate);
    }
    let min_step = support[0].0;
    let top = support[support.len() - 1].0;
    let mut probs = vec![T::zero(); (top - min_step + 1) as usize];
    for &(s, p) in &support {
        probs[(s - min_step) as usize] = p;
    }
    let step = StepDistribution { min_step, probs };

    let mean = step.mean();
    if mean.abs() > tol {
        return Err(WalkError::Mean(mean.as_f64()));
    }

    let max_step = min_step.abs().max(top.abs());
    let period = return_time_period(&step, aperiodicity_horizon(max_step));
    if period != 1 {
        return Err(WalkError::Periodic(period));
    }

    let spacing = support
        .iter()
        .map(|&(s, _)| (s - min_step).unsigned_abs())
        .fold(0, gcd);
    if spacing != 1 {
        return Err(WalkError::Sublattice(spacing));
    }

    let variance = step.second_moment();
    Ok(WalkSpec {
        step,
        variance,
        max_step,
    })
}

/// gcd of `{k ≤ horizon : P[S_k = 0] > 0}`; 0 when the walk never returns.
fn return_time_period<T: Real>(step: &StepDistribution<T>, horizon: usize) -> u64 {
    // Positions with a nonzero chance of being occupied; exact reachability
    // instead of float mass, so underflow cannot fake a period.
    let lo_step = step.min_step();
    let span = horizon as i64 * lo_step.abs().max(step.max_step().abs());
    let width = (2 * span + 1) as usize;
    let mut cur = vec![false; width];
    let mut next = vec![false; width];
    cur[span as usize] = true;
    let steps: Vec<i64> = step.support().map(|(s, _)| s).collect();
    let mut period = 0u64;
    for k in 1..=horizon {
        next.iter_mut().for_each(|b| *b = false);
        for (i, _) in cur.iter().enumerate().filter(|(_, b)| **b) {
            for &s in &steps {
                let j = i as i64 + s;
                if (0..width as i64).contains(&j) {
                    next[j as usize] = true;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        if cur[span as usize] {
            period = gcd(period, k as u64);
            if period == 1 {
                break;
            }
        }
    }
    period
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Parses the walk file format into raw `(step, probability)` pairs.
pub fn parse_walk_text<T: Real>(text: &str) -> Result<Vec<(i64, T)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || {
            Error::Parse(format!(
                "line {}: expected `step=probability`, got `{line}`",
                lineno + 1
            ))
        };
        let (s, p) = line.split_once('=').ok_or_else(bad)?;
        let step: i64 = s.trim().parse().map_err(|_| bad())?;
        let prob = parse_probability(p.trim()).ok_or_else(bad)?;
        out.push((step, prob));
    }
    Ok(out)
}

/// A decimal or a fraction `num/den`; fractions are divided in the
/// target precision.
fn parse_probability<T: Real>(s: &str) -> Option<T> {
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            Some(T::c(num) / T::c(den))
        }
        None => s.parse().ok().map(T::c),
    }
}
