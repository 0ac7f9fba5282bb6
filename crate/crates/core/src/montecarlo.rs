//! Path simulation and empirical joint laws of `(S_n, Λ^a_n)`.
//!
//! Trial `t` under seed `s` draws from ChaCha8 keyed by `s` on stream `t`
//! (`ChaCha8Rng::seed_from_u64(s)` followed by `set_stream(t)`). Streams of
//! one key never overlap, so a trial's path depends only on `(s, t)` and not
//! on how trials are scheduled across threads.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pmf::fmt_sig17;
use crate::scalar::Real;
use crate::walk_model::WalkSpec;

const CHUNK: u64 = 4096;

/// Generator for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Inverse-CDF sampler over the finite step support.
#[derive(Debug, Clone)]
pub struct StepSampler {
    steps: Vec<i64>,
    cdf: Vec<f64>,
}

impl StepSampler {
    pub fn new<T: Real>(spec: &WalkSpec<T>) -> Self {
        let mut steps = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (s, p) in spec.step().support() {
            let p = p.as_f64();
            if p > 0.0 {
                acc += p;
                steps.push(s);
                cdf.push(acc);
            }
        }
        // Absorb the mass roundoff into the last step.
        if let Some(last) = cdf.last_mut() {
            *last = f64::INFINITY;
        }
        Self { steps, cdf }
    }

    #[inline]
    pub fn sample<R: Rng>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.gen();
        self.steps[self.cdf.partition_point(|&c| c <= u)]
    }
}

/// Endpoint and visit counts of one simulated path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSample {
    pub endpoint: i64,
    /// `visits[i]` counts the times `1..=n` spent at `levels[i]`.
    pub visits: Vec<usize>,
}

fn run_path<R: Rng>(sampler: &StepSampler, n: usize, levels: &[i64], rng: &mut R) -> PathSample {
    let mut pos = 0i64;
    let mut visits = vec![0usize; levels.len()];
    for _ in 0..n {
        pos += sampler.sample(rng);
        for (v, &l) in visits.iter_mut().zip(levels) {
            *v += (pos == l) as usize;
        }
    }
    PathSample {
        endpoint: pos,
        visits,
    }
}

/// Trial 0 of [`sample_path_trial`].
pub fn sample_path<T: Real>(spec: &WalkSpec<T>, n: usize, levels: &[i64], seed: u64) -> PathSample {
    sample_path_trial(spec, n, levels, seed, 0)
}

pub fn sample_path_trial<T: Real>(
    spec: &WalkSpec<T>,
    n: usize,
    levels: &[i64],
    seed: u64,
    trial: u64,
) -> PathSample {
    let sampler = StepSampler::new(spec);
    run_path(&sampler, n, levels, &mut trial_rng(seed, trial))
}

/// Empirical law of `(S_n, Λ^a_n)` over `trials` paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McEstimate {
    n: usize,
    a: i64,
    trials: u64,
    counts: BTreeMap<(i64, usize), u64>,
}

impl McEstimate {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> i64 {
        self.a
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// Raw hit counts per `(x, ℓ)` cell; they sum to `trials`.
    pub fn counts(&self) -> &BTreeMap<(i64, usize), u64> {
        &self.counts
    }

    pub fn frequency(&self, x: i64, ell: usize) -> f64 {
        self.counts
            .get(&(x, ell))
            .map_or(0.0, |&c| c as f64 / self.trials as f64)
    }

    /// `√(p̂(1 − p̂)/trials)`.
    pub fn std_err(&self, x: i64, ell: usize) -> f64 {
        let p = self.frequency(x, ell);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Observed cells as `(x, ℓ, p̂, std_err)` in `(x, ℓ)` order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, usize, f64, f64)> + '_ {
        self.counts
            .keys()
            .map(|&(x, l)| (x, l, self.frequency(x, l), self.std_err(x, l)))
    }

    /// CSV with header `x,ell,probability,std_err`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "ell", "probability", "std_err"])?;
        for (x, l, p, se) in self.cells() {
            w.write_record([x.to_string(), l.to_string(), fmt_sig17(p), fmt_sig17(se)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Simulates `trials` paths of length `n` and tabulates `(S_n, Λ^a_n)`.
pub fn estimate_joint<T: Real>(
    spec: &WalkSpec<T>,
    n: usize,
    a: i64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let sampler = StepSampler::new(spec);
    let levels = [a];
    let chunks = trials.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = BTreeMap::new();
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let path = run_path(&sampler, n, &levels, &mut trial_rng(seed, t));
                *local.entry((path.endpoint, path.visits[0])).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut acc, part| {
            for (k, v) in part {
                *acc.entry(k).or_insert(0) += v;
            }
            acc
        });
    Ok(McEstimate {
        n,
        a,
        trials,
        counts,
    })
}
