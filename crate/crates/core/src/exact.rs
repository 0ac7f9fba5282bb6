//! Exact finite-horizon laws by dynamic programming over lattice positions.
//!
//! The walk starts at `S_0 = 0`. Occupation counts `Λ^a_n` count the times
//! `1..=n` at which `S_k = a`; time 0 is never counted, also for `a = 0`.
//! Every DP vector spans the full reachable window, so no mass is lost and
//! all identities hold up to floating-point roundoff.

use std::io::Write;

use crate::error::{Error, Result};
use crate::pmf::{fmt_sig17, Pmf};
use crate::scalar::Real;
use crate::walk_model::{StepDistribution, WalkSpec};

/// Size caps guarding the DP tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest admissible `n · max_step` for position DPs.
    pub table_cap: usize,
    /// Largest horizon for the `(position, count)` oracle table.
    pub oracle_cap: usize,
    /// Largest convolution output length.
    pub convolution_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            table_cap: 1 << 24,
            oracle_cap: 64,
            convolution_cap: 1 << 26,
        }
    }
}

impl Limits {
    pub fn with_oracle_cap(mut self, cap: usize) -> Self {
        self.oracle_cap = cap;
        self
    }

    pub(crate) fn check_table<T: Real>(&self, spec: &WalkSpec<T>, n: usize) -> Result<()> {
        let span = n.saturating_mul(spec.max_step() as usize);
        if span > self.table_cap {
            return Err(Error::Resource(format!(
                "n·max_step = {span} exceeds the table cap {}",
                self.table_cap
            )));
        }
        Ok(())
    }
}

/// One DP step: the law after adding an independent step.
pub(crate) fn propagate<T: Real>(cur: &Pmf<T>, step: &StepDistribution<T>) -> Pmf<T> {
    if cur.is_empty() {
        return Pmf::zero();
    }
    let probs = step.probs();
    let len = cur.len() + probs.len() - 1;
    let mut next = vec![T::zero(); len];
    let src = cur.values();
    for (i, &p) in probs.iter().enumerate() {
        if p > T::zero() {
            for (dst, &v) in next[i..i + src.len()].iter_mut().zip(src) {
                *dst = *dst + p * v;
            }
        }
    }
    Pmf::new(cur.offset() + step.min_step(), next)
}

/// Walk killed at its first visit to `level` during times `1, 2, …`.
///
/// After `k` calls to [`KilledWalk::advance`], [`KilledWalk::distribution`]
/// is `x ↦ P[S_k = x, τ_level > k]`.
#[derive(Debug, Clone)]
pub struct KilledWalk<'a, T> {
    step: &'a StepDistribution<T>,
    level: i64,
    time: usize,
    alive: Pmf<T>,
}

impl<'a, T: Real> KilledWalk<'a, T> {
    pub fn new(spec: &'a WalkSpec<T>, level: i64) -> Self {
        Self {
            step: spec.step(),
            level,
            time: 0,
            alive: Pmf::delta(0),
        }
    }

    /// Advances one step and returns the mass absorbed at this step,
    /// `P[τ_level = k]`.
    pub fn advance(&mut self) -> T {
        self.time += 1;
        self.alive = propagate(&self.alive, self.step);
        match self.alive.slot_mut(self.level) {
            Some(v) => std::mem::replace(v, T::zero()),
            None => T::zero(),
        }
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn distribution(&self) -> &Pmf<T> {
        &self.alive
    }

    /// Discards positions outside `[lo, hi]`.
    fn restrict(&mut self, lo: i64, hi: i64) {
        if lo > self.alive.offset() || hi < self.alive.end() - 1 {
            self.alive = self.alive.restricted(lo, hi);
        }
    }
}

/// Exact table `P[S_n = x, Λ^a_n = ℓ]` for fixed `(n, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable<T> {
    n: usize,
    a: i64,
    x_offset: i64,
    width: usize,
    /// Row-major over `x`, each row holding `ℓ = 0..=n`.
    entries: Vec<T>,
}

impl<T: Real> JointTable<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> i64 {
        self.a
    }

    pub fn x_offset(&self) -> i64 {
        self.x_offset
    }

    /// Number of endpoint positions stored.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, x: i64, ell: usize) -> T {
        let i = x - self.x_offset;
        if i < 0 || i as usize >= self.width || ell > self.n {
            T::zero()
        } else {
            self.entries[i as usize * (self.n + 1) + ell]
        }
    }

    pub fn mass(&self) -> T {
        self.entries.iter().copied().sum()
    }

    /// `x ↦ P[S_n = x, Λ^a_n = ℓ]`.
    pub fn slice_ell(&self, ell: usize) -> Pmf<T> {
        let vals = (0..self.width)
            .map(|i| self.get(self.x_offset + i as i64, ell))
            .collect();
        Pmf::new(self.x_offset, vals)
    }

    /// `x ↦ P[S_n = x]`.
    pub fn endpoint_marginal(&self) -> Pmf<T> {
        let vals = self
            .entries
            .chunks(self.n + 1)
            .map(|row| row.iter().copied().sum())
            .collect();
        Pmf::new(self.x_offset, vals)
    }

    /// `ℓ ↦ P[Λ^a_n = ℓ]`.
    pub fn occupation_marginal(&self) -> Pmf<T> {
        let mut vals = vec![T::zero(); self.n + 1];
        for row in self.entries.chunks(self.n + 1) {
            for (acc, &v) in vals.iter_mut().zip(row) {
                *acc = *acc + v;
            }
        }
        Pmf::new(0, vals)
    }

    /// Nonzero cells as `(x, ℓ, probability)`.
    pub fn cells(&self) -> impl Iterator<Item = (i64, usize, T)> + '_ {
        let stride = self.n + 1;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(i, &v)| (self.x_offset + (i / stride) as i64, i % stride, v))
    }

    /// CSV with header `x,ell,probability`, zero entries omitted.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "ell", "probability"])?;
        for (x, ell, v) in self.cells() {
            w.write_record([x.to_string(), ell.to_string(), fmt_sig17(v.as_f64())])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exact DP evaluators bound to one walk and a set of size caps.
#[derive(Debug, Clone, Copy)]
pub struct ExactEngine<'a, T> {
    spec: &'a WalkSpec<T>,
    limits: Limits,
}

impl<'a, T: Real> ExactEngine<'a, T> {
    pub fn new(spec: &'a WalkSpec<T>) -> Self {
        Self {
            spec,
            limits: Limits::default(),
        }
    }

    pub fn with_limits(spec: &'a WalkSpec<T>, limits: Limits) -> Self {
        Self { spec, limits }
    }

    pub fn spec(&self) -> &'a WalkSpec<T> {
        self.spec
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Law of `S_n`.
    pub fn marginal_pmf(&self, n: usize) -> Result<Pmf<T>> {
        if n == 0 {
            return Err(Error::Domain("marginal_pmf needs n ≥ 1".into()));
        }
        self.limits.check_table(self.spec, n)?;
        let mut law = Pmf::delta(0);
        for _ in 0..n {
            law = propagate(&law, self.spec.step());
        }
        Ok(law)
    }

    /// `(P[τ_a = k])_{k = 1..=horizon}`, stored with offset 1.
    pub fn first_passage_pmf(&self, a: i64, horizon: usize) -> Result<Pmf<T>> {
        if horizon == 0 {
            return Err(Error::Domain(
                "first_passage_pmf needs a horizon ≥ 1".into(),
            ));
        }
        self.limits.check_table(self.spec, horizon)?;
        let (smin, smax) = (self.spec.step().min_step(), self.spec.step().max_step());
        let mut walk = KilledWalk::new(self.spec, a);
        let mut out = Vec::with_capacity(horizon);
        for k in 1..=horizon {
            out.push(walk.advance());
            // Keep only positions from which `a` is reachable in the
            // remaining `horizon − k` steps.
            let left = (horizon - k) as i64;
            walk.restrict(a - left * smax, a - left * smin);
        }
        Ok(Pmf::new(1, out))
    }

    /// `(P[τ_0 > n])_{n = 0..=horizon}`; the entry at `n = 0` is 1.
    pub fn survival_tail(&self, horizon: usize) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(T::one());
        if horizon == 0 {
            return Ok(out);
        }
        let fp = self.first_passage_pmf(0, horizon)?;
        let mut hit = T::zero();
        for &p in fp.values() {
            hit = hit + p;
            out.push((T::one() - hit).max(T::zero()));
        }
        Ok(out)
    }

    /// `x ↦ P[S_n = x, Λ^a_n = 0]`.
    pub fn avoid_pmf(&self, a: i64, n: usize) -> Result<Pmf<T>> {
        if n == 0 {
            return Err(Error::Domain("avoid_pmf needs n ≥ 1".into()));
        }
        self.limits.check_table(self.spec, n)?;
        let mut walk = KilledWalk::new(self.spec, a);
        for _ in 0..n {
            walk.advance();
        }
        Ok(walk.distribution().clone())
    }

    /// Killed walk for streaming `avoid` laws over consecutive horizons.
    pub fn killed_walk(&self, a: i64) -> KilledWalk<'a, T> {
        KilledWalk::new(self.spec, a)
    }

    /// Full `(endpoint, occupation count)` table by DP over
    /// `(position, count)` states.
    pub fn joint_pmf(&self, a: i64, n: usize) -> Result<JointTable<T>> {
        if n == 0 {
            return Err(Error::Domain("joint_pmf needs n ≥ 1".into()));
        }
        if n > self.limits.oracle_cap {
            return Err(Error::Resource(format!(
                "joint table horizon {n} exceeds the oracle cap {}",
                self.limits.oracle_cap
            )));
        }
        self.limits.check_table(self.spec, n)?;
        let step = self.spec.step();
        let reach = n as i64 * self.spec.max_step();
        let width = (2 * reach + 1) as usize;
        let layers = n + 1;
        // cur[c * width + (x + reach)] = P[S_k = x, Λ_k = c]
        let mut cur = vec![T::zero(); layers * width];
        let mut next = vec![T::zero(); layers * width];
        cur[reach as usize] = T::one();
        let level = a + reach;
        let level = (0..width as i64).contains(&level).then_some(level as usize);
        let probs: Vec<(i64, T)> = step.support().collect();

        for k in 1..=n {
            next.iter_mut().for_each(|v| *v = T::zero());
            // Positions at time k−1 lie within ±(k−1)·max_step.
            let r_prev = (k as i64 - 1) * self.spec.max_step();
            let lo = (reach - r_prev) as usize;
            let hi = (reach + r_prev) as usize;
            for c in 0..k {
                let src = &cur[c * width..(c + 1) * width];
                let dst = &mut next[c * width..(c + 1) * width];
                for &(s, p) in &probs {
                    let shift = s;
                    let d_lo = (lo as i64 + shift) as usize;
                    for (d, &v) in dst[d_lo..=(hi as i64 + shift) as usize]
                        .iter_mut()
                        .zip(&src[lo..=hi])
                    {
                        *d = *d + p * v;
                    }
                }
            }
            if let Some(ia) = level {
                for c in (0..k).rev() {
                    let v = std::mem::replace(&mut next[c * width + ia], T::zero());
                    next[(c + 1) * width + ia] = next[(c + 1) * width + ia] + v;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }

        // Transpose to x-major rows of length n + 1.
        let mut entries = vec![T::zero(); width * layers];
        for c in 0..layers {
            for xi in 0..width {
                entries[xi * layers + c] = cur[c * width + xi];
            }
        }
        Ok(JointTable {
            n,
            a,
            x_offset: -reach,
            width,
            entries,
        })
    }

    /// `ℓ ↦ P[Λ^a_n = ℓ]` for `ℓ = 0..=n`.
    pub fn occupation_pmf(&self, a: i64, n: usize) -> Result<Pmf<T>> {
        Ok(self.joint_pmf(a, n)?.occupation_marginal())
    }
}

/// Law of `S_n` with default caps.
pub fn marginal_pmf<T: Real>(spec: &WalkSpec<T>, n: usize) -> Result<Pmf<T>> {
    ExactEngine::new(spec).marginal_pmf(n)
}

/// `(P[τ_a = k])_{k=1..=horizon}` with default caps.
pub fn first_passage_pmf<T: Real>(spec: &WalkSpec<T>, a: i64, horizon: usize) -> Result<Pmf<T>> {
    ExactEngine::new(spec).first_passage_pmf(a, horizon)
}

/// `(P[τ_0 > n])_{n=0..=horizon}` with default caps.
pub fn survival_tail<T: Real>(spec: &WalkSpec<T>, horizon: usize) -> Result<Vec<T>> {
    ExactEngine::new(spec).survival_tail(horizon)
}

/// `x ↦ P[S_n = x, Λ^a_n = 0]` with default caps.
pub fn avoid_pmf<T: Real>(spec: &WalkSpec<T>, a: i64, n: usize) -> Result<Pmf<T>> {
    ExactEngine::new(spec).avoid_pmf(a, n)
}

/// Joint table with default caps (oracle horizon ≤ 64).
pub fn joint_pmf<T: Real>(spec: &WalkSpec<T>, a: i64, n: usize) -> Result<JointTable<T>> {
    ExactEngine::new(spec).joint_pmf(a, n)
}

/// `ℓ ↦ P[Λ^a_n = ℓ]` with default caps.
pub fn occupation_pmf<T: Real>(spec: &WalkSpec<T>, a: i64, n: usize) -> Result<Pmf<T>> {
    ExactEngine::new(spec).occupation_pmf(a, n)
}
