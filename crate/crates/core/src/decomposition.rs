//! Joint and occupation laws from the path decomposition at level `a`.
//!
//! A path with `ℓ ≥ 1` visits to `a` splits into the segment before the
//! first visit (length `τ_a`, absent when `a = 0`), `ℓ − 1` excursions from
//! `a` back to `a` (total length `Ω_{ℓ−1}`, a sum of i.i.d. copies of
//! `τ_0`), and a final segment that avoids `a` (absent when `x = a`). The
//! final segment ending at `x` has the law of `τ_{x−a}` by the duality
//! `P[S_j = y, τ_0 > j] = P[τ_y = j]`; without a prescribed endpoint its
//! length is weighted by the survival tail `P[τ_0 > j]`.
//!
//! Writing `f_y(k) = P[τ_y = k]`, `g_u(m) = P[Ω_u = m]` (with `Ω_0 ≡ 0`)
//! and `s(j) = P[τ_0 > j]`:
//!
//! | case          | `P[S_n = x, Λ^a_n = ℓ]`  | `P[Λ^a_n = ℓ]`       |
//! |---------------|--------------------------|----------------------|
//! | `a ≠ 0, x ≠ a`| `(f_a ∗ g_{ℓ−1} ∗ f_{x−a})(n)` | `(f_a ∗ g_{ℓ−1} ∗ s)(n)` |
//! | `a = 0, x ≠ 0`| `(g_ℓ ∗ f_x)(n)`         | `(g_ℓ ∗ s)(n)`       |
//! | `a ≠ 0, x = a`| `(f_a ∗ g_{ℓ−1})(n)`     |                      |
//! | `a = 0, x = 0`| `g_ℓ(n)`                 |                      |
//!
//! The last case is a single term: the path ends on its `ℓ`-th return.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::convolve::{convolve_capped, self_convolve_power};
use crate::error::{Error, Result};
use crate::exact::{ExactEngine, Limits};
use crate::pmf::Pmf;
use crate::scalar::Real;
use crate::walk_model::WalkSpec;

type Cache<K, V> = Mutex<HashMap<K, Arc<V>>>;

/// Decomposition evaluator with memoized first-passage laws, `Ω` powers,
/// survival tails, and pre-segment convolutions.
///
/// Caches are keyed by value and guarded internally, so one `Decomposer`
/// may be shared across threads.
#[derive(Debug)]
pub struct Decomposer<'a, T> {
    engine: ExactEngine<'a, T>,
    passage: Cache<(i64, usize), Pmf<T>>,
    omega: Cache<(usize, usize), Pmf<T>>,
    survival: Cache<usize, Pmf<T>>,
    head: Cache<(i64, usize, usize), Pmf<T>>,
}

fn memo<K, V, F>(cache: &Cache<K, V>, key: K, make: F) -> Result<Arc<V>>
where
    K: std::hash::Hash + Eq + Copy,
    F: FnOnce() -> Result<V>,
{
    if let Some(v) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(Arc::clone(v));
    }
    // Computed outside the lock; a racing duplicate is discarded.
    let v = Arc::new(make()?);
    Ok(Arc::clone(
        cache
            .lock()
            .expect("cache poisoned")
            .entry(key)
            .or_insert(v),
    ))
}

impl<'a, T: Real> Decomposer<'a, T> {
    pub fn new(spec: &'a WalkSpec<T>) -> Self {
        Self::with_limits(spec, Limits::default())
    }

    pub fn with_limits(spec: &'a WalkSpec<T>, limits: Limits) -> Self {
        Self {
            engine: ExactEngine::with_limits(spec, limits),
            passage: Mutex::default(),
            omega: Mutex::default(),
            survival: Mutex::default(),
            head: Mutex::default(),
        }
    }

    pub fn engine(&self) -> &ExactEngine<'a, T> {
        &self.engine
    }

    /// `k ↦ P[τ_level = k]` for `k ≤ horizon`.
    pub fn first_passage(&self, level: i64, horizon: usize) -> Result<Arc<Pmf<T>>> {
        memo(&self.passage, (level, horizon), || {
            self.engine.first_passage_pmf(level, horizon)
        })
    }

    /// `m ↦ P[Ω_u = m]` for `m ≤ horizon`.
    pub fn omega(&self, u: usize, horizon: usize) -> Result<Arc<Pmf<T>>> {
        memo(&self.omega, (u, horizon), || {
            if u == 0 {
                return Ok(Pmf::delta(0));
            }
            let base = self.first_passage(0, horizon)?;
            Ok(self_convolve_power(&base, u, horizon)?.pmf)
        })
    }

    /// `j ↦ P[τ_0 > j]` for `j = 0..=horizon`.
    pub fn survival(&self, horizon: usize) -> Result<Arc<Pmf<T>>> {
        memo(&self.survival, horizon, || {
            // Reuses a cached τ_0 law when one exists for this horizon.
            let mut out = Vec::with_capacity(horizon + 1);
            out.push(T::one());
            if horizon > 0 {
                let fp = self.first_passage(0, horizon)?;
                let mut hit = T::zero();
                for &p in fp.values() {
                    hit = hit + p;
                    out.push((T::one() - hit).max(T::zero()));
                }
            }
            Ok(Pmf::new(0, out))
        })
    }

    /// `f_a ∗ g_u` truncated at `horizon`.
    fn head(&self, a: i64, u: usize, horizon: usize) -> Result<Arc<Pmf<T>>> {
        memo(&self.head, (a, u, horizon), || {
            let fa = self.first_passage(a, horizon)?;
            let g = self.omega(u, horizon)?;
            let mut h = convolve_capped(&fa, &g, self.engine.limits().convolution_cap)?;
            h.truncate_above(horizon as i64);
            Ok(h)
        })
    }

    fn check(n: usize, ell: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Domain("horizon n must be ≥ 1".into()));
        }
        if ell == 0 {
            return Err(Error::Domain(
                "ℓ = 0 is the avoiding law; use avoid_pmf".into(),
            ));
        }
        if ell > n {
            return Err(Error::Domain(format!(
                "ℓ = {ell} exceeds the horizon n = {n}"
            )));
        }
        Ok(())
    }

    /// `P[S_n = x, Λ^a_n = ℓ]` for `1 ≤ ℓ ≤ n`.
    pub fn joint(&self, n: usize, x: i64, a: i64, ell: usize) -> Result<T> {
        Self::check(n, ell)?;
        let at = n as i64;
        Ok(match (a == 0, x == a) {
            (false, false) => {
                let head = self.head(a, ell - 1, n)?;
                let tail = self.first_passage(x - a, n)?;
                head.convolve_at(&tail, at)
            }
            (true, false) => {
                let g = self.omega(ell, n)?;
                let tail = self.first_passage(x, n)?;
                g.convolve_at(&tail, at)
            }
            (false, true) => self.head(a, ell - 1, n)?.get(at),
            (true, true) => self.omega(ell, n)?.get(at),
        })
    }

    /// `P[Λ^a_n = ℓ]` for `1 ≤ ℓ ≤ n`.
    pub fn occupation(&self, n: usize, a: i64, ell: usize) -> Result<T> {
        Self::check(n, ell)?;
        let at = n as i64;
        let s = self.survival(n)?;
        let lead = if a == 0 {
            self.omega(ell, n)?
        } else {
            self.head(a, ell - 1, n)?
        };
        Ok(lead.convolve_at(&s, at))
    }
}

/// `P[S_n = x, Λ^a_n = ℓ]` via the path decomposition.
pub fn joint_via_decomposition<T: Real>(
    spec: &WalkSpec<T>,
    n: usize,
    x: i64,
    a: i64,
    ell: usize,
) -> Result<T> {
    Decomposer::new(spec).joint(n, x, a, ell)
}

/// `P[Λ^a_n = ℓ]` via the path decomposition.
pub fn occupation_via_decomposition<T: Real>(
    spec: &WalkSpec<T>,
    n: usize,
    a: i64,
    ell: usize,
) -> Result<T> {
    Decomposer::new(spec).occupation(n, a, ell)
}
