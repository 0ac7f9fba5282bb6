//! Convolution of mass functions and truncated convolution powers.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::exact::Limits;
use crate::pmf::Pmf;
use crate::scalar::Real;

/// Output length above which convolution goes through the FFT.
pub const FFT_THRESHOLD: usize = 256;

/// FFT outputs in `(−CLAMP_FLOOR, 0)` are roundoff and become 0; anything
/// at or below `−CLAMP_FLOOR` is reported as a numerical error.
pub const CLAMP_FLOOR: f64 = 1e-12;

/// Law of `Ω_u = ω_1 + ⋯ + ω_u` for i.i.d. `ω_k`, truncated to `m ≤ horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaLaw<T> {
    pub u: usize,
    pub horizon: usize,
    pub pmf: Pmf<T>,
}

impl<T: Real> OmegaLaw<T> {
    /// `P[Ω_u = m]`.
    pub fn prob(&self, m: i64) -> T {
        self.pmf.get(m)
    }
}

/// Exact convolution with the default output cap.
pub fn convolve<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<Pmf<T>> {
    convolve_capped(p, q, Limits::default().convolution_cap)
}

pub fn convolve_capped<T: Real>(p: &Pmf<T>, q: &Pmf<T>, cap: usize) -> Result<Pmf<T>> {
    if p.is_empty() || q.is_empty() {
        return Ok(Pmf::zero());
    }
    let len = p.len() + q.len() - 1;
    if len > cap {
        return Err(Error::Resource(format!(
            "convolution length {len} exceeds cap {cap}"
        )));
    }
    let offset = p.offset() + q.offset();
    let values = if len > FFT_THRESHOLD {
        clamp_roundoff(fft_convolve(p.values(), q.values()))?
    } else {
        direct_convolve(p.values(), q.values())
    };
    Ok(Pmf::new(offset, values))
}

/// `O(|p|·|q|)` convolution.
pub fn direct_convolve<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (o, &b) in out[i..].iter_mut().zip(q) {
            *o = *o + a * b;
        }
    }
    out
}

/// Convolution through a zero-padded complex FFT; result is unclamped.
pub fn fft_convolve<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let len = p.len() + q.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    // Pack both real inputs into one complex signal: z = p + i·q.
    let mut z = vec![Complex::new(T::zero(), T::zero()); size];
    for (slot, &v) in z.iter_mut().zip(p) {
        slot.re = v;
    }
    for (slot, &v) in z.iter_mut().zip(q) {
        slot.im = v;
    }
    fwd.process(&mut z);

    // P(k) = (Z(k) + conj Z(−k)) / 2, Q(k) = (Z(k) − conj Z(−k)) / 2i,
    // hence P·Q = (Z(k)² − conj Z(−k)²) / 4i.
    let quarter = T::c(0.25);
    let mut prod = vec![Complex::new(T::zero(), T::zero()); size];
    for k in 0..size {
        let zk = z[k];
        let zm = z[(size - k) % size].conj();
        let d = zk * zk - zm * zm;
        // divide by 4i: (re + i·im)/(4i) = (im − i·re)/4
        prod[k] = Complex::new(d.im * quarter, -d.re * quarter);
    }
    inv.process(&mut prod);
    let scale = T::one() / T::of_usize(size);
    prod.iter().take(len).map(|c| c.re * scale).collect()
}

fn clamp_roundoff<T: Real>(mut v: Vec<T>) -> Result<Vec<T>> {
    let floor = T::c(CLAMP_FLOOR);
    for (i, x) in v.iter_mut().enumerate() {
        if *x < T::zero() {
            if *x > -floor {
                *x = T::zero();
            } else {
                return Err(Error::Numerical(format!(
                    "convolution produced {x} at position {i}"
                )));
            }
        }
    }
    Ok(v)
}

/// Law of the sum of `u` i.i.d. copies of `p`, restricted to `[u, horizon]`.
///
/// `p` must be a sub-probability law on `{1, 2, …}`. Computed by binary
/// exponentiation; every product is truncated at `horizon` before the next
/// multiply, which only discards mass that can never come back below the
/// horizon. `u = 0` gives the unit mass at 0.
pub fn self_convolve_power<T: Real>(p: &Pmf<T>, u: usize, horizon: usize) -> Result<OmegaLaw<T>> {
    if p.iter().any(|(i, v)| i < 1 && v > T::zero()) {
        return Err(Error::Domain(
            "power base must carry no mass below index 1".into(),
        ));
    }
    let h = horizon as i64;
    let mut base = p.restricted(1, h).trimmed();
    let mut acc = Pmf::delta(0);
    let mut e = u;
    while e > 0 {
        if e & 1 == 1 {
            acc = convolve(&acc, &base)?;
            acc.truncate_above(h);
        }
        e >>= 1;
        if e > 0 {
            base = convolve(&base, &base)?;
            base.truncate_above(h);
        }
    }
    Ok(OmegaLaw {
        u,
        horizon,
        pmf: acc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pmf(rng: &mut ChaCha8Rng, len: usize, offset: i64) -> Pmf<f64> {
        let v: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        let s: f64 = v.iter().sum();
        Pmf::new(offset, v.into_iter().map(|x| x / s).collect())
    }

    fn max_diff(a: &Pmf<f64>, b: &Pmf<f64>) -> f64 {
        let lo = a.offset().min(b.offset());
        let hi = a.end().max(b.end());
        (lo..hi)
            .map(|i| (a.get(i) - b.get(i)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn delta_is_identity() {
        let p = Pmf::new(-2, vec![0.1, 0.2, 0.3, 0.4]);
        let r = convolve(&Pmf::delta(0), &p).unwrap();
        assert_eq!(r, p);
        let shifted = convolve(&Pmf::delta(5), &p).unwrap();
        assert_eq!(shifted.offset(), 3);
    }

    #[test]
    fn w3_self_convolution_by_hand() {
        let t: f64 = 1.0 / 3.0;
        let w = Pmf::new(-1, vec![t, t, t]);
        let r = convolve(&w, &w).unwrap();
        assert_eq!(r.offset(), -2);
        let hand = [1.0, 2.0, 3.0, 2.0, 1.0].map(|k| k / 9.0);
        for (i, h) in (-2..=2).zip(hand) {
            assert!((r.get(i) - h).abs() < 1e-16);
        }
    }

    #[test]
    fn fft_matches_direct_at_2048() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_pmf(&mut rng, 2048, 0);
        let q = random_pmf(&mut rng, 2048, -100);
        let fast = convolve(&p, &q).unwrap();
        let slow = Pmf::new(-100, direct_convolve(p.values(), q.values()));
        assert!(max_diff(&fast, &slow) <= 1e-10);
    }

    #[test]
    fn fft_matches_direct_up_to_2_pow_14() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in [257usize, 1000, 4096, 1 << 14] {
            let p: Vec<f64> = (0..len).map(|_| rng.gen()).collect();
            let q: Vec<f64> = (0..len / 3 + 1).map(|_| rng.gen()).collect();
            let fast = fft_convolve(&p, &q);
            let slow = direct_convolve(&p, &q);
            let err = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err <= 1e-10, "len {len}: {err}");
        }
    }

    #[test]
    fn negative_fft_output_is_reported() {
        assert!(matches!(
            clamp_roundoff(vec![0.5, -1e-3]),
            Err(Error::Numerical(_))
        ));
        assert_eq!(clamp_roundoff(vec![0.5, -1e-14]).unwrap(), vec![0.5, 0.0]);
    }

    #[test]
    fn length_cap() {
        let p = Pmf::new(0, vec![0.5; 10]);
        assert!(matches!(
            convolve_capped(&p, &p, 18),
            Err(Error::Resource(_))
        ));
        assert!(convolve_capped(&p, &p, 19).is_ok());
    }

    fn tau0_w3() -> Pmf<f64> {
        // P[τ_0 = 1] = 1/3, P[τ_0 = 2] = 2/9 by enumeration; higher terms
        // are irrelevant below horizon 4 for the checks here.
        Pmf::new(1, vec![1.0 / 3.0, 2.0 / 9.0])
    }

    #[test]
    fn omega_powers_by_hand() {
        let p = tau0_w3();
        let one = self_convolve_power(&p, 1, 4).unwrap();
        assert_eq!(one.pmf.trimmed(), p);
        let two = self_convolve_power(&p, 2, 4).unwrap();
        assert!((two.prob(2) - 1.0 / 9.0).abs() < 1e-16);
        assert!((two.prob(3) - 4.0 / 27.0).abs() < 1e-16);
        assert_eq!(two.prob(1), 0.0);
        let zero = self_convolve_power(&p, 0, 4).unwrap();
        assert_eq!(zero.prob(0), 1.0);
    }

    #[test]
    fn omega_power_rejects_mass_below_one() {
        let bad = Pmf::new(0, vec![0.1, 0.2]);
        assert!(matches!(
            self_convolve_power(&bad, 2, 5),
            Err(Error::Domain(_))
        ));
        // Explicit zero at index 0 is fine.
        assert!(self_convolve_power(&bad.restricted(1, 1), 2, 5).is_ok());
    }

    #[test]
    fn omega_support_and_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = {
            let q = random_pmf(&mut rng, 300, 1);
            Pmf::new(1, q.values().iter().map(|v| v * 0.9).collect())
        };
        let horizon = 600;
        let mut prev_mass = f64::INFINITY;
        for u in 1..12 {
            let w = self_convolve_power(&p, u, horizon).unwrap();
            assert!(w.pmf.iter().all(|(i, v)| i >= u as i64 || v == 0.0));
            assert!(w.pmf.end() - 1 <= horizon as i64);
            let m = w.pmf.mass();
            assert!(m <= 0.9f64.powi(u as i32) + 1e-11);
            assert!(m <= prev_mass + 1e-12);
            prev_mass = m;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn convolution_is_associative_and_commutative(
            seed in any::<u64>(), la in 1usize..40, lb in 1usize..300, lc in 1usize..90,
            oa in -20i64..20, ob in -20i64..20,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_pmf(&mut rng, la, oa);
            let b = random_pmf(&mut rng, lb, ob);
            let c = random_pmf(&mut rng, lc, 0);
            let left = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
            let right = convolve(&convolve(&a, &b).unwrap(), &c).unwrap();
            prop_assert!(max_diff(&left, &right) <= 1e-12);
            let ab = convolve(&a, &b).unwrap();
            let ba = convolve(&b, &a).unwrap();
            prop_assert!(max_diff(&ab, &ba) <= 1e-12);
            prop_assert!((ab.mass() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn powers_compose(seed in any::<u64>(), len in 2usize..200, u in 0usize..9, v in 0usize..9, horizon in 10usize..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random_pmf(&mut rng, len, 1);
            let p = Pmf::new(1, q.values().iter().map(|x| x * 0.95).collect());
            let whole = self_convolve_power(&p, u + v, horizon).unwrap();
            let mut parts = convolve(
                &self_convolve_power(&p, u, horizon).unwrap().pmf,
                &self_convolve_power(&p, v, horizon).unwrap().pmf,
            ).unwrap();
            parts.truncate_above(horizon as i64);
            prop_assert!(max_diff(&whole.pmf, &parts) <= 1e-11);
        }
    }
}
