//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are kept in a max-heap keyed by their error estimate and the worst
//! panel is bisected until the summed estimate meets the tolerance. The
//! wrappers below map half-lines and endpoint singularities onto finite,
//! smooth problems before handing them to the same driver.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// `e^{−CUTOFF_LOG}` ≈ 1e−300: below this the exponential factor of a
/// left-singular integrand is treated as zero.
const CUTOFF_LOG: f64 = 300.0 * std::f64::consts::LN_10;

/// Quadrature settings. `abs_tol` is an absolute target; it is widened to
/// `50·ε·|I|` when the scalar type cannot resolve it.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub abs_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::c(1e-10),
            max_panels: 20_000,
        }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Result<Panel<T>> {
    let half = (b - a) * T::c(0.5);
    let mid = a + half;
    let fc = f(mid);
    check_finite(fc, mid)?;
    let mut kronrod = fc * T::c(WGK[7]);
    let mut gauss = fc * T::c(WG[3]);
    for j in 0..7 {
        let dx = half * T::c(XGK[j]);
        let (x1, x2) = (mid - dx, mid + dx);
        let (f1, f2) = (f(x1), f(x2));
        check_finite(f1, x1)?;
        check_finite(f2, x2)?;
        kronrod = kronrod + (f1 + f2) * T::c(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * T::c(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs().as_f64();
    Ok(Panel { a, b, value, err })
}

fn check_finite<T: Real>(v: T, at: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Quadrature(format!("integrand is {v} at {at}")))
    }
}

impl<T: Real> Quadrature<T> {
    pub fn with_tol(abs_tol: T) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    /// `∫_a^b f`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> Result<T> {
        if a == b {
            return Ok(T::zero());
        }
        if a > b {
            return self.integrate(f, b, a).map(|v| -v);
        }
        let mut heap = BinaryHeap::new();
        let first = gk15(&mut f, a, b)?;
        let mut total = first.value;
        let mut total_err = first.err;
        heap.push(first);
        // Panels too narrow to bisect further keep their error here.
        let mut frozen_err = 0.0;
        let mut panels = 1usize;
        loop {
            let tol = self
                .abs_tol
                .as_f64()
                .max(50.0 * T::epsilon().as_f64() * total.abs().as_f64());
            if total_err + frozen_err <= tol {
                return Ok(total);
            }
            let Some(worst) = heap.pop() else {
                break;
            };
            let mid = (worst.a + worst.b) * T::c(0.5);
            if !(mid > worst.a && mid < worst.b) || panels >= self.max_panels {
                frozen_err += worst.err;
                total_err -= worst.err;
                if panels >= self.max_panels {
                    break;
                }
                continue;
            }
            let left = gk15(&mut f, worst.a, mid)?;
            let right = gk15(&mut f, mid, worst.b)?;
            total = total - worst.value + left.value + right.value;
            total_err += left.err + right.err - worst.err;
            heap.push(left);
            heap.push(right);
            panels += 1;
        }
        let remaining: f64 = heap.iter().map(|p| p.err).sum::<f64>() + frozen_err;
        Err(Error::Quadrature(format!(
            "error estimate {remaining:.3e} above tolerance on [{a}, {b}] after {panels} panels"
        )))
    }

    /// `∫_a^∞ f`, via `u = a + s/(1 − s)`.
    pub fn integrate_to_infinity<F: FnMut(T) -> T>(&self, mut f: F, a: T) -> Result<T> {
        self.integrate(
            |s| {
                let w = T::one() - s;
                let u = a + s / w;
                if !u.is_finite() {
                    return T::zero();
                }
                f(u) / (w * w)
            },
            T::zero(),
            T::one(),
        )
    }

    /// `∫_ℝ f`, split at `center`.
    pub fn integrate_real_line<F: FnMut(T) -> T>(&self, mut f: F, center: T) -> Result<T> {
        let right = self.integrate_to_infinity(&mut f, center)?;
        let left = self.integrate_to_infinity(|u| f(T::c(2.0) * center - u), center)?;
        Ok(left + right)
    }

    /// `∫_0^b f` for `f(u)` carrying a factor `e^{−c/u}` (times a power of
    /// `u`) at the left endpoint. The piece where that factor is below
    /// 1e−300 is dropped and the rest is integrated in `v = 1/u`.
    pub fn integrate_left_singular<F: FnMut(T) -> T>(&self, mut f: F, b: T, c: T) -> Result<T> {
        if !(c > T::zero()) {
            return Err(Error::Domain(format!(
                "left-singular rule needs c > 0, got {c}"
            )));
        }
        let cutoff_log = T::c(CUTOFF_LOG).min(-T::min_positive_value().ln());
        let u0 = c / cutoff_log;
        if u0 >= b {
            return Ok(T::zero());
        }
        self.integrate(|v| f(T::one() / v) / (v * v), T::one() / b, T::one() / u0)
    }

    /// `∫_a^b f` for `f` with an inverse square-root singularity at `b`,
    /// via `u = b − w²`.
    pub fn integrate_right_sqrt<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> Result<T> {
        if b <= a {
            return Ok(T::zero());
        }
        self.integrate(|w| T::c(2.0) * w * f(b - w * w), T::zero(), (b - a).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = Quadrature::<f64>::default();
        let v = q.integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
        assert_eq!(q.integrate(|x| x, 1.0, 1.0).unwrap(), 0.0);
        assert!((q.integrate(|x| x, 1.0, 0.0).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn gaussian_over_the_line() {
        let q = Quadrature::<f64>::default();
        let g = |x: f64| (-x * x / 2.0).exp();
        let v = q.integrate_real_line(g, 0.3).unwrap();
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn levy_density_mass_below_one() {
        // ∫_0^1 e^{−1/2u}/√(2πu³) du = erfc(1/√2)
        let q = Quadrature::<f64>::default();
        let h = |u: f64| (-0.5 / u).exp() / (2.0 * std::f64::consts::PI * u.powi(3)).sqrt();
        let v = q.integrate_left_singular(h, 1.0, 0.5).unwrap();
        assert!((v - 0.317_310_507_862_914_1).abs() < 1e-10);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        let q = Quadrature::<f64>::default();
        let v = q
            .integrate_right_sqrt(|u: f64| 1.0 / (1.0 - u).sqrt(), 0.0, 1.0)
            .unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let q = Quadrature {
            abs_tol: 1e-14,
            max_panels: 8,
        };
        let err = q
            .integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)));
        let err = q.integrate(|_x: f64| f64::NAN, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)));
    }

    #[test]
    fn f32_uses_relative_floor() {
        let q = Quadrature::<f32>::default();
        let v = q.integrate(|x| x.exp(), 0.0, 1.0).unwrap();
        assert!((v - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }
}
