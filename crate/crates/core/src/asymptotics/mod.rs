//! Closed-form limit densities and tail functions, the hitting-density
//! convolution identities checked by quadrature, and a Riemann-sum helper.
//!
//! Arguments follow the roles level `a`, endpoint `x`, occupation `ell`,
//! variance `nu`, horizon `n`. Every density is evaluated at the scaled
//! point, so e.g. `n·P[S_n = x, Λ^a_n = ℓ] ≈ phi(ν, a/√n, x/√n, ℓ/√n)`.

mod erf;
mod quadrature;

pub use erf::{erf, erfc};
pub use quadrature::Quadrature;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters of a limit evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitParams<T> {
    pub nu: T,
    pub n: T,
    pub a: T,
    pub x: T,
    pub ell: T,
}

impl<T: Real> LimitParams<T> {
    pub fn validate(&self) -> Result<()> {
        positive("nu", self.nu)?;
        positive("n", self.n)?;
        if !(self.ell >= T::zero()) {
            return Err(Error::Domain(format!(
                "ell must be nonnegative, got {}",
                self.ell
            )));
        }
        if !self.a.is_finite() || !self.x.is_finite() {
            return Err(Error::Domain("a and x must be finite".into()));
        }
        Ok(())
    }

    /// `phi` at `(a, x, ℓ)/√n`, the limit of `n·P[S_n = x, Λ^a_n = ℓ]`.
    pub fn phi_scaled(&self) -> Result<T> {
        self.validate()?;
        let s = self.n.sqrt();
        phi(self.nu, self.a / s, self.x / s, self.ell / s)
    }

    /// `psi` at `(a, ℓ)/√n`, the limit of `√n·P[Λ^a_n = ℓ]`.
    pub fn psi_scaled(&self) -> Result<T> {
        self.validate()?;
        let s = self.n.sqrt();
        psi(self.nu, self.a / s, self.ell / s)
    }
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

#[inline]
fn sqrt_2pi<T: Real>() -> T {
    (T::c(2.0) * T::PI()).sqrt()
}

/// Joint density of `(B_1, L^a)` for Brownian motion of variance `nu`:
/// `(|a|+|x−a|+νℓ) e^{−(|a|+|x−a|+νℓ)²/2ν} / √(2πν)`.
pub fn phi<T: Real>(nu: T, a: T, x: T, ell: T) -> Result<T> {
    positive("nu", nu)?;
    positive("ell", ell)?;
    let r = a.abs() + (x - a).abs() + nu * ell;
    Ok(r * (-r * r / (T::c(2.0) * nu)).exp() / (sqrt_2pi::<T>() * nu.sqrt()))
}

/// Density of `L^a`: `2ν e^{−(|a|+νℓ)²/2ν} / √(2πν)`.
pub fn psi<T: Real>(nu: T, a: T, ell: T) -> Result<T> {
    positive("nu", nu)?;
    positive("ell", ell)?;
    let r = a.abs() + nu * ell;
    Ok(T::c(2.0) * nu * (-r * r / (T::c(2.0) * nu)).exp() / (sqrt_2pi::<T>() * nu.sqrt()))
}

/// `γ_ν(x) = e^{−x²/2ν} / √(2πν)`.
pub fn gaussian_density<T: Real>(nu: T, x: T) -> T {
    (-x * x / (T::c(2.0) * nu)).exp() / (sqrt_2pi::<T>() * nu.sqrt())
}

/// `|x| e^{−x²/2ν} / 2ν`.
pub fn rayleigh_two_sided<T: Real>(nu: T, x: T) -> T {
    x.abs() * (-x * x / (T::c(2.0) * nu)).exp() / (T::c(2.0) * nu)
}

/// `|a| e^{−a²/2νn} / √(2πνn)`, the limit of `n·P[S_n = a, τ_0 > n]`.
pub fn kaigh_hitting_density<T: Real>(nu: T, n: T, a: T) -> T {
    let v = nu * n;
    a.abs() * (-a * a / (T::c(2.0) * v)).exp() / (sqrt_2pi::<T>() * v.sqrt())
}

/// `γ_ν(x/√n) − γ_ν((2a−x)/√n)`, the limit of `√n·P[S_n = x, Λ^a_n = 0]`
/// when `x` lies on the near side of `a`.
pub fn uchiyama_avoid<T: Real>(nu: T, n: T, x: T, a: T) -> Result<T> {
    positive("nu", nu)?;
    positive("n", n)?;
    let z = T::zero();
    if !((a >= z && x <= a) || (a <= z && x >= a)) {
        return Err(Error::Domain(format!(
            "x = {x} is on the far side of level a = {a}"
        )));
    }
    let s = n.sqrt();
    Ok(gaussian_density(nu, x / s) - gaussian_density(nu, (T::c(2.0) * a - x) / s))
}

/// `(νℓ) e^{−(νℓ)²/2νn(m/n)} / √(2πνn(m/n)³)`, the limit of
/// `n·P[Ω_{ℓ−1} = m]`. Depends on `(ℓ/√n, m/n)` up to a factor `1/√n`.
pub fn stable_omega_density<T: Real>(nu: T, n: T, ell: T, m: T) -> T {
    let t = m / n;
    let c = nu * ell;
    c * (-c * c / (T::c(2.0) * nu * n * t)).exp() / (sqrt_2pi::<T>() * (nu * n * t * t * t).sqrt())
}

/// `√(2ν/π)`, the limit of `√n·P[τ_0 > n]`.
pub fn survival_limit<T: Real>(nu: T) -> T {
    (T::c(2.0) * nu / T::PI()).sqrt()
}

/// `erf(|a|/√(2νn))`, the limit of `P[Λ^a_n = 0]`.
pub fn avoid_prob_limit<T: Real>(nu: T, n: T, a: T) -> T {
    erf(a.abs() / (T::c(2.0) * nu * n).sqrt())
}

/// `erfc(1/√(2νz))`, the limit of `P[τ_a ≤ z a²]` as `a → ∞`.
pub fn kaigh_tail<T: Real>(nu: T, z: T) -> T {
    erfc(T::one() / (T::c(2.0) * nu * z).sqrt())
}

/// First-hitting density of level `y > 0` for standard Brownian motion,
/// `y e^{−y²/2u} / √(2πu³)`.
pub fn hitting_density<T: Real>(y: T, u: T) -> T {
    if u <= T::zero() {
        return T::zero();
    }
    y * (-y * y / (T::c(2.0) * u)).exp() / (sqrt_2pi::<T>() * (u * u * u).sqrt())
}

/// The same density for variance `nu`: `y e^{−y²/2νu} / √(2πνu³)`.
pub fn hitting_density_nu<T: Real>(nu: T, y: T, u: T) -> T {
    hitting_density(y / nu.sqrt(), u)
}

/// `(lhs, rhs)` of one of the two convolution identities:
///
/// 1. `∫_0^t h_y(u) h_z(t−u) du = (y+z) e^{−(y+z)²/2t} / √(2πt³)`, y, z > 0;
/// 2. `∫_0^t h_y(u) γ_{t−u}(z) du = e^{−(y+z)²/2t} / √(2πt)`, y > 0, z ≥ 0,
///
/// with `h` the hitting density and `γ_s` the centred Gaussian of variance
/// `s`. The left side is computed by quadrature split at `t/2`; each half
/// is integrated from its singular endpoint.
pub fn integral_identity_check<T: Real>(which: u8, y: T, z: T, t: T) -> Result<(T, T)> {
    integral_identity_check_with(&Quadrature::default(), which, y, z, t)
}

pub fn integral_identity_check_with<T: Real>(
    q: &Quadrature<T>,
    which: u8,
    y: T,
    z: T,
    t: T,
) -> Result<(T, T)> {
    positive("y", y)?;
    positive("t", t)?;
    let two = T::c(2.0);
    let half = t / two;
    match which {
        1 => {
            positive("z", z)?;
            let g = |u: T| hitting_density(y, u) * hitting_density(z, t - u);
            let left = q.integrate_left_singular(g, half, y * y / two)?;
            let right = q.integrate_left_singular(|w| g(t - w), half, z * z / two)?;
            let s = y + z;
            Ok((left + right, hitting_density(s, t)))
        }
        2 => {
            if !(z >= T::zero()) {
                return Err(Error::Domain(format!("z must be nonnegative, got {z}")));
            }
            let kernel = |w: T| gaussian_density(w, z);
            let left = q.integrate_left_singular(
                |u| hitting_density(y, u) * kernel(t - u),
                half,
                y * y / two,
            )?;
            let right = if z > T::zero() {
                q.integrate_left_singular(
                    |w| hitting_density(y, t - w) * kernel(w),
                    half,
                    z * z / two,
                )?
            } else {
                q.integrate_right_sqrt(|u| hitting_density(y, u) * kernel(t - u), half, t)?
            };
            Ok((left + right, gaussian_density(t, y + z)))
        }
        _ => Err(Error::Domain(format!(
            "identity must be 1 or 2, got {which}"
        ))),
    }
}

/// Nested quadrature of
/// `∫_0^1 h^ν_{|a|}(t) ∫_0^{1−t} h^ν_{νℓ}(u) · 2√ν/√(2π(1−t−u)) du dt`,
/// which splits the occupation density at level `a` into the first visit,
/// the excursions and the final stretch; it should reproduce `psi`.
/// For `a = 0` the first visit is immediate.
pub fn occupation_density_by_paths<T: Real>(q: &Quadrature<T>, nu: T, a: T, ell: T) -> Result<T> {
    positive("nu", nu)?;
    positive("ell", ell)?;
    let two = T::c(2.0);
    let y = nu * ell;
    let tail = two * nu.sqrt() / sqrt_2pi::<T>();
    let inner = |s: T| -> T {
        if s <= T::zero() {
            return T::zero();
        }
        let g = |u: T| hitting_density_nu(nu, y, u) * tail / (s - u).sqrt();
        let left = q.integrate_left_singular(g, s / two, y * y / (two * nu));
        let right = q.integrate_right_sqrt(g, s / two, s);
        match (left, right) {
            (Ok(l), Ok(r)) => l + r,
            // Surfaces as a non-finite integrand in the outer rule.
            _ => T::nan(),
        }
    };
    if a == T::zero() {
        return Ok(inner(T::one()));
    }
    let b = a.abs();
    let f = |t: T| hitting_density_nu(nu, b, t) * inner(T::one() - t);
    let left = q.integrate_left_singular(f, T::c(0.5), b * b / (two * nu))?;
    let right = q.integrate(f, T::c(0.5), T::one())?;
    Ok(left + right)
}

/// `(1/n) Σ_{k=⌊n c1⌋}^{⌊n α⌋−1} f(k/n, y)`.
pub fn riemann_sum<T: Real, F: Fn(T, &[T]) -> T>(f: F, c1: T, alpha: T, n: usize, y: &[T]) -> T {
    let nn = T::of_usize(n);
    let lo = (nn * c1).floor().to_i64().unwrap_or(0);
    let hi = (nn * alpha).floor().to_i64().unwrap_or(0);
    let mut acc = T::zero();
    for k in lo..hi {
        acc = acc + f(T::of_i64(k) / nn, y);
    }
    acc / nn
}

/// Names accepted by [`evaluate`], with their argument lists.
pub const FUNCTIONS: &[(&str, &str)] = &[
    ("phi", "nu a x ell"),
    ("psi", "nu a ell"),
    ("gaussian_density", "nu x"),
    ("rayleigh_two_sided", "nu x"),
    ("kaigh_hitting_density", "nu n a"),
    ("uchiyama_avoid", "nu n x a"),
    ("stable_omega_density", "nu n ell m"),
    ("survival_limit", "nu"),
    ("avoid_prob_limit", "nu n a"),
    ("kaigh_tail", "nu z"),
    ("erf", "x"),
    ("erfc", "x"),
];

/// Evaluates one of [`FUNCTIONS`] by name.
pub fn evaluate<T: Real>(name: &str, args: &[T]) -> Result<T> {
    let Some((_, sig)) = FUNCTIONS.iter().find(|(n, _)| *n == name) else {
        return Err(Error::Domain(format!("unknown function {name}")));
    };
    let arity = sig.split_whitespace().count();
    if args.len() != arity {
        return Err(Error::Domain(format!(
            "{name} takes {arity} arguments ({sig}), got {}",
            args.len()
        )));
    }
    let a = args;
    let needs_positive_nu = name != "erf" && name != "erfc";
    if needs_positive_nu {
        positive("nu", a[0])?;
    }
    Ok(match name {
        "phi" => phi(a[0], a[1], a[2], a[3])?,
        "psi" => psi(a[0], a[1], a[2])?,
        "gaussian_density" => gaussian_density(a[0], a[1]),
        "rayleigh_two_sided" => rayleigh_two_sided(a[0], a[1]),
        "kaigh_hitting_density" => {
            positive("n", a[1])?;
            kaigh_hitting_density(a[0], a[1], a[2])
        }
        "uchiyama_avoid" => uchiyama_avoid(a[0], a[1], a[2], a[3])?,
        "stable_omega_density" => {
            for (k, v) in ["n", "ell", "m"].iter().zip(&a[1..]) {
                positive(k, *v)?;
            }
            stable_omega_density(a[0], a[1], a[2], a[3])
        }
        "survival_limit" => survival_limit(a[0]),
        "avoid_prob_limit" => {
            positive("n", a[1])?;
            avoid_prob_limit(a[0], a[1], a[2])
        }
        "kaigh_tail" => {
            positive("z", a[1])?;
            kaigh_tail(a[0], a[1])
        }
        "erf" => erf(a[0]),
        _ => erfc(a[0]),
    })
}

#[cfg(test)]
mod tests;
