use super::*;
use proptest::prelude::*;

const E_HALF_OVER_SQRT_2PI: f64 = 0.241_970_724_519_143_35;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn phi_reference_values() {
    assert!(close(
        phi(1.0, 0.0, 0.0, 1.0).unwrap(),
        E_HALF_OVER_SQRT_2PI,
        1e-15
    ));
    assert!(close(
        phi(2.0 / 3.0, 0.0, 0.0, 1.0).unwrap(),
        0.233_399_332_135_629_78,
        1e-15
    ));
    assert!(close(
        phi(1.0, 1.0, 1.0, 1e-12).unwrap(),
        E_HALF_OVER_SQRT_2PI,
        1e-11
    ));
    assert!(matches!(phi(1.0, 0.0, 0.0, 0.0), Err(Error::Domain(_))));
    assert!(matches!(phi(0.0, 0.0, 0.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn psi_reference_values() {
    assert!(close(
        psi(1.0, 0.0, 1.0).unwrap(),
        2.0 * E_HALF_OVER_SQRT_2PI,
        1e-15
    ));
    assert!(close(
        psi(1.0, 0.0, 1e-12).unwrap(),
        2.0 * INV_SQRT_2PI,
        1e-11
    ));
    assert!(matches!(psi(1.0, 0.0, -1.0), Err(Error::Domain(_))));
}

#[test]
fn gaussian_and_rayleigh() {
    assert!(close(gaussian_density(1.0, 0.0), INV_SQRT_2PI, 1e-16));
    assert_eq!(rayleigh_two_sided(1.0, 0.0), 0.0);
    let q = Quadrature::default();
    let mass = q
        .integrate_real_line(|x| rayleigh_two_sided(1.0, x), 0.0)
        .unwrap();
    assert!(close(mass, 1.0, 1e-8));
}

#[test]
fn kaigh_density_values() {
    assert_eq!(kaigh_hitting_density(1.0, 50.0, 0.0), 0.0);
    assert!(close(
        kaigh_hitting_density(1.0, 1.0, 1.0),
        E_HALF_OVER_SQRT_2PI,
        1e-15
    ));
    assert!(close(
        kaigh_hitting_density(2.0 / 3.0, 100.0, 10.0),
        0.230_799_484_208_182_89,
        1e-15
    ));
}

#[test]
fn uchiyama_values_and_domain() {
    assert_eq!(uchiyama_avoid(1.0, 9.0, 2.0, 2.0).unwrap(), 0.0);
    assert!(close(
        uchiyama_avoid(1.0, 1.0, 0.0, 1.0).unwrap(),
        0.344_951_313_888_244_6,
        1e-15
    ));
    let far = uchiyama_avoid(1.0, 1.0, 0.5, 60.0).unwrap();
    assert!(close(far, gaussian_density(1.0, 0.5), 1e-300));
    assert!(uchiyama_avoid(1.0, 4.0, -1.0, -3.0).unwrap() > 0.0);
    assert!(matches!(
        uchiyama_avoid(1.0, 1.0, 2.0, 1.0),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        uchiyama_avoid(1.0, 1.0, -2.0, -1.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn omega_density_values() {
    assert!(close(
        stable_omega_density(1.0, 100.0, 10.0, 100.0),
        E_HALF_OVER_SQRT_2PI,
        1e-15
    ));
    assert!(stable_omega_density(1.0, 100.0, 10.0, 1e12) < 1e-12);
    let base = stable_omega_density(2.0 / 3.0, 64.0, 8.0, 30.0);
    for k in [2.0f64, 4.0, 8.0] {
        let scaled = stable_omega_density(2.0 / 3.0, 64.0 * k * k, 8.0 * k, 30.0 * k * k);
        assert!(close(scaled, base, 1e-14 * base));
    }
}

#[test]
fn tail_limits() {
    assert!(close(
        survival_limit(2.0 / 3.0),
        0.651_470_015_870_559_9,
        1e-15
    ));
    assert_eq!(avoid_prob_limit(0.7, 10.0, 0.0), 0.0);
    assert!(close(kaigh_tail(0.5, 1.0), 0.157_299_207_050_285_13, 1e-15));
}

#[test]
fn appendix_identity_examples() {
    let (lhs, rhs) = integral_identity_check(1, 1.0, 1.0, 1.0).unwrap();
    assert!(close(rhs, 0.107_981_933_026_376_1, 1e-15));
    assert!(close(lhs, rhs, 1e-8));
    let (lhs, rhs) = integral_identity_check(2, 1.0, 0.0, 1.0).unwrap();
    assert!(close(rhs, E_HALF_OVER_SQRT_2PI, 1e-15));
    assert!(close(lhs, rhs, 1e-8));
    let (_, r1) = integral_identity_check(2, 0.5, 1.5, 2.0).unwrap();
    let (_, r2) = integral_identity_check(2, 1.5, 0.5, 2.0).unwrap();
    assert_eq!(r1, r2);
    assert!(matches!(
        integral_identity_check(3, 1.0, 1.0, 1.0),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        integral_identity_check(1, 1.0, 0.0, 1.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn appendix_identities_on_grid() {
    let vals = [0.25, 0.5, 1.0, 2.0, 4.0];
    for which in [1u8, 2] {
        for &y in &vals {
            for &z in &vals {
                for t in [0.5, 1.0, 2.0] {
                    let (lhs, rhs) = integral_identity_check(which, y, z, t).unwrap();
                    assert!(
                        close(lhs, rhs, 1e-8),
                        "identity {which} y={y} z={z} t={t}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }
}

#[test]
fn phi_integrates_to_psi() {
    let q = Quadrature::default();
    for nu in [1.0, 2.0 / 3.0] {
        for a in [-1.0, 0.0, 0.5, 2.0] {
            for ell in [0.25, 1.0, 2.0] {
                let lhs = q
                    .integrate_real_line(|x| phi(nu, a, x, ell).unwrap(), a)
                    .unwrap();
                let rhs = psi(nu, a, ell).unwrap();
                assert!(close(lhs, rhs, 1e-8), "nu={nu} a={a} ell={ell}");
            }
        }
    }
}

#[test]
fn joint_density_and_avoid_mass_total_one() {
    let q = Quadrature::default();
    for nu in [1.0, 2.0 / 3.0] {
        for a in [0.0, 0.5, -1.5] {
            let occupied = q
                .integrate_to_infinity(
                    |ell| {
                        if ell <= 0.0 {
                            return 0.0;
                        }
                        q.integrate_real_line(|x| phi(nu, a, x, ell).unwrap(), a)
                            .unwrap_or(f64::NAN)
                    },
                    0.0,
                )
                .unwrap();
            let avoid = erf(f64::abs(a) / (2.0 * nu).sqrt());
            assert!(close(occupied + avoid, 1.0, 1e-6), "nu={nu} a={a}");
        }
    }
}

#[test]
fn reflected_gaussian_integrates_to_avoid_probability() {
    let q = Quadrature::default();
    for (nu, n, a) in [(1.0, 1.0, 1.0), (2.0 / 3.0, 100.0, 7.0), (0.5, 16.0, 2.0)] {
        let s = f64::sqrt(n);
        let v = q
            .integrate_to_infinity(|w| uchiyama_avoid(nu, n, a - w, a).unwrap() / s, 0.0)
            .unwrap();
        assert!(
            close(v, avoid_prob_limit(nu, n, a), 1e-8),
            "nu={nu} n={n} a={a}"
        );
    }
}

#[test]
fn path_split_reproduces_psi() {
    let q = Quadrature::with_tol(1e-9);
    for (nu, a, ell) in [
        (1.0, 0.5, 0.5),
        (1.0, 1.0, 1.0),
        (2.0 / 3.0, 1.0, 1.0),
        (2.0 / 3.0, 0.0, 0.5),
    ] {
        let lhs = occupation_density_by_paths(&q, nu, a, ell).unwrap();
        let rhs = psi(nu, a, ell).unwrap();
        assert!(
            close(lhs, rhs, 1e-6),
            "nu={nu} a={a} ell={ell}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn riemann_sums() {
    let v = riemann_sum(|u, _| u, 0.0, 1.0, 1000, &[]);
    assert!(close(v, 0.4995, 1e-12));
    for (c1, alpha, n) in [(0.0, 1.0, 7usize), (0.13, 0.91, 100), (-0.5, 0.25, 33)] {
        let v = riemann_sum(|_, _| 1.0, c1, alpha, n, &[]);
        assert!(close(v, alpha - c1, 2.0 / n as f64));
    }
    let kaigh = |u: f64, y: &[f64]| hitting_density(y[0].abs(), u);
    let sum = riemann_sum(kaigh, 0.1, 1.0, 10_000, &[1.0]);
    let q = Quadrature::default();
    let exact = q.integrate(|u| hitting_density(1.0, u), 0.1, 1.0).unwrap();
    assert!(close(
        exact,
        erfc(f64::sqrt(0.5)) - erfc(f64::sqrt(5.0)),
        1e-10
    ));
    assert!(close(sum, exact, 1e-3));
}

#[test]
fn limit_params_scaling() {
    let p = LimitParams {
        nu: 1.0,
        n: 100.0,
        a: 0.0,
        x: 0.0,
        ell: 10.0,
    };
    assert!(close(p.phi_scaled().unwrap(), E_HALF_OVER_SQRT_2PI, 1e-15));
    assert!(close(
        p.psi_scaled().unwrap(),
        2.0 * E_HALF_OVER_SQRT_2PI,
        1e-15
    ));
    let bad = LimitParams { ell: -1.0, ..p };
    assert!(bad.validate().is_err());
}

#[test]
fn evaluate_by_name() {
    assert!(close(
        evaluate("phi", &[1.0, 0.0, 0.0, 1.0]).unwrap(),
        E_HALF_OVER_SQRT_2PI,
        1e-15
    ));
    assert!(close(
        evaluate("erf", &[1.0]).unwrap(),
        0.842_700_792_949_714_9,
        1e-15
    ));
    assert!(evaluate("phi", &[1.0, 0.0]).is_err());
    assert!(evaluate("nope", &[1.0]).is_err());
    assert!(evaluate("survival_limit", &[-1.0]).is_err());
    for (name, sig) in FUNCTIONS {
        let args: Vec<f64> = sig.split_whitespace().map(|_| 1.0).collect();
        assert!(evaluate(name, &args).is_ok(), "{name}");
    }
}

#[test]
fn single_precision_densities() {
    let v: f32 = phi(1.0f32, 0.0, 0.0, 1.0).unwrap();
    assert!((v - 0.241_970_72).abs() < 1e-6);
    let (lhs, rhs) = integral_identity_check(2, 1.0f32, 0.5, 1.0).unwrap();
    assert!((lhs - rhs).abs() < 1e-5);
}

proptest! {
    #[test]
    fn phi_is_reflection_symmetric(nu in 0.1f64..3.0, a in -3.0f64..3.0, x in -3.0f64..3.0, ell in 0.01f64..3.0) {
        let p = phi(nu, a, x, ell).unwrap();
        prop_assert!(p >= 0.0);
        prop_assert!(close(p, phi(nu, -a, -x, ell).unwrap(), 1e-15));
    }

    #[test]
    fn omega_density_scale_invariant(nu in 0.2f64..2.0, n in 10f64..1e4, lam in 0.1f64..3.0, t in 0.01f64..5.0, k in 1.5f64..10.0) {
        let base = stable_omega_density(nu, n, lam * n.sqrt(), t * n);
        let m = n * k * k;
        let scaled = stable_omega_density(nu, m, lam * m.sqrt(), t * m);
        prop_assert!(close(base, scaled, 1e-12 * base.max(1e-300)));
    }

    #[test]
    fn erf_complement_and_odd(x in -8.0f64..8.0) {
        prop_assert!(close(erf(x) + erfc(x), 1.0, 2.3e-16));
        prop_assert_eq!(erf(-x), -erf(x));
        prop_assert!(erf(x).abs() <= 1.0);
    }
}
