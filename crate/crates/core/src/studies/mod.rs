//! Convergence studies: exact laws at growing `n` against their limits.
//!
//! Each grid point `(α, ξ, λ)` maps to the lattice point
//! `a = [α√n]`, `x = a + [ξ√n]`, `ℓ = [λ√n]` where `[·]` rounds half away
//! from zero and nonzero coordinates are pushed out to at least `⌈κ√n⌉` in
//! magnitude, so rounding never leaves the theorem's regime. The sup over
//! the finite grid is a lower bound for the sup over all lattice points
//! the theorems cover.
//!
//! Row layout per kind (unused integers are −1, unused scaled coordinates
//! NaN):
//!
//! | kind       | exact                       | limit                   | scale |
//! |------------|-----------------------------|-------------------------|-------|
//! | main1      | `P[S_n=x, Λ^a_n=ℓ]`         | `phi`                   | `n`   |
//! | main2      | `P[Λ^a_n=ℓ]`                | `psi`                   | `√n`  |
//! | kaigh      | `P[S_n=a, τ_0>n]`, all `a`  | `kaigh_hitting_density` | `n`   |
//! | uchiyama   | `P[S_n=x, Λ^a_n=0]`         | `uchiyama_avoid`        | `√n`  |
//! | omega      | `P[Ω_{ℓ−1}=m]`, `m` in `x`  | `stable_omega_density`  | `n`   |
//! | survival   | `P[τ_0>n]`                  | `survival_limit`        | `√n`  |
//! | tails      | `P[Λ^a_n=0]`                | `avoid_prob_limit`      | `1`   |
//! | gnedenko   | `P[S_n=x]`                  | `gaussian_density`      | `√n`  |
//! | identities | quadrature lhs; `n` = which | closed-form rhs         | `1`   |
//! | mc-check   | DP oracle cell              | Monte Carlo frequency   | `1`   |
//!
//! For identities the `alpha, xi, lambda` columns carry `y, z, t`; for
//! omega `xi` carries `m/n`. The kaigh rows use the avoiding side of the
//! identity `P[S_n=a, τ_0>n] = P[τ_a=n]` (exact for `a ≠ 0`), which gives
//! every level from one DP.

mod config;
mod plot;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

pub use config::{RegimeGrid, StudyConfig, StudyKind};
pub use plot::{emit_plot, render_plot};

use crate::asymptotics::{self, integral_identity_check};
use crate::decomposition::Decomposer;
use crate::error::{Error, Result};
use crate::exact::{ExactEngine, Limits};
use crate::montecarlo::estimate_joint;
use crate::pmf::fmt_sig17;
use crate::walk_model::WalkSpec;

pub const CSV_HEADER: [&str; 11] = [
    "kind",
    "n",
    "a",
    "x",
    "ell",
    "exact",
    "asymptotic",
    "abs_error",
    "alpha",
    "xi",
    "lambda",
];

/// Grid used by the `identities` kind.
pub const IDENTITY_YZ: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const IDENTITY_T: [f64; 3] = [0.5, 1.0, 2.0];

/// Largest horizon `mc-check` will build an exact joint table for.
pub const MC_ORACLE_MAX: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub kind: StudyKind,
    pub n: i64,
    pub a: i64,
    pub x: i64,
    pub ell: i64,
    pub exact: f64,
    pub asymptotic: f64,
    pub abs_error: f64,
    pub alpha: f64,
    pub xi: f64,
    pub lambda: f64,
}

impl StudyRow {
    fn sort_key(&self) -> (StudyKind, i64, i64, i64, i64) {
        (self.kind, self.n, self.a, self.x, self.ell)
    }

    fn record(&self) -> [String; 11] {
        [
            self.kind.to_string(),
            self.n.to_string(),
            self.a.to_string(),
            self.x.to_string(),
            self.ell.to_string(),
            fmt_sig17(self.exact),
            fmt_sig17(self.asymptotic),
            fmt_sig17(self.abs_error),
            fmt_sig17(self.alpha),
            fmt_sig17(self.xi),
            fmt_sig17(self.lambda),
        ]
    }
}

/// Outcome of one pass/fail property evaluated on a study.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub kind: StudyKind,
    pub rows: Vec<StudyRow>,
    /// `(n, sup abs_error)` in increasing `n`.
    pub summary: Vec<(i64, f64)>,
    pub checks: Vec<Check>,
}

impl StudyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn sup_error(&self, n: i64) -> Option<f64> {
        self.summary.iter().find(|(m, _)| *m == n).map(|&(_, e)| e)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(&self.rows, out)
    }
}

pub fn write_rows_csv<W: Write>(rows: &[StudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// `[v]`, half away from zero, pushed out to `⌈κ√n⌉` when nonzero.
pub fn lattice_coord(v: f64, n: usize, kappa: f64) -> i64 {
    if v == 0.0 {
        return 0;
    }
    let s = (n as f64).sqrt();
    let floor = (kappa * s).ceil() as i64;
    let m = ((v * s).round() as i64).abs().max(floor);
    if v < 0.0 {
        -m
    } else {
        m
    }
}

/// Loads the walk named in the config and runs the study. Output files
/// named in the config are written.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let spec = WalkSpec::<f64>::from_file(&cfg.walk)?;
    let report = run_study_on(cfg, &spec)?;
    if let Some(path) = &cfg.out_csv {
        report.write_csv(std::fs::File::create(path)?)?;
        if let Some(svg) = &cfg.out_svg {
            emit_plot(path, svg)?;
        }
    } else if let Some(svg) = &cfg.out_svg {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        let text = String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(svg, render_plot(&text)?)?;
    }
    Ok(report)
}

/// Runs the study on an already validated walk.
pub fn run_study_on(cfg: &StudyConfig, spec: &WalkSpec<f64>) -> Result<StudyReport> {
    cfg.validate()?;
    let kind = cfg.kind;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    match kind {
        StudyKind::Identities => rows = identity_rows()?,
        StudyKind::Survival => rows = survival_rows(spec, &cfg.n_grid)?,
        _ => {
            for &n in &cfg.n_grid {
                rows.extend(rows_at(cfg, spec, n, &mut checks)?);
            }
        }
    }
    rows.sort_by(|p, q| {
        p.sort_key()
            .cmp(&q.sort_key())
            .then(p.alpha.total_cmp(&q.alpha))
            .then(p.xi.total_cmp(&q.xi))
            .then(p.lambda.total_cmp(&q.lambda))
    });
    // Distinct grid points can round to the same lattice point.
    rows.dedup_by(|q, p| p.kind != StudyKind::Identities && p.sort_key() == q.sort_key());
    let summary = summarize(&rows);
    checks.extend(assess(kind, &rows, &summary));
    Ok(StudyReport {
        kind,
        rows,
        summary,
        checks,
    })
}

fn summarize(rows: &[StudyRow]) -> Vec<(i64, f64)> {
    let mut sup: BTreeMap<i64, f64> = BTreeMap::new();
    for r in rows {
        let e = sup.entry(r.n).or_insert(0.0);
        *e = e.max(r.abs_error);
    }
    sup.into_iter().collect()
}

struct Point {
    a: i64,
    x: i64,
    ell: i64,
}

#[allow(clippy::too_many_arguments)]
fn row(
    kind: StudyKind,
    n: usize,
    p: &Point,
    exact: f64,
    asymptotic: f64,
    alpha: f64,
    xi: f64,
    lambda: f64,
) -> StudyRow {
    StudyRow {
        kind,
        n: n as i64,
        a: p.a,
        x: p.x,
        ell: p.ell,
        exact,
        asymptotic,
        abs_error: (exact * kind.scale(n) - asymptotic).abs(),
        alpha,
        xi,
        lambda,
    }
}

fn rows_at(
    cfg: &StudyConfig,
    spec: &WalkSpec<f64>,
    n: usize,
    checks: &mut Vec<Check>,
) -> Result<Vec<StudyRow>> {
    let kind = cfg.kind;
    let g = &cfg.regime;
    let nu = spec.variance();
    let s = (n as f64).sqrt();
    let lat = |v: f64| lattice_coord(v, n, g.kappa);
    let nan = f64::NAN;
    match kind {
        StudyKind::Main1 => {
            let dec = Decomposer::new(spec);
            let mut pts = Vec::new();
            for &al in &g.alpha_grid {
                for &xi in &g.xi_grid {
                    for &la in &g.lambda_grid {
                        let a = lat(al);
                        pts.push(Point {
                            a,
                            x: a + lat(xi),
                            ell: lat(la).max(1),
                        });
                    }
                }
            }
            pts.retain(|p| p.ell as usize <= n);
            pts.par_iter()
                .map(|p| {
                    let exact = dec.joint(n, p.x, p.a, p.ell as usize)?;
                    let lim =
                        asymptotics::phi(nu, p.a as f64 / s, p.x as f64 / s, p.ell as f64 / s)?;
                    Ok(row(
                        kind,
                        n,
                        p,
                        exact,
                        lim,
                        p.a as f64 / s,
                        (p.x - p.a) as f64 / s,
                        p.ell as f64 / s,
                    ))
                })
                .collect()
        }
        StudyKind::Main2 => {
            let dec = Decomposer::new(spec);
            let mut pts = Vec::new();
            for &al in &g.alpha_grid {
                for &la in &g.lambda_grid {
                    pts.push(Point {
                        a: lat(al),
                        x: -1,
                        ell: lat(la).max(1),
                    });
                }
            }
            pts.retain(|p| p.ell as usize <= n);
            pts.par_iter()
                .map(|p| {
                    let exact = dec.occupation(n, p.a, p.ell as usize)?;
                    let lim = asymptotics::psi(nu, p.a as f64 / s, p.ell as f64 / s)?;
                    Ok(row(
                        kind,
                        n,
                        p,
                        exact,
                        lim,
                        p.a as f64 / s,
                        nan,
                        p.ell as f64 / s,
                    ))
                })
                .collect()
        }
        StudyKind::Kaigh => {
            // Every reachable level: the theorem's sup runs over all of Z.
            let law = ExactEngine::new(spec).avoid_pmf(0, n)?;
            Ok(law
                .iter()
                .map(|(a, exact)| {
                    let lim = asymptotics::kaigh_hitting_density(nu, n as f64, a as f64);
                    let p = Point { a, x: -1, ell: -1 };
                    row(kind, n, &p, exact, lim, a as f64 / s, nan, nan)
                })
                .collect())
        }
        StudyKind::Uchiyama => {
            let engine = ExactEngine::new(spec);
            let levels = mirrored(g.alpha_grid.iter().map(|&al| lat(al)));
            let gaps: Vec<i64> = g.xi_grid.iter().map(|&xi| lat(xi.abs())).collect();
            let per_level: Vec<Result<Vec<StudyRow>>> = levels
                .par_iter()
                .map(|&a| {
                    let avoid = engine.avoid_pmf(a, n)?;
                    let mut out = Vec::new();
                    for &d in &gaps {
                        // x on the near side of a.
                        let x = if a > 0 { a - d } else { a + d };
                        let lim = asymptotics::uchiyama_avoid(nu, n as f64, x as f64, a as f64)?;
                        let p = Point { a, x, ell: 0 };
                        out.push(row(
                            kind,
                            n,
                            &p,
                            avoid.get(x),
                            lim,
                            a as f64 / s,
                            (x - a) as f64 / s,
                            0.0,
                        ));
                    }
                    Ok(out)
                })
                .collect();
            flatten(per_level)
        }
        StudyKind::Omega => {
            let dec = Decomposer::new(spec);
            let ells: Vec<i64> = g
                .lambda_grid
                .iter()
                .map(|&la| lat(la).max(1))
                .filter(|&l| l as usize <= n)
                .collect();
            let per_ell: Vec<Result<Vec<StudyRow>>> = ells
                .par_iter()
                .map(|&ell| {
                    let law = dec.omega(ell as usize - 1, n)?;
                    Ok((1..=n)
                        .map(|m| {
                            let lim = asymptotics::stable_omega_density(
                                nu, n as f64, ell as f64, m as f64,
                            );
                            let p = Point {
                                a: -1,
                                x: m as i64,
                                ell,
                            };
                            row(
                                kind,
                                n,
                                &p,
                                law.get(m as i64),
                                lim,
                                nan,
                                m as f64 / n as f64,
                                ell as f64 / s,
                            )
                        })
                        .collect())
                })
                .collect();
            flatten(per_ell)
        }
        StudyKind::Tails => {
            let engine = ExactEngine::new(spec);
            let levels = mirrored(g.alpha_grid.iter().map(|&al| lat(al)));
            levels
                .par_iter()
                .map(|&a| {
                    let exact = engine.avoid_pmf(a, n)?.mass();
                    let lim = asymptotics::avoid_prob_limit(nu, n as f64, a as f64);
                    let p = Point { a, x: -1, ell: 0 };
                    Ok(row(kind, n, &p, exact, lim, a as f64 / s, nan, 0.0))
                })
                .collect()
        }
        StudyKind::Gnedenko => {
            let law = ExactEngine::new(spec).marginal_pmf(n)?;
            Ok(g.xi_grid
                .iter()
                .map(|&xi| {
                    let x = lat(xi);
                    let lim = asymptotics::gaussian_density(nu, x as f64 / s);
                    let p = Point { a: -1, x, ell: -1 };
                    row(kind, n, &p, law.get(x), lim, nan, x as f64 / s, nan)
                })
                .collect())
        }
        StudyKind::McCheck => mc_rows(cfg, spec, n, checks),
        StudyKind::Survival | StudyKind::Identities => unreachable!("handled without a per-n loop"),
    }
}

fn mirrored(levels: impl Iterator<Item = i64>) -> Vec<i64> {
    let mut out: Vec<i64> = levels.flat_map(|a| [a, -a]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn flatten(parts: Vec<Result<Vec<StudyRow>>>) -> Result<Vec<StudyRow>> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn survival_rows(spec: &WalkSpec<f64>, n_grid: &[usize]) -> Result<Vec<StudyRow>> {
    let top = *n_grid.last().expect("validated nonempty");
    let tail = ExactEngine::new(spec).survival_tail(top)?;
    let lim = asymptotics::survival_limit(spec.variance());
    let nan = f64::NAN;
    Ok(n_grid
        .iter()
        .map(|&n| {
            row(
                StudyKind::Survival,
                n,
                &Point {
                    a: -1,
                    x: -1,
                    ell: -1,
                },
                tail[n],
                lim,
                nan,
                nan,
                nan,
            )
        })
        .collect())
}

fn identity_rows() -> Result<Vec<StudyRow>> {
    let mut params = Vec::new();
    for which in [1u8, 2] {
        for y in IDENTITY_YZ {
            for z in IDENTITY_YZ {
                for t in IDENTITY_T {
                    params.push((which, y, z, t));
                }
            }
        }
    }
    params
        .par_iter()
        .map(|&(which, y, z, t)| {
            let (lhs, rhs) = integral_identity_check(which, y, z, t)?;
            let p = Point {
                a: -1,
                x: -1,
                ell: -1,
            };
            Ok(row(
                StudyKind::Identities,
                which as usize,
                &p,
                lhs,
                rhs,
                y,
                z,
                t,
            ))
        })
        .collect()
}

fn mc_rows(
    cfg: &StudyConfig,
    spec: &WalkSpec<f64>,
    n: usize,
    checks: &mut Vec<Check>,
) -> Result<Vec<StudyRow>> {
    if n > MC_ORACLE_MAX {
        return Err(Error::Resource(format!(
            "mc-check oracle table at n = {n} exceeds {MC_ORACLE_MAX}"
        )));
    }
    let engine = ExactEngine::with_limits(spec, Limits::default().with_oracle_cap(n.max(64)));
    let s = (n as f64).sqrt();
    let mut levels: Vec<i64> = cfg
        .regime
        .alpha_grid
        .iter()
        .map(|&al| lattice_coord(al, n, cfg.regime.kappa))
        .collect();
    levels.sort_unstable();
    levels.dedup();
    let mut out = Vec::new();
    for a in levels {
        let oracle = engine.joint_pmf(a, n)?;
        let est = estimate_joint(spec, n, a, cfg.trials, cfg.seed)?;
        let mut within = 0usize;
        let mut total = 0usize;
        for (x, l, p_hat, se) in est.cells() {
            let exact = oracle.get(x, l);
            total += 1;
            within += ((p_hat - exact).abs() <= 4.0 * se) as usize;
            let p = Point {
                a,
                x,
                ell: l as i64,
            };
            out.push(row(
                StudyKind::McCheck,
                n,
                &p,
                exact,
                p_hat,
                a as f64 / s,
                (x - a) as f64 / s,
                l as f64 / s,
            ));
        }
        let frac = within as f64 / total as f64;
        checks.push(Check {
            name: format!("mc-check n={n} a={a}: cells within 4 std errors"),
            passed: frac >= 0.99,
            detail: format!("{within}/{total} = {frac:.4} (need ≥ 0.99)"),
        });
    }
    Ok(out)
}

/// Pass/fail properties for a finished study:
///
/// - limit kinds: sup error at the largest `n` is at most half that at the
///   smallest when the grid spans a factor of at least 16;
/// - main1, main2: sup error nonincreasing along the grid up to 5% slack;
/// - survival: error strictly decreasing along the grid;
/// - identities: every `|lhs − rhs| ≤ 1e−8`.
pub fn assess(kind: StudyKind, rows: &[StudyRow], summary: &[(i64, f64)]) -> Vec<Check> {
    let mut out = Vec::new();
    if kind.is_limit_theorem() && summary.len() >= 2 {
        let (n0, e0) = summary[0];
        let (n1, e1) = summary[summary.len() - 1];
        if n1 >= 16 * n0 {
            out.push(Check {
                name: format!("{kind}: e({n1}) ≤ e({n0})/2"),
                passed: e1 <= e0 / 2.0,
                detail: format!("e({n1}) = {e1:.3e}, e({n0}) = {e0:.3e}"),
            });
        }
        let slack = match kind {
            StudyKind::Main1 | StudyKind::Main2 => Some(1.05),
            StudyKind::Survival => Some(1.0),
            _ => None,
        };
        if let Some(slack) = slack {
            let strict = kind == StudyKind::Survival;
            let bad: Vec<String> = summary
                .windows(2)
                .filter(|w| {
                    if strict {
                        w[1].1 >= w[0].1
                    } else {
                        w[1].1 > slack * w[0].1
                    }
                })
                .map(|w| {
                    format!(
                        "e({}) = {:.3e} after e({}) = {:.3e}",
                        w[1].0, w[1].1, w[0].0, w[0].1
                    )
                })
                .collect();
            out.push(Check {
                name: if strict {
                    format!("{kind}: error strictly decreasing")
                } else {
                    format!("{kind}: sup error nonincreasing within 5%")
                },
                passed: bad.is_empty(),
                detail: if bad.is_empty() {
                    "ok".into()
                } else {
                    bad.join("; ")
                },
            });
        }
    }
    if kind == StudyKind::Identities {
        let worst = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
        out.push(Check {
            name: "identities: |lhs − rhs| ≤ 1e−8".into(),
            passed: worst <= 1e-8 && !rows.is_empty(),
            detail: format!("worst {worst:.3e} over {} cases", rows.len()),
        });
    }
    out
}
