use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use occupation::asymptotics::{self, integral_identity_check};
use occupation::exact::Limits;
use occupation::montecarlo::estimate_joint;
use occupation::pmf::fmt_sig17;
use occupation::studies::{run_study, StudyConfig, IDENTITY_T, IDENTITY_YZ};
use occupation::{Decomposer, Error, ExactEngine, WalkSpec};

const EXIT_INPUT: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_ASSERT: u8 = 3;

/// Exact laws, limit densities and convergence studies for lattice walks
/// and their occupation counts.
#[derive(Parser)]
#[command(name = "occupation", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a walk file against the standing assumptions.
    Validate {
        #[arg(long)]
        walk: PathBuf,
    },
    /// Law of S_n, or the joint law of (S_n, Λ^a_n) when --a is given.
    Exact {
        #[arg(long)]
        walk: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        /// Largest horizon for the joint table.
        #[arg(long, default_value_t = Limits::default().oracle_cap)]
        oracle_cap: usize,
    },
    /// P[S_n = x, Λ^a_n = ℓ] and P[Λ^a_n = ℓ] by path decomposition.
    Decompose {
        #[arg(long)]
        walk: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        #[arg(long)]
        ell: usize,
    },
    /// Evaluate a limit density or tail function.
    Asymptotic {
        /// Function name; `--fn list` prints the available ones.
        #[arg(long = "fn")]
        name: String,
        #[arg(long, num_args = 0.., allow_hyphen_values = true)]
        args: Vec<f64>,
    },
    /// Run a convergence study described by a config file.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        /// Exit with status 3 when a study check fails.
        #[arg(long)]
        assert: bool,
    },
    /// Monte Carlo estimate of the joint law of (S_n, Λ^a_n).
    Mc {
        #[arg(long)]
        walk: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the two hitting-density convolution identities by quadrature.
    Identities,
}

fn load_walk(path: &PathBuf) -> anyhow::Result<WalkSpec> {
    WalkSpec::from_file(path).with_context(|| format!("walk file {}", path.display()))
}

fn run(cmd: Command, out: &mut impl Write) -> anyhow::Result<u8> {
    match cmd {
        Command::Validate { walk } => {
            let spec = load_walk(&walk)?;
            let support: Vec<String> = spec
                .step()
                .support()
                .map(|(s, p)| format!("{s}:{p}"))
                .collect();
            writeln!(out, "ok")?;
            writeln!(out, "support {}", support.join(" "))?;
            writeln!(out, "variance {}", fmt_sig17(spec.variance()))?;
            writeln!(out, "symmetric {}", spec.is_symmetric())?;
        }
        Command::Exact {
            walk,
            n,
            a,
            oracle_cap,
        } => {
            let spec = load_walk(&walk)?;
            let engine =
                ExactEngine::with_limits(&spec, Limits::default().with_oracle_cap(oracle_cap));
            match a {
                None => engine.marginal_pmf(n)?.write_csv(&mut *out)?,
                Some(a) => engine.joint_pmf(a, n)?.write_csv(&mut *out)?,
            }
        }
        Command::Decompose { walk, n, a, x, ell } => {
            let spec = load_walk(&walk)?;
            let dec = Decomposer::new(&spec);
            let joint = dec.joint(n, x, a, ell)?;
            let occ = dec.occupation(n, a, ell)?;
            writeln!(out, "n,a,x,ell,joint,occupation")?;
            writeln!(
                out,
                "{n},{a},{x},{ell},{},{}",
                fmt_sig17(joint),
                fmt_sig17(occ)
            )?;
        }
        Command::Asymptotic { name, args } => {
            if name == "list" {
                for (f, sig) in asymptotics::FUNCTIONS {
                    writeln!(out, "{f}({})", sig.replace(' ', ", "))?;
                }
            } else {
                writeln!(out, "{}", fmt_sig17(asymptotics::evaluate(&name, &args)?))?;
            }
        }
        Command::Study {
            config,
            out_csv,
            out_svg,
            assert,
        } => {
            let mut cfg = StudyConfig::from_file(&config)?;
            if out_csv.is_some() {
                cfg.out_csv = out_csv;
            }
            if out_svg.is_some() {
                cfg.out_svg = out_svg;
            }
            let report = run_study(&cfg)?;
            for (n, e) in &report.summary {
                writeln!(out, "{} n={n} sup_error={}", report.kind, fmt_sig17(*e))?;
            }
            for c in &report.checks {
                writeln!(
                    out,
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )?;
            }
            if assert && !report.passed() {
                return Ok(EXIT_ASSERT);
            }
        }
        Command::Mc {
            walk,
            n,
            a,
            trials,
            seed,
        } => {
            let spec = load_walk(&walk)?;
            estimate_joint(&spec, n, a, trials, seed)?.write_csv(&mut *out)?;
        }
        Command::Identities => {
            writeln!(out, "which,y,z,t,lhs,rhs,abs_error")?;
            for which in [1u8, 2] {
                for y in IDENTITY_YZ {
                    for z in IDENTITY_YZ {
                        for t in IDENTITY_T {
                            let (lhs, rhs) = integral_identity_check(which, y, z, t)?;
                            let err = (lhs - rhs).abs();
                            writeln!(
                                out,
                                "{which},{y},{z},{t},{},{},{}",
                                fmt_sig17(lhs),
                                fmt_sig17(rhs),
                                fmt_sig17(err)
                            )?;
                        }
                    }
                }
            }
        }
    }
    out.flush()?;
    Ok(0)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Resource(_)) => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the validation exit status; 2 is reserved
            // for resource limits.
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    match run(cli.command, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
