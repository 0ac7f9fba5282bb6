//! Study configuration: kinds, regime grids and the `key = value` file format.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StudyKind {
    Main1,
    Main2,
    Kaigh,
    Uchiyama,
    Omega,
    Survival,
    Tails,
    Identities,
    Gnedenko,
    McCheck,
}

impl StudyKind {
    pub const ALL: [StudyKind; 10] = [
        Self::Main1,
        Self::Main2,
        Self::Kaigh,
        Self::Uchiyama,
        Self::Omega,
        Self::Survival,
        Self::Tails,
        Self::Identities,
        Self::Gnedenko,
        Self::McCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Main1 => "main1",
            Self::Main2 => "main2",
            Self::Kaigh => "kaigh",
            Self::Uchiyama => "uchiyama",
            Self::Omega => "omega",
            Self::Survival => "survival",
            Self::Tails => "tails",
            Self::Identities => "identities",
            Self::Gnedenko => "gnedenko",
            Self::McCheck => "mc-check",
        }
    }

    /// Factor applied to the exact probability before comparing with the
    /// limit.
    pub fn scale(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Self::Main1 | Self::Kaigh | Self::Omega => n,
            Self::Main2 | Self::Uchiyama | Self::Survival | Self::Gnedenko => n.sqrt(),
            Self::Tails | Self::Identities | Self::McCheck => 1.0,
        }
    }

    /// Kinds whose sup error should vanish as `n` grows.
    pub fn is_limit_theorem(self) -> bool {
        !matches!(self, Self::Identities | Self::McCheck)
    }

    pub fn default_n_grid(self) -> Vec<usize> {
        match self {
            Self::McCheck => vec![10, 50, 100],
            Self::Identities => vec![1, 2],
            _ => vec![64, 256, 1024, 4096],
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown study kind `{s}`")))
    }
}

/// Scaled coordinates swept by a study: `α = a/√n`, `ξ = (x−a)/√n`,
/// `λ = ℓ/√n`. Nonzero entries must be at least `kappa` in magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeGrid {
    pub kappa: f64,
    pub alpha_grid: Vec<f64>,
    pub xi_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
}

impl Default for RegimeGrid {
    fn default() -> Self {
        Self {
            kappa: 0.5,
            alpha_grid: vec![0.0, 0.5, 1.0, 2.0],
            xi_grid: vec![0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0],
            lambda_grid: vec![0.0, 0.5, 1.0, 2.0],
        }
    }
}

impl RegimeGrid {
    /// The default grid with zeros removed where the kind's theorem
    /// excludes them.
    pub fn default_for(kind: StudyKind) -> Self {
        let mut g = Self::default();
        if matches!(kind, StudyKind::Main1 | StudyKind::Main2 | StudyKind::Omega) {
            g.lambda_grid.retain(|&v| v != 0.0);
        }
        if matches!(kind, StudyKind::Uchiyama | StudyKind::Tails) {
            g.alpha_grid.retain(|&v| v != 0.0);
        }
        g
    }

    pub fn validate(&self, kind: StudyKind) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::Config(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        for (name, grid) in [
            ("alpha_grid", &self.alpha_grid),
            ("xi_grid", &self.xi_grid),
            ("lambda_grid", &self.lambda_grid),
        ] {
            if let Some(v) = grid
                .iter()
                .find(|v| !v.is_finite() || (**v != 0.0 && v.abs() < self.kappa))
            {
                return Err(Error::Config(format!(
                    "{name} value {v} is neither 0 nor at least kappa = {} in magnitude",
                    self.kappa
                )));
            }
        }
        use StudyKind::*;
        let (uses_alpha, uses_xi, uses_lambda) = match kind {
            Main1 => (true, true, true),
            Main2 => (true, false, true),
            Tails | McCheck => (true, false, false),
            Uchiyama => (true, true, false),
            Omega => (false, false, true),
            Gnedenko => (false, true, false),
            Kaigh | Survival | Identities => (false, false, false),
        };
        for (used, name, grid) in [
            (uses_alpha, "alpha_grid", &self.alpha_grid),
            (uses_xi, "xi_grid", &self.xi_grid),
            (uses_lambda, "lambda_grid", &self.lambda_grid),
        ] {
            if used && grid.is_empty() {
                return Err(Error::Config(format!("{kind} needs a nonempty {name}")));
            }
        }
        // Zeros the theorems exclude: ℓ = 0 for the occupied regimes, a = 0
        // for the avoiding ones.
        if matches!(kind, Main1 | Main2 | Omega) && self.lambda_grid.contains(&0.0) {
            return Err(Error::Config(format!(
                "{kind} requires ℓ ≥ κ√n; lambda_grid contains 0"
            )));
        }
        if matches!(kind, Uchiyama | Tails) && self.alpha_grid.contains(&0.0) {
            return Err(Error::Config(format!(
                "{kind} requires |a| ≥ κ√n; alpha_grid contains 0"
            )));
        }
        // These kinds cover a and −a themselves.
        if matches!(kind, Uchiyama | Tails) && self.alpha_grid.iter().any(|&a| a < 0.0) {
            return Err(Error::Config(format!(
                "{kind} mirrors alpha_grid itself; give nonnegative values"
            )));
        }
        Ok(())
    }
}

/// Everything a study run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub walk: PathBuf,
    pub kind: StudyKind,
    pub n_grid: Vec<usize>,
    pub regime: RegimeGrid,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub seed: u64,
    /// Monte Carlo paths per `(n, a)` for `mc-check`.
    pub trials: u64,
}

const KEYS: [&str; 11] = [
    "walk",
    "kind",
    "n_grid",
    "kappa",
    "alpha_grid",
    "xi_grid",
    "lambda_grid",
    "out_csv",
    "out_svg",
    "seed",
    "trials",
];

impl StudyConfig {
    /// Defaults for `kind` on the walk stored at `walk`.
    pub fn new(walk: impl Into<PathBuf>, kind: StudyKind) -> Self {
        Self {
            walk: walk.into(),
            kind,
            n_grid: kind.default_n_grid(),
            regime: RegimeGrid::default_for(kind),
            out_csv: None,
            out_svg: None,
            seed: 0,
            trials: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid is empty".into()));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "n_grid must be positive and strictly increasing".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.regime.validate(self.kind)
    }

    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses `key = value` lines grouped under `[section]` headers. Keys
    /// are the field names of this struct and of [`RegimeGrid`]; the
    /// section a key sits in is not significant. Lists are comma-separated.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (_, props) in ini.iter() {
            for (k, v) in props.iter() {
                if !KEYS.contains(&k) {
                    return Err(Error::Config(format!("unknown key `{k}`")));
                }
                if pairs.iter().any(|(seen, _)| seen == k) {
                    return Err(Error::Config(format!("key `{k}` given twice")));
                }
                pairs.push((k.to_string(), v.trim().to_string()));
            }
        }
        let get = |k: &str| {
            pairs
                .iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.as_str())
        };
        let walk = get("walk").ok_or_else(|| Error::Config("missing key `walk`".into()))?;
        let kind: StudyKind = get("kind")
            .ok_or_else(|| Error::Config("missing key `kind`".into()))?
            .parse()?;
        let mut cfg = Self::new(resolve(base, walk), kind);
        if let Some(v) = get("n_grid") {
            cfg.n_grid = parse_list(v, "n_grid")?;
        }
        if let Some(v) = get("kappa") {
            cfg.regime.kappa = parse_value(v, "kappa")?;
        }
        if let Some(v) = get("alpha_grid") {
            cfg.regime.alpha_grid = parse_list(v, "alpha_grid")?;
        }
        if let Some(v) = get("xi_grid") {
            cfg.regime.xi_grid = parse_list(v, "xi_grid")?;
        }
        if let Some(v) = get("lambda_grid") {
            cfg.regime.lambda_grid = parse_list(v, "lambda_grid")?;
        }
        if let Some(v) = get("seed") {
            cfg.seed = parse_value(v, "seed")?;
        }
        if let Some(v) = get("trials") {
            cfg.trials = parse_value(v, "trials")?;
        }
        cfg.out_csv = get("out_csv").map(|v| resolve(base, v));
        cfg.out_svg = get("out_svg").map(|v| resolve(base, v));
        cfg.validate()?;
        Ok(cfg)
    }
}

fn resolve(base: &Path, v: &str) -> PathBuf {
    let p = PathBuf::from(v);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn parse_value<V: FromStr>(v: &str, key: &str) -> Result<V> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
}

fn parse_list<V: FromStr>(v: &str, key: &str) -> Result<Vec<V>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_value(s, key)).collect()
}
