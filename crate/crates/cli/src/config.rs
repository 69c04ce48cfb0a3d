//! Scenario files (TOML). See `scenarios/` for one file per experiment and
//! the README for the schema.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use trawl_core::levy::{JumpLaw, LevyMeasureSpec, LevySeedSpec};
use trawl_core::sim::{GridScheme, SimMethod};
use trawl_core::sums::{RegimeSpec, VarianceCase};
use trawl_core::trawl::{kernel_to_trawl, Kernel, TrawlFunction};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub master_seed: u64,
    pub num_paths: usize,
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub method: Option<String>,
    pub seed: SeedCfg,
    pub trawl: TrawlCfg,
    pub delta: DeltaCfg,
    pub regime: RegimeCfg,
    #[serde(default)]
    pub tolerance: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedCfg {
    Gaussian {
        #[serde(default)]
        gamma: f64,
        b: f64,
    },
    Poisson {
        lambda: Option<f64>,
    },
    CompoundPoisson {
        rate: f64,
        #[serde(default)]
        drift: f64,
        jump: JumpCfg,
    },
    Stable {
        beta: f64,
        k_plus: f64,
        k_minus: f64,
    },
    TemperedStable {
        #[serde(default)]
        gamma: f64,
        #[serde(default)]
        b: f64,
        c_plus: f64,
        c_minus: f64,
        alpha: f64,
        lambda_plus: f64,
        lambda_minus: f64,
        epsilon: Option<f64>,
    },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpCfg {
    Point { at: f64 },
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrawlCfg {
    Exponential {
        lambda: f64,
    },
    PowerLaw {
        kappa: f64,
        #[serde(default = "one")]
        c_a: f64,
    },
    Kernel {
        shape: String,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default = "one")]
        width: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// `Δ_n = c·n^{−p}`.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeltaCfg {
    pub c: f64,
    #[serde(default)]
    pub p: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegimeCfg {
    ExactLaw {
        #[serde(default = "two")]
        z_max: f64,
        #[serde(default = "five")]
        z_points: usize,
    },
    Acf,
    FourthMoment,
    VarianceRatio {
        case: Option<String>,
    },
    ShortMemory,
    ZeroMuFirst,
    ZeroMuSecondGauss,
    ZeroMuSecondStable {
        beta: f64,
    },
    LongMemoryGauss {
        kappa: f64,
        block: Option<usize>,
    },
    LongMemoryStableI {
        kappa: f64,
    },
    LongMemoryStableIi {
        kappa: f64,
        beta_nu: f64,
    },
    StableBasisI {
        beta: f64,
        kappa: f64,
    },
    GaussianMa {
        #[serde(default = "three")]
        grid_points: usize,
    },
    FiniteMu {
        mu: f64,
        strides: Vec<usize>,
    },
}

fn two() -> f64 {
    2.0
}
fn three() -> usize {
    3
}
fn five() -> usize {
    5
}

impl RegimeCfg {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::ExactLaw { .. } => "exact_law",
            Self::Acf => "acf",
            Self::FourthMoment => "fourth_moment",
            Self::VarianceRatio { .. } => "variance_ratio",
            Self::ShortMemory => "short_memory",
            Self::ZeroMuFirst => "zero_mu_first",
            Self::ZeroMuSecondGauss => "zero_mu_second_gauss",
            Self::ZeroMuSecondStable { .. } => "zero_mu_second_stable",
            Self::LongMemoryGauss { .. } => "long_memory_gauss",
            Self::LongMemoryStableI { .. } => "long_memory_stable_i",
            Self::LongMemoryStableIi { .. } => "long_memory_stable_ii",
            Self::StableBasisI { .. } => "stable_basis_i",
            Self::GaussianMa { .. } => "gaussian_ma",
            Self::FiniteMu { .. } => "finite_mu",
        }
    }

    /// The limit-theorem regime, when the experiment has one.
    pub fn regime_spec(&self) -> Option<RegimeSpec<f64>> {
        Some(match *self {
            Self::ShortMemory => RegimeSpec::ShortMemory,
            Self::ZeroMuFirst => RegimeSpec::ZeroMuFirst,
            Self::ZeroMuSecondGauss => RegimeSpec::ZeroMuSecondGauss,
            Self::ZeroMuSecondStable { beta } => RegimeSpec::ZeroMuSecondStable { beta },
            Self::LongMemoryGauss { kappa, .. } => RegimeSpec::LongMemoryGauss { kappa },
            Self::LongMemoryStableI { kappa } => RegimeSpec::LongMemoryStableI { kappa },
            Self::LongMemoryStableIi { kappa, beta_nu } => RegimeSpec::LongMemoryStableII { kappa, beta_nu },
            Self::StableBasisI { beta, kappa } => RegimeSpec::StableBasisI { beta, kappa },
            Self::FiniteMu { mu, .. } => RegimeSpec::FiniteMu { mu },
            _ => return None,
        })
    }

    /// Tolerance keys understood by the experiment, with defaults.
    pub fn default_tolerances(&self) -> &'static [(&'static str, f64)] {
        match self {
            Self::ExactLaw { .. } => &[("ecf_sqrt_n", 4.0)],
            Self::Acf => &[("se_mult", 3.0)],
            Self::FourthMoment => &[("rel_tol", 0.10)],
            Self::VarianceRatio { case } if case.as_deref() == Some("iiib") => &[("rel_tol", 0.10)],
            Self::VarianceRatio { .. } => &[("rel_tol", 0.05)],
            Self::ShortMemory => &[("ks_max", 0.05)],
            Self::ZeroMuFirst => &[("l2_max", 0.05)],
            Self::ZeroMuSecondGauss => &[("se_mult", 3.0)],
            Self::LongMemoryGauss { .. } => &[("var_ratio_lo", 0.85), ("var_ratio_hi", 1.15), ("hurst_lo", 0.70), ("hurst_hi", 0.80)],
            Self::ZeroMuSecondStable { .. }
            | Self::LongMemoryStableI { .. }
            | Self::LongMemoryStableIi { .. }
            | Self::StableBasisI { .. } => &[("ecf_max", 0.05), ("z_max", 3.0), ("z_step", 0.25)],
            Self::GaussianMa { .. } => &[("se_mult", 3.0)],
            Self::FiniteMu { .. } => &[("refine_min", 2.0)],
        }
    }
}

/// A scenario with every field checked and converted.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub master_seed: u64,
    pub num_paths: usize,
    pub n_list: Vec<usize>,
    pub method: SimMethod,
    /// `None` when the experiment sets the seed itself (gaussian_ma).
    pub seed: Option<LevySeedSpec<f64>>,
    pub trawl: TrawlFunction<f64>,
    pub kernel: Option<Kernel<f64>>,
    pub delta: DeltaCfg,
    pub regime: RegimeCfg,
    pub tolerance: BTreeMap<String, f64>,
    pub source: String,
}

impl Scenario {
    pub fn scheme(&self, n: usize) -> Result<GridScheme<f64>, CliError> {
        GridScheme::new(n, self.delta.c, self.delta.p).map_err(|e| CliError::config("delta", e))
    }

    pub fn tol(&self, key: &str) -> f64 {
        self.tolerance[key]
    }

    pub fn seed(&self) -> &LevySeedSpec<f64> {
        self.seed.as_ref().expect("seed set by validation")
    }
}

fn jump(cfg: &JumpCfg) -> Result<JumpLaw<f64>, CliError> {
    let bad = |m: &str| Err(CliError::Config(format!("seed.jump: {m}")));
    Ok(match *cfg {
        JumpCfg::Point { at } => JumpLaw::Point(at),
        JumpCfg::Normal { mean, sd } if sd > 0.0 => JumpLaw::Normal { mean, sd },
        JumpCfg::Normal { .. } => return bad("sd must be > 0"),
        JumpCfg::Exponential { rate } if rate > 0.0 => JumpLaw::Exponential { rate },
        JumpCfg::Exponential { .. } => return bad("rate must be > 0"),
    })
}

pub fn build_seed(cfg: &SeedCfg) -> Result<Option<LevySeedSpec<f64>>, CliError> {
    let e = |err| CliError::config("seed", err);
    Ok(Some(match cfg {
        SeedCfg::Gaussian { gamma, b } => LevySeedSpec::gaussian(*gamma, *b).map_err(e)?,
        SeedCfg::Poisson { lambda: Some(l) } => LevySeedSpec::poisson(*l).map_err(e)?,
        SeedCfg::Poisson { lambda: None } => return Ok(None),
        SeedCfg::CompoundPoisson { rate, drift, jump: j } => LevySeedSpec::compound_poisson(*rate, jump(j)?, *drift).map_err(e)?,
        SeedCfg::Stable { beta, k_plus, k_minus } => LevySeedSpec::stable(*beta, *k_plus, *k_minus).map_err(e)?,
        SeedCfg::TemperedStable { gamma, b, c_plus, c_minus, alpha, lambda_plus, lambda_minus, epsilon } => {
            let nu = LevyMeasureSpec::tempered_stable(*c_plus, *c_minus, *alpha, *lambda_plus, *lambda_minus).map_err(e)?;
            LevySeedSpec::custom(*gamma, *b, nu, *epsilon).map_err(e)?
        }
    }))
}

pub fn build_trawl(cfg: &TrawlCfg) -> Result<(TrawlFunction<f64>, Option<Kernel<f64>>), CliError> {
    let e = |err| CliError::config("trawl", err);
    Ok(match cfg {
        TrawlCfg::Exponential { lambda } => (TrawlFunction::exponential(*lambda).map_err(e)?, None),
        TrawlCfg::PowerLaw { kappa, c_a } => (TrawlFunction::power_law(*kappa, *c_a).map_err(e)?, None),
        TrawlCfg::Kernel { shape, rate, width } => {
            let k = match shape.as_str() {
                "exponential" if *rate > 0.0 => Kernel::exponential(*rate),
                "indicator" if *width > 0.0 => Kernel::indicator(*width),
                "exponential" | "indicator" => return Err(CliError::Config("trawl: kernel rate/width must be > 0".into())),
                s => return Err(CliError::Config(format!("trawl.shape: unknown kernel '{s}'"))),
            };
            (kernel_to_trawl(k.clone(), 1e-10, 1e-4).map_err(e)?, Some(k))
        }
    })
}

pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let raw: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    validate(raw, text)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn validate(raw: ScenarioFile, source: &str) -> Result<Scenario, CliError> {
    let cfg = |m: String| Err(CliError::Config(m));
    if raw.name.is_empty() || !raw.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return cfg("name: must be non-empty [A-Za-z0-9_-]".into());
    }
    if raw.num_paths == 0 {
        return cfg("num_paths: must be ≥ 1".into());
    }
    if raw.n_list.is_empty() || raw.n_list[0] == 0 || raw.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return cfg("n_list: must be non-empty, positive and strictly increasing".into());
    }
    let method: SimMethod = raw.method.as_deref().unwrap_or("auto").parse().map_err(|e| CliError::config("method", e))?;
    let seed = build_seed(&raw.seed)?;
    let (trawl, kernel) = build_trawl(&raw.trawl)?;
    if !(raw.delta.c > 0.0) || !(raw.delta.p >= 0.0) {
        return cfg("delta: need c > 0 and p ≥ 0".into());
    }

    let mut tolerance: BTreeMap<String, f64> = raw.regime.default_tolerances().iter().map(|&(k, v)| (k.to_string(), v)).collect();
    for (k, v) in &raw.tolerance {
        if !tolerance.contains_key(k) {
            return cfg(format!("tolerance.{k}: not used by {}", raw.regime.kind()));
        }
        if !(v.is_finite() && *v > 0.0) {
            return cfg(format!("tolerance.{k}: must be finite and > 0"));
        }
        tolerance.insert(k.clone(), *v);
    }

    match &raw.regime {
        RegimeCfg::GaussianMa { grid_points } => {
            if !matches!(raw.seed, SeedCfg::Poisson { lambda: None }) {
                return cfg("seed: gaussian_ma sets λ = n itself; use family = \"poisson\" without lambda".into());
            }
            if kernel.is_none() {
                return cfg("trawl: gaussian_ma needs family = \"kernel\"".into());
            }
            if *grid_points == 0 || raw.delta.p != 0.0 {
                return cfg("regime.grid_points ≥ 1 with a fixed Δ (delta.p = 0)".into());
            }
        }
        _ if seed.is_none() => return cfg("seed.lambda: required".into()),
        RegimeCfg::ExactLaw { z_points, z_max } => {
            if raw.n_list != [2] {
                return cfg("n_list: exact_law compares the law of (X_0, X_Δ), use [2]".into());
            }
            if *z_points == 0 || !(*z_max > 0.0) {
                return cfg("regime: need z_points ≥ 1 and z_max > 0".into());
            }
        }
        RegimeCfg::FourthMoment | RegimeCfg::Acf | RegimeCfg::VarianceRatio { .. } => {
            let s = seed.as_ref().expect("checked");
            if s.variance().is_err() {
                return cfg(format!("seed: {} needs a finite-variance seed", raw.regime.kind()));
            }
            if matches!(raw.regime, RegimeCfg::FourthMoment) && s.kappa4().is_err() {
                return cfg("seed: fourth_moment needs a finite fourth cumulant".into());
            }
            if let RegimeCfg::VarianceRatio { case: Some(c) } = &raw.regime {
                if !["i", "ii", "iiia", "iiib"].contains(&c.as_str()) {
                    return cfg(format!("regime.case: '{c}' is not one of i, ii, iiia, iiib"));
                }
            }
        }
        RegimeCfg::FiniteMu { strides, .. } => {
            if strides.len() < 2 || strides.windows(2).any(|w| w[0] <= w[1]) || strides.contains(&0) {
                return cfg("regime.strides: need ≥ 2 positive strides, coarse first".into());
            }
            if let Some(&n) = raw.n_list.iter().find(|&&n| strides.iter().any(|&s| n % s != 0)) {
                return cfg(format!("regime.strides: every stride must divide n = {n}"));
            }
        }
        RegimeCfg::LongMemoryGauss { block: Some(b), .. } => {
            if let Some(&n) = raw.n_list.iter().find(|&&n| 2 * b > n || *b == 0) {
                return cfg(format!("regime.block: need 1 ≤ 2·block ≤ n = {n}"));
            }
        }
        _ => {}
    }

    if let Some(spec) = raw.regime.regime_spec() {
        let s = seed.as_ref().expect("checked");
        for &n in &raw.n_list {
            let scheme = GridScheme::new(n, raw.delta.c, raw.delta.p).map_err(|e| CliError::config("delta", e))?;
            spec.validate(&trawl, s, Some(&scheme)).map_err(|e| CliError::config("regime", e))?;
        }
    }
    if let RegimeCfg::VarianceRatio { case } = &raw.regime {
        let scheme = GridScheme::new(raw.n_list[0], raw.delta.c, raw.delta.p).map_err(|e| CliError::config("delta", e))?;
        let inferred = VarianceCase::infer(&trawl, &scheme);
        let name = match inferred {
            VarianceCase::I => "i",
            VarianceCase::II { .. } => "ii",
            VarianceCase::IIIa => "iiia",
            VarianceCase::IIIb => "iiib",
        };
        if let Some(c) = case {
            if c != name {
                return cfg(format!("regime.case: '{c}' disagrees with the Δ-rule and trawl, which give '{name}'"));
            }
        }
    }

    Ok(Scenario {
        name: raw.name,
        master_seed: raw.master_seed,
        num_paths: raw.num_paths,
        n_list: raw.n_list,
        method,
        seed,
        trawl,
        kernel,
        delta: raw.delta,
        regime: raw.regime,
        tolerance,
        source: source.to_string(),
    })
}
