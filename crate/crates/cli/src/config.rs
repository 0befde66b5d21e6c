//! TOML job configuration. Rationals are written as strings (`"1/2"`,
//! `"-836/1203"`, `"0.9"`); plain TOML numbers are also accepted.

use admwex::{parse_rational, AdmissibleSetup, Block, Power, Rational};
use anyhow::Result;
use num_traits::ToPrimitive;
use serde::Deserialize;

use crate::exit::usage;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

/// A number written either as a string or as a TOML number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn rational(&self, what: &str) -> Result<Rational> {
        match self {
            Num::Int(n) => Ok(Rational::from_integer((*n).into())),
            Num::Float(v) => Rational::from_float(*v).ok_or_else(|| usage(format!("{what}: {v} is not finite"))),
            Num::Text(t) => parse_rational(t).ok_or_else(|| usage(format!("{what}: cannot parse {t:?} as a rational"))),
        }
    }

    pub fn f64(&self, what: &str) -> Result<f64> {
        match self {
            Num::Text(t) if t.trim().eq_ignore_ascii_case("inf") => Ok(f64::INFINITY),
            _ => Ok(self.rational(what)?.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// An exponent: integers stay integral, anything else is real.
    pub fn power(&self, what: &str) -> Result<Power> {
        let r = self.rational(what)?;
        if r.is_integer() {
            let n = r.to_integer().to_i64().ok_or_else(|| usage(format!("{what}: exponent out of range")))?;
            Ok(Power::Int(n))
        } else {
            Ok(Power::Real(r.to_f64().unwrap_or(f64::NAN)))
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub setup: Option<SetupConfig>,
    pub weight: Option<WeightConfig>,
    #[serde(default)]
    pub solve: SolveOptions,
    #[serde(default)]
    pub stability: StabilityOptions,
    #[serde(default)]
    pub em_search: EmSearchOptions,
    pub einstein: Option<EinsteinConfig>,
    #[serde(default)]
    pub yamabe: YamabeOptions,
    pub orthotoric: Option<OrthotoricConfig>,
    #[serde(default)]
    pub mabuchi: MabuchiOptions,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockConfig {
    pub x: Num,
    #[serde(default = "one")]
    pub d: u32,
    pub s: Num,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupConfig {
    pub blocks: Vec<BlockConfig>,
    #[serde(default)]
    pub d0: u32,
    #[serde(default)]
    pub dinf: u32,
}

impl SetupConfig {
    pub fn exact(&self) -> Result<AdmissibleSetup<Rational>> {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| Ok(Block::new(b.x.rational(&format!("block {i} x"))?, b.d, b.s.rational(&format!("block {i} s"))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(AdmissibleSetup::new(blocks, self.d0, self.dinf)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub a: Option<Num>,
    /// Defaults to `2m`.
    pub p: Option<Num>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOptions {
    /// Rows of the `z,F,Theta,Scal_w` curve.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Rows echoed into the report itself.
    #[serde(default = "default_report_samples")]
    pub report_samples: usize,
}

fn default_samples() -> usize {
    129
}

fn default_report_samples() -> usize {
    9
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { samples: default_samples(), report_samples: default_report_samples() }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StabilityOptions {
    /// Extra break points for the `zeta,DF` curve and report.
    #[serde(default)]
    pub zeta: Vec<Num>,
    /// Rows of the DF curve.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Hirzebruch,
    Hodge4,
    KoisoSakane,
    /// Double-root discriminant of a ruled surface (single block, `d = 1`, `p = 4`).
    Discriminant,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmSearchOptions {
    /// Upper end of `|a|`; the string `"inf"` removes the cap in exact mode.
    pub a_max: Option<Num>,
    /// Also search `a < -1`.
    #[serde(default = "yes")]
    pub include_negative: bool,
    /// Classify each root as a critical point of the Yamabe functional.
    #[serde(default = "yes")]
    pub yamabe_flags: bool,
    pub cross_check: Option<Family>,
}

fn yes() -> bool {
    true
}

impl Default for EmSearchOptions {
    fn default() -> Self {
        EmSearchOptions { a_max: None, include_negative: true, yamabe_flags: true, cross_check: None }
    }
}

/// Conformally-Einstein solve on a single block of dimension `m - 1` and
/// normalized scalar curvature `s`; replaces the `a` search in `em-search`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EinsteinConfig {
    pub m: u32,
    pub s: Num,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum YamabeNormalization {
    /// The functional with the base-volume constant dropped.
    #[default]
    Raw,
    /// Scaled to the first Hirzebruch surface (base area `2π`).
    Hirzebruch,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YamabeOptions {
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub normalization: YamabeNormalization,
}

fn default_t_min() -> f64 {
    1.05
}

fn default_t_max() -> f64 {
    20.0
}

fn default_points() -> usize {
    200
}

impl Default for YamabeOptions {
    fn default() -> Self {
        YamabeOptions {
            t_min: default_t_min(),
            t_max: default_t_max(),
            points: default_points(),
            normalization: YamabeNormalization::Raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VandermondeName {
    General,
    Basic,
    Inverse,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthotoricConfig {
    pub m: usize,
    pub p: Num,
    /// Shared polynomial part, ascending coefficients.
    #[serde(default)]
    pub poly: Vec<Num>,
    /// Per-coordinate `(b1, b2)` on `z^{p-1}` and `z^p`.
    #[serde(default)]
    pub b: Vec<[Num; 2]>,
    /// Killing potential coefficients `a_0..a_m`.
    pub f: Vec<Num>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub vandermonde: Vec<VandermondeName>,
}

fn default_trials() -> usize {
    25
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    /// Coefficients of `v`, ascending; the test profile is `Θ + ε (1-z²)² v`.
    pub v: Vec<Num>,
    pub epsilons: Vec<Num>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MabuchiOptions {
    #[serde(default)]
    pub perturbations: Vec<Perturbation>,
    /// Step of the finite-difference gradient check; omitted disables it.
    pub gradient_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCommand {
    EmSearch,
    Solve,
    Stability,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub from: Num,
    pub to: Num,
    pub steps: usize,
}

impl Axis {
    /// `steps` evenly spaced exact values, both ends included.
    pub fn values(&self, what: &str) -> Result<Vec<Rational>> {
        let (a, b) = (self.from.rational(what)?, self.to.rational(what)?);
        match self.steps {
            0 => Err(usage(format!("{what}: steps must be positive"))),
            1 => Ok(vec![a]),
            n => {
                let h = (b - a.clone()) / Rational::from_integer((n as i64 - 1).into());
                Ok((0..n).map(|i| a.clone() + h.clone() * Rational::from_integer((i as i64).into())).collect())
            }
        }
    }
}

/// Grid over the `x` values of the first two blocks.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub command: SweepCommand,
    pub x1: Axis,
    pub x2: Option<Axis>,
    /// Skip cells on `x2 = -x1` and `x2 = x1 - 1`.
    #[serde(default)]
    pub skip_csck_lines: bool,
}

pub fn parse(text: &str) -> Result<Config> {
    let cfg: Config = toml::from_str(text).map_err(|e| usage(format!("config: {e}")))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(usage(format!(
            "config: schema_version {} is not supported (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    Ok(cfg)
}
