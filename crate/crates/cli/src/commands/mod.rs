//! Subcommand implementations. Each returns an [`Outcome`]; writing the
//! report is left to the caller.

mod em;
mod mabuchi;
mod orthotoric;
mod solve;
mod yamabe;

use admwex::positivity::PositivityMethod;
use admwex::{ExactSetup, Power, PositivityReport, PositivityVerdict, Rational, Scalar};
use anyhow::Result;
use serde_json::{json, Value};

use crate::config::{Config, Mode};
use crate::exit::usage;
use crate::report::Outcome;

pub use em::{em_search, sweep};
pub use mabuchi::mabuchi;
pub use orthotoric::orthotoric;
pub use solve::{solve, stability};
pub use yamabe::yamabe;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Resolved run settings: config plus command-line overrides.
pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub mode: Mode,
    pub tol: f64,
    pub seed: u64,
}

impl Ctx<'_> {
    pub fn setup(&self) -> Result<ExactSetup> {
        self.cfg.setup.as_ref().ok_or_else(|| usage("config has no [setup] table"))?.exact()
    }

    /// `weight.p`, or `2m` when absent.
    pub fn power(&self, m: u32) -> Result<Power> {
        match self.cfg.weight.as_ref().and_then(|w| w.p.as_ref()) {
            Some(p) => p.power("weight.p"),
            None => Ok(Power::Int(2 * m as i64)),
        }
    }

    pub fn weight_a(&self) -> Result<Rational> {
        self.cfg
            .weight
            .as_ref()
            .and_then(|w| w.a.as_ref())
            .ok_or_else(|| usage("config has no weight.a"))?
            .rational("weight.a")
    }

    pub fn float_only(&self, command: &str) -> Result<()> {
        if self.mode == Mode::Exact {
            return Err(usage(format!("{command} runs in float mode only; pass --mode float")));
        }
        Ok(())
    }
}

pub fn run(command: &str, ctx: &Ctx) -> Result<Outcome> {
    match command {
        "solve" => solve(ctx),
        "stability" => stability(ctx),
        "em-search" => em_search(ctx),
        "yamabe" => yamabe(ctx),
        "orthotoric" => orthotoric(ctx),
        "mabuchi" => mabuchi(ctx),
        "sweep" => sweep(ctx),
        other => Err(usage(format!("unknown command {other}"))),
    }
}

/// The natural mode of a command when neither flag nor config names one.
pub fn default_mode(command: &str) -> Mode {
    match command {
        "yamabe" | "mabuchi" => Mode::Float,
        _ => Mode::Exact,
    }
}

/// Exact value as a string in exact mode, `null` otherwise.
pub fn exact<S: Scalar>(v: &S) -> Value {
    if S::EXACT {
        Value::String(v.to_string())
    } else {
        Value::Null
    }
}

pub fn num<S: Scalar>(v: &S) -> Value {
    json!(v.to_f64())
}

pub fn power_json(p: Power) -> Value {
    match p {
        Power::Int(n) => json!(n),
        Power::Real(v) => json!(v),
    }
}

pub fn positivity_json(r: &PositivityReport) -> Value {
    let mut v = json!({
        "verdict": r.verdict.label(),
        "method": match r.method {
            PositivityMethod::ExactSturm => "exact-sturm",
            PositivityMethod::Sampled => "sampled",
        },
        "min_normalized": r.min_normalized,
        "argmin": r.argmin,
    });
    match &r.verdict {
        PositivityVerdict::Positive => {}
        PositivityVerdict::NonnegativeWithInteriorZero { zeros } => {
            v["zeros"] = zeros
                .iter()
                .map(|z| json!({ "location": z.location, "multiplicity": z.multiplicity, "rational": z.rational }))
                .collect();
        }
        PositivityVerdict::NegativeSomewhere { witness, value } => {
            v["witness"] = json!({ "z": witness, "F": value });
        }
        PositivityVerdict::Inconclusive { location, value } => {
            v["near_zero"] = json!({ "z": location, "F": value });
        }
    }
    v
}

/// Exit code carried by a positivity verdict.
pub fn positivity_exit(v: &PositivityVerdict) -> i32 {
    use crate::exit::*;
    match v {
        PositivityVerdict::Positive => OK,
        PositivityVerdict::NonnegativeWithInteriorZero { .. } => INTERIOR_ZERO,
        PositivityVerdict::NegativeSomewhere { .. } => NEGATIVE,
        PositivityVerdict::Inconclusive { .. } => INCONCLUSIVE,
    }
}

pub fn setup_json(s: &ExactSetup) -> Value {
    json!({
        "m": s.m(),
        "d0": s.d0(),
        "dinf": s.dinf(),
        "blocks": s.blocks().iter().map(|b| json!({ "x": b.x.to_string(), "d": b.d, "s": b.s.to_string() })).collect::<Vec<_>>(),
    })
}
