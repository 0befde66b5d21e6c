use admwex::einstein_maxwell::{
    a1_at, conformally_einstein_profile, csck_at_infinity, double_root_discriminant,
    double_root_discriminant_exact, find_em_parameters, find_em_parameters_abs, hirzebruch_closed_forms, hodge4_q,
    koiso_sakane_q, yamabe_critical_points, CriticalPoint, EmSolution, DEFAULT_A_MAX,
};
use admwex::{
    build_profile, positivity_check, q, stability_verdict, AdmissibleSetup, Block, ExactSetup, Power, Rational,
    Scalar, WeightParams,
};
use anyhow::Result;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{positivity_json, power_json, setup_json, Ctx};
use crate::config::{EinsteinConfig, Family, Mode, SweepCommand};
use crate::exit::{usage, OK};
use crate::report::Outcome;

/// Relative distance within which a simple root and a Yamabe critical point
/// agree; a root of multiplicity `k` is only located to `MATCH_TOL^(1/k)`.
const MATCH_TOL: f64 = 1e-6;

fn a_max(ctx: &Ctx, p: Power) -> Result<f64> {
    let v = match &ctx.cfg.em_search.a_max {
        Some(n) => n.f64("em_search.a_max")?,
        None => DEFAULT_A_MAX,
    };
    if !(v > 1.0) {
        return Err(usage(format!("em_search.a_max = {v} must exceed 1")));
    }
    if v.is_infinite() && (ctx.mode == Mode::Float || p.as_int().is_none()) {
        return Err(usage("em_search.a_max = \"inf\" needs exact mode and an integer p"));
    }
    Ok(v)
}

fn search(ctx: &Ctx, es: &ExactSetup, p: Power, a_max: f64) -> Result<Vec<EmSolution>> {
    let both = ctx.cfg.em_search.include_negative;
    Ok(match (ctx.mode, both) {
        (Mode::Exact, true) => find_em_parameters_abs(es, p, a_max)?,
        (Mode::Exact, false) => find_em_parameters(es, p, a_max)?,
        (Mode::Float, true) => find_em_parameters_abs(&es.to_f64(), p, a_max)?,
        (Mode::Float, false) => find_em_parameters(&es.to_f64(), p, a_max)?,
    })
}

fn root_json(r: &EmSolution) -> Value {
    json!({
        "a": r.a,
        "a_exact": r.a_exact.as_ref().map(|v| v.to_string()),
        "multiplicity": r.multiplicity,
        "multiplicity_exact": r.multiplicity_exact,
        "mirrored": r.mirrored,
        "A2": r.a2,
        "positivity": positivity_json(&r.positivity),
    })
}

fn nearest(cps: &[CriticalPoint], t: f64, multiplicity: usize) -> Option<&CriticalPoint> {
    let tol = MATCH_TOL.powf(1.0 / multiplicity.max(1) as f64);
    cps.iter().find(|c| (c.t - t).abs() <= tol * t)
}

/// Kind of Yamabe critical point at each `|a|`; negative roots use the
/// mirrored setup.
fn yamabe_kinds(es: &ExactSetup, roots: &[EmSolution]) -> Result<Vec<Value>> {
    let mut per_side = Vec::new();
    for mirrored in [false, true] {
        let top = roots.iter().filter(|r| r.mirrored == mirrored).map(|r| r.a.abs()).fold(0.0, f64::max);
        let cps = if top > 1.0 {
            let s = if mirrored { es.mirror() } else { es.clone() };
            yamabe_critical_points(&s.to_f64(), 1.5 * top)?
        } else {
            Vec::new()
        };
        per_side.push(cps);
    }
    Ok(roots
        .iter()
        .map(|r| {
            let cps = &per_side[r.mirrored as usize];
            match nearest(cps, r.a.abs(), r.multiplicity) {
                Some(c) => json!({ "kind": c.kind.label(), "t": c.t, "f": c.value }),
                None => json!({ "kind": "unmatched" }),
            }
        })
        .collect())
}

pub fn em_search(ctx: &Ctx) -> Result<Outcome> {
    if let Some(e) = &ctx.cfg.einstein {
        return einstein(ctx, e);
    }
    let es = ctx.setup()?;
    let p = ctx.power(es.m())?;
    let a_max = a_max(ctx, p)?;
    let roots = search(ctx, &es, p, a_max)?;
    let mut root_values: Vec<Value> = roots.iter().map(root_json).collect();
    let yamabe_applies = p == Power::Int(2 * es.m() as i64);
    if ctx.cfg.em_search.yamabe_flags && yamabe_applies {
        for (v, k) in root_values.iter_mut().zip(yamabe_kinds(&es, &roots)?) {
            v["yamabe"] = k;
        }
    }
    let mut notes = Vec::new();
    let csck = match p {
        Power::Int(n) => Some(csck_at_infinity(&es, n)?),
        Power::Real(_) => None,
    };
    if roots.is_empty() && csck == Some(true) {
        notes.push("CSCK class");
    }
    let mut payload = json!({
        "setup": setup_json(&es),
        "p": power_json(p),
        "a_max": if a_max.is_finite() { json!(a_max) } else { json!("inf") },
        "include_negative": ctx.cfg.em_search.include_negative,
        "roots": root_values,
        "csck_at_infinity": csck,
        "notes": notes,
    });
    if let Some(f) = ctx.cfg.em_search.cross_check {
        payload["cross_check"] = cross_check(f, &es, p, &roots, a_max)?;
    }
    Ok(Outcome { payload, curve: None, exit: OK })
}

fn single_block(es: &ExactSetup, d: u32, what: &str) -> Result<Block<Rational>> {
    match es.blocks() {
        [b] if b.d == d && es.d0() == 0 && es.dinf() == 0 => Ok(b.clone()),
        _ => Err(usage(format!("{what} cross-check needs one block with d = {d} and no blow-downs"))),
    }
}

fn need_power(p: Power, n: i64, what: &str) -> Result<()> {
    if p != Power::Int(n) {
        return Err(usage(format!("{what} cross-check needs p = {n}")));
    }
    Ok(())
}

fn cross_check(family: Family, es: &ExactSetup, p: Power, roots: &[EmSolution], a_max: f64) -> Result<Value> {
    let positive: Vec<&EmSolution> = roots.iter().filter(|r| !r.mirrored).collect();
    match family {
        Family::Hirzebruch => {
            let b = single_block(es, 1, "Hirzebruch")?;
            need_power(p, 4, "Hirzebruch")?;
            if b.s != q(2, 1) {
                return Err(usage("Hirzebruch cross-check needs s = 2"));
            }
            let x = b.x.to_f64();
            let (a0, pm) = hirzebruch_closed_forms(x)?;
            let mut expected = vec![a0];
            if let Some((ap, am)) = pm {
                expected.extend([ap, am]);
            }
            expected.retain(|&a| a > 1.0 && a <= a_max);
            expected.sort_by(f64::total_cmp);
            expected.dedup_by(|u, v| (*u - *v).abs() <= 1e-9 * v.abs());
            let found: Vec<f64> = positive.iter().map(|r| r.a).collect();
            let agrees = expected.len() == found.len()
                && expected.iter().zip(&found).all(|(e, f)| (e - f).abs() <= 1e-8 * e);
            Ok(json!({
                "family": "hirzebruch",
                "a0": a0,
                "a_plus": pm.map(|v| v.0),
                "a_minus": pm.map(|v| v.1),
                "expected": expected,
                "found": found,
                "agrees": agrees,
            }))
        }
        Family::Hodge4 => {
            let b = single_block(es, 2, "Hodge-4")?;
            need_power(p, 6, "Hodge-4")?;
            let (x, s) = (b.x.to_f64(), b.s.to_f64());
            let a0 = (1.0 + (1.0 - x * x).sqrt()) / x;
            let per_root: Vec<Value> = positive
                .iter()
                .map(|r| {
                    let a = r.a;
                    let lin = -x * a * a + 2.0 * a - x;
                    let qv = hodge4_q(&a, &x, &s);
                    let mut v = json!({
                        "a": a,
                        "linear_factor": lin,
                        "q": qv,
                        "factor": if lin.abs() <= qv.abs() { "linear" } else { "q" },
                    });
                    if let Some(ar) = &r.a_exact {
                        let lin_e = -b.x.clone() * ar.clone() * ar.clone() + q(2, 1) * ar.clone() - b.x.clone();
                        let q_e = hodge4_q(ar, &b.x, &b.s);
                        v["exact_zero"] = json!(lin_e.is_zero() || q_e.is_zero());
                    }
                    v
                })
                .collect();
            let a0_is_root = positive.iter().any(|r| (r.a - a0).abs() <= 1e-8 * a0);
            Ok(json!({ "family": "hodge4", "a0": a0, "a0_is_root": a0_is_root, "roots": per_root }))
        }
        Family::KoisoSakane => {
            let (b1, b2) = match es.blocks() {
                [b1, b2] if b1.d == 1 && b2.d == 1 && es.d0() == 0 && es.dinf() == 0 => (b1, b2),
                _ => return Err(usage("Koiso-Sakane cross-check needs two blocks with d = 1")),
            };
            if b1.s != q(2, 1) || b2.s != q(-2, 1) {
                return Err(usage("Koiso-Sakane cross-check needs s = (2, -2)"));
            }
            need_power(p, 6, "Koiso-Sakane")?;
            let poly = koiso_sakane_q(&b1.x, &b2.x);
            let polyf = poly.map(|c| c.to_f64());
            let mut worst = 0.0f64;
            let per_root: Vec<Value> = roots
                .iter()
                .map(|r| {
                    let scale: f64 = polyf.coeffs().iter().enumerate().map(|(k, c)| c.abs() * r.a.abs().powi(k as i32)).sum();
                    let rel = polyf.eval(&r.a).abs() / scale.max(f64::MIN_POSITIVE);
                    worst = worst.max(rel);
                    json!({
                        "a": r.a,
                        "relative_residual": rel,
                        "exact_zero": r.a_exact.as_ref().map(|ar| poly.eval(ar).is_zero()),
                    })
                })
                .collect();
            Ok(json!({
                "family": "koiso-sakane",
                "polynomial": poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "roots": per_root,
                "max_relative_residual": worst,
                "agrees": worst <= 1e-8,
            }))
        }
        Family::Discriminant => {
            let b = single_block(es, 1, "discriminant")?;
            need_power(p, 4, "discriminant")?;
            let x = b.x.to_f64();
            let s = b.s.to_f64();
            Ok(json!({
                "family": "discriminant",
                "D_s": double_root_discriminant(s, x),
                "D_s_exact": double_root_discriminant_exact(&b.s, &b.x).map(|v| v.to_string()),
                "a0": (1.0 + (1.0 - x * x).sqrt()) / x,
            }))
        }
    }
}

fn einstein(ctx: &Ctx, e: &EinsteinConfig) -> Result<Outcome> {
    if ctx.mode == Mode::Exact {
        return Err(usage("the conformally-Einstein solve runs in float mode only; pass --mode float"));
    }
    let s = e.s.f64("einstein.s")?;
    let ce = conformally_einstein_profile(e.m, s)?;
    let p = Power::Int(2 * e.m as i64);
    let setup = AdmissibleSetup::single(ce.x_e, e.m - 1, s)?;
    let prof = build_profile(&setup, &WeightParams::new(ce.a_e, p)?)?;
    let positivity = positivity_check(&prof);
    let dev = (-20..=20)
        .map(|k| {
            let z = k as f64 / 20.0;
            (prof.value_f64(z) - ce.polynomial.eval(&z)).abs()
        })
        .fold(0.0, f64::max);
    let payload = json!({
        "m": e.m,
        "s": s,
        "x_e": ce.x_e,
        "a_e": ce.a_e,
        "lambda_plus": ce.lambda_plus,
        "lambda_minus": ce.lambda_minus,
        "newton_residual": ce.residual,
        "A1_at_a_e": a1_at(&setup, p, ce.a_e)?,
        "profile_deviation": dev,
        "positivity": positivity_json(&positivity),
        "branches": ce.branches,
        "polynomial": ce.polynomial.coeffs(),
    });
    Ok(Outcome { payload, curve: None, exit: OK })
}

pub fn sweep(ctx: &Ctx) -> Result<Outcome> {
    let sw = ctx.cfg.sweep.as_ref().ok_or_else(|| usage("config has no [sweep] table"))?;
    let base = ctx.setup()?;
    let need = if sw.x2.is_some() { 2 } else { 1 };
    if base.blocks().len() < need {
        return Err(usage(format!("sweep over {need} x values needs at least {need} blocks")));
    }
    if matches!(sw.command, SweepCommand::Solve | SweepCommand::Stability) {
        ctx.weight_a()?;
    }
    let xs1 = sw.x1.values("sweep.x1")?;
    let xs2 = match &sw.x2 {
        Some(ax) => ax.values("sweep.x2")?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut cells = Vec::new();
    let mut skipped = 0usize;
    for x1 in &xs1 {
        for x2 in &xs2 {
            let on_line =
                x2.as_ref().is_some_and(|x2| *x2 == -x1.clone() || *x2 == x1.clone() - q(1, 1));
            if sw.skip_csck_lines && on_line {
                skipped += 1;
                continue;
            }
            cells.push((x1.clone(), x2.clone()));
        }
    }
    let p = ctx.power(base.m())?;
    let a_max = if sw.command == SweepCommand::EmSearch { a_max(ctx, p)? } else { DEFAULT_A_MAX };
    let results: Vec<Value> = cells
        .par_iter()
        .map(|(x1, x2)| {
            let mut blocks = base.blocks().to_vec();
            blocks[0].x = x1.clone();
            if let Some(x2) = x2 {
                blocks[1].x = x2.clone();
            }
            let r = AdmissibleSetup::new(blocks, base.d0(), base.dinf())
                .map_err(anyhow::Error::from)
                .and_then(|setup| cell(ctx, sw.command, &setup, p, a_max));
            let mut v = json!({ "x1": x1.to_string(), "x2": x2.as_ref().map(|v| v.to_string()) });
            match r {
                Ok(res) => v["result"] = res,
                Err(e) => v["error"] = json!(format!("{e:#}")),
            }
            v
        })
        .collect();
    let errors = results.iter().filter(|v| v.get("error").is_some()).count();
    let mut summary = json!({ "cells": results.len(), "skipped": skipped, "errors": errors });
    if sw.command == SweepCommand::EmSearch {
        let with = results.iter().filter(|v| v["result"]["roots"].as_array().is_some_and(|r| !r.is_empty())).count();
        summary["with_roots"] = json!(with);
        summary["without_roots"] = json!(results.len() - errors - with);
    }
    let payload = json!({
        "command": match sw.command {
            SweepCommand::EmSearch => "em-search",
            SweepCommand::Solve => "solve",
            SweepCommand::Stability => "stability",
        },
        "p": power_json(p),
        "summary": summary,
        "cells": results,
    });
    Ok(Outcome { payload, curve: None, exit: OK })
}

fn cell(ctx: &Ctx, command: SweepCommand, setup: &ExactSetup, p: Power, a_max: f64) -> Result<Value> {
    match command {
        SweepCommand::EmSearch => {
            let roots = search(ctx, setup, p, a_max)?;
            let csck = match p {
                Power::Int(n) if roots.is_empty() => Some(csck_at_infinity(setup, n)?),
                _ => None,
            };
            Ok(json!({
                "roots": roots.iter().map(|r| r.a).collect::<Vec<_>>(),
                "positive_profiles": roots.iter().filter(|r| r.positivity.verdict.is_positive()).count(),
                "csck_class": csck,
            }))
        }
        SweepCommand::Solve => match ctx.mode {
            Mode::Exact => solve_cell(setup, &WeightParams::new(ctx.weight_a()?, p)?),
            Mode::Float => solve_cell(&setup.to_f64(), &WeightParams::new(ctx.weight_a()?.to_f64(), p)?),
        },
        SweepCommand::Stability => {
            let rep = match ctx.mode {
                Mode::Exact => stability_verdict(setup, &WeightParams::new(ctx.weight_a()?, p)?, ctx.tol)?,
                Mode::Float => stability_verdict(
                    &setup.to_f64(),
                    &WeightParams::new(ctx.weight_a()?.to_f64(), p)?,
                    ctx.tol,
                )?,
            };
            Ok(json!({
                "futaki_vanishes": rep.futaki_vanishes,
                "relative_verdict": rep.relative.label(),
                "absolute_verdict": rep.absolute.label(),
            }))
        }
    }
}

fn solve_cell<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>) -> Result<Value> {
    let prof = build_profile(setup, w)?;
    let (a1, a2) = prof.constants().ok_or_else(|| anyhow::anyhow!("solver profile without constants"))?;
    Ok(json!({
        "A1": a1.to_f64(),
        "A2": a2.to_f64(),
        "positivity": positivity_check(&prof).verdict.label(),
    }))
}
