use admwex::profile::ProfileKind;
use admwex::roots::chebyshev_nodes;
use admwex::stability::df_from_profile;
use admwex::{
    build_profile, positivity_check, q, stability_verdict, weighted_scalar_curvature, AdmissibleSetup, Scalar,
    WeightParams,
};
use anyhow::Result;
use serde_json::{json, Value};

use super::{exact, num, positivity_exit, positivity_json, power_json, setup_json, Ctx};
use crate::config::Mode;
use crate::exit::{usage, OK};
use crate::report::{Curve, Outcome};

/// Default row count of the `zeta,DF` curve.
const DF_CURVE_ROWS: usize = 199;

fn weights<S: Scalar>(ctx: &Ctx, setup: &AdmissibleSetup<S>) -> Result<WeightParams<S>> {
    let a = ctx.weight_a()?;
    Ok(WeightParams::new(S::from_rational(&a), ctx.power(setup.m())?)?)
}

pub fn solve(ctx: &Ctx) -> Result<Outcome> {
    let es = ctx.setup()?;
    let mut out = match ctx.mode {
        Mode::Exact => solve_with(ctx, &es)?,
        Mode::Float => solve_with(ctx, &es.to_f64())?,
    };
    out.payload["setup"] = setup_json(&es);
    Ok(out)
}

fn solve_with<S: Scalar>(ctx: &Ctx, setup: &AdmissibleSetup<S>) -> Result<Outcome> {
    let opts = &ctx.cfg.solve;
    if opts.samples == 0 {
        return Err(usage("solve.samples must be positive"));
    }
    let w = weights(ctx, setup)?;
    let prof = build_profile(setup, &w)?;
    let (a1, a2) = prof.constants().ok_or_else(|| anyhow::anyhow!("solver profile without constants"))?;
    let pc = setup.momentum_polynomial();

    let mut endpoints = Vec::new();
    for k in [-1i64, 1] {
        let z = S::from_i64(k);
        let j = prof.jet(&z);
        // F(±1) = 0 and F'(±1) = ∓2 p_c(±1)
        let df_res = j.df + S::from_i64(2 * k) * pc.eval(&z);
        endpoints.push(json!({ "z": k, "F": num(&j.f), "dF_residual": num(&df_res) }));
    }
    let futaki_vanishes = if S::EXACT {
        a1.is_zero()
    } else {
        a1.to_f64().abs() <= ctx.tol * a2.to_f64().abs().max(1.0)
    };
    let positivity = positivity_check(&prof);

    let mut curve = Curve::new(&["z", "F", "Theta", "Scal_w"]);
    for z in chebyshev_nodes(opts.samples - 1) {
        let zz = S::from_f64(z).expect("finite node");
        let f = prof.jet(&zz).f.to_f64();
        let th = prof.theta(&zz)?.to_f64();
        let sc = weighted_scalar_curvature(setup, &w, &prof, &zz)?.to_f64();
        curve.push(vec![z, f, th, sc]);
    }
    let theta_samples: Vec<Value> = if opts.report_samples == 0 {
        Vec::new()
    } else {
        chebyshev_nodes(opts.report_samples.saturating_sub(1).max(1))
            .into_iter()
            .map(|z| {
                let zz = S::from_f64(z).expect("finite node");
                Ok(json!({ "z": z, "Theta": num(&prof.theta(&zz)?) }))
            })
            .collect::<Result<_>>()?
    };
    let kind = match prof.kind() {
        ProfileKind::Ansatz(_) => "ansatz",
        ProfileKind::Polynomial(_) => "polynomial",
        ProfileKind::Integral(_) => "integral",
    };
    let mut payload = json!({
        "weight": { "a": num(&w.a), "p": power_json(w.p) },
        "profile_kind": kind,
        "A1": num(&a1),
        "A2": num(&a2),
        "futaki_vanishes": futaki_vanishes,
        "scal_w": if futaki_vanishes { "constant A2" } else { "affine A1 z + A2" },
        "endpoint_residuals": endpoints,
        "positivity": positivity_json(&positivity),
        "theta_samples": theta_samples,
    });
    if S::EXACT {
        payload["exact"] = json!({ "a": exact(&w.a), "A1": exact(&a1), "A2": exact(&a2) });
    }
    if let Some(ip) = prof.integral() {
        let d = ip.diagnostics;
        payload["integral_diagnostics"] = json!({
            "compat_left_rel": d.compat_left_rel,
            "compat_right_rel": d.compat_right_rel,
            "condition": d.condition,
            "slope_mismatch": d.slope_mismatch,
        });
    }
    Ok(Outcome { payload, curve: Some(curve), exit: positivity_exit(&positivity.verdict) })
}

pub fn stability(ctx: &Ctx) -> Result<Outcome> {
    let es = ctx.setup()?;
    let mut out = match ctx.mode {
        Mode::Exact => stability_with(ctx, &es)?,
        Mode::Float => stability_with(ctx, &es.to_f64())?,
    };
    out.payload["setup"] = setup_json(&es);
    Ok(out)
}

fn stability_with<S: Scalar>(ctx: &Ctx, setup: &AdmissibleSetup<S>) -> Result<Outcome> {
    let w = weights(ctx, setup)?;
    let rep = stability_verdict(setup, &w, ctx.tol)?;
    let prof = build_profile(setup, &w)?;

    let mut samples: Vec<Value> =
        rep.df_samples.iter().map(|&(z, df)| json!({ "zeta": z, "DF": df, "source": "default" })).collect();
    for (i, z) in ctx.cfg.stability.zeta.iter().enumerate() {
        let zr = z.rational(&format!("stability.zeta[{i}]"))?;
        let df = df_from_profile(&w, &prof, &S::from_rational(&zr))?;
        samples.push(json!({ "zeta": num(&zr), "DF": num(&df), "DF_exact": exact(&df), "source": "config" }));
    }
    let n = ctx.cfg.stability.samples.unwrap_or(DF_CURVE_ROWS);
    let mut curve = Curve::new(&["zeta", "DF"]);
    for i in 1..=n as i64 {
        // interior points -1 + 2i/(n+1)
        let zr = q(-1, 1) + q(2 * i, n as i64 + 1);
        let df = df_from_profile(&w, &prof, &S::from_rational(&zr))?;
        curve.push(vec![num(&zr).as_f64().unwrap_or(f64::NAN), df.to_f64()]);
    }
    let payload = json!({
        "weight": { "a": num(&w.a), "p": power_json(w.p) },
        "A1": rep.a1,
        "A2": rep.a2,
        "futaki_vanishes": rep.futaki_vanishes,
        "df_product": rep.df_product,
        "positivity": positivity_json(&rep.positivity),
        "relative_verdict": rep.relative.label(),
        "absolute_verdict": rep.absolute.label(),
        "df_samples": samples,
    });
    Ok(Outcome { payload, curve: Some(curve), exit: OK })
}
