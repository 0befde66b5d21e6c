use std::sync::Arc;

use admwex::{Mabuchi, Poly, WeightParams};
use anyhow::Result;
use num_traits::ToPrimitive;
use serde_json::json;

use super::{power_json, setup_json, Ctx};
use crate::exit::{usage, OK};
use crate::report::{Curve, Outcome};

pub fn mabuchi(ctx: &Ctx) -> Result<Outcome> {
    ctx.float_only("mabuchi")?;
    let es = ctx.setup()?;
    let setup = es.to_f64();
    let a = ctx.weight_a()?.to_f64().unwrap_or(f64::NAN);
    let w = WeightParams::new(a, ctx.power(es.m())?)?;
    let opts = &ctx.cfg.mabuchi;
    if opts.perturbations.is_empty() {
        return Err(usage("mabuchi needs at least one [[mabuchi.perturbations]] entry"));
    }

    // energies are measured from the extremal profile itself
    let base = Mabuchi::new(&setup, &w)?;
    let ext = Arc::new(base.extremal().clone());
    let reference = {
        let ext = Arc::clone(&ext);
        move |z: f64| ext.theta(&z).unwrap_or(f64::NAN)
    };
    let mab = base.with_reference(reference)?;

    let mut curve = Curve::new(&["perturbation", "epsilon", "energy"]);
    let mut families = Vec::new();
    for (i, pert) in opts.perturbations.iter().enumerate() {
        let what = format!("mabuchi.perturbations[{i}]");
        let v: Vec<f64> = pert.v.iter().map(|c| c.f64(&what)).collect::<Result<_>>()?;
        let v = Poly::new(v);
        let mut values = Vec::new();
        for e in &pert.epsilons {
            let eps = e.f64(&what)?;
            let theta = |z: f64| {
                let b = 1.0 - z * z;
                ext.theta(&z).unwrap_or(f64::NAN) + eps * b * b * v.eval(&z)
            };
            let energy = mab.energy(&theta).map_err(|err| anyhow::Error::from(err).context(format!("{what}, ε = {eps}")))?;
            curve.push(vec![i as f64, eps, energy]);
            values.push(json!({ "epsilon": eps, "energy": energy }));
        }
        let mut fam = json!({ "v": v.coeffs(), "values": values });
        if let (Some(h), false) = (opts.gradient_step, v.is_zero()) {
            // potential direction (1 - z²)² v at Θ = 1 - z², away from the extremal point
            let canonical = Poly::new(vec![1.0, 0.0, -1.0]);
            let bump = Poly::new(vec![1.0, 0.0, -2.0, 0.0, 1.0]);
            let (fd, analytic) = mab.gradient_check(&canonical, &(&bump * &v), h)?;
            fam["gradient_check"] = json!({
                "step": h,
                "finite_difference": fd,
                "analytic": analytic,
                "relative_error": (fd - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE),
            });
        }
        families.push(fam);
    }
    let payload = json!({
        "setup": setup_json(&es),
        "weight": { "a": a, "p": power_json(w.p) },
        "reference": "extremal",
        "perturbations": families,
    });
    Ok(Outcome { payload, curve: Some(curve), exit: OK })
}
