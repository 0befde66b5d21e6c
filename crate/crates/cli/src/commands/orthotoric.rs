use admwex::orthotoric::{
    check_spec_affine, check_vandermonde, flat_coefficients, sigma_m_csck_check, AffineFit, OrthotoricSpec, ThetaSpec,
    VandermondeFamily,
};
use admwex::{Power, Rational, Scalar};
use anyhow::Result;
use num_traits::Zero;
use serde_json::{json, Value};

use super::{exact, num, power_json, Ctx};
use crate::config::{Mode, Num, VandermondeName};
use crate::exit::{usage, Coded, INTERNAL, OK};
use crate::report::Outcome;

fn rationals(v: &[Num], what: &str) -> Result<Vec<Rational>> {
    v.iter().enumerate().map(|(i, n)| n.rational(&format!("{what}[{i}]"))).collect()
}

fn fit_json<S: Scalar>(fit: &AffineFit<S>) -> Value {
    json!({
        "is_affine": fit.is_affine,
        "coefficients": fit.coeffs.as_ref().map(|c| c.iter().map(num).collect::<Vec<_>>()),
        "coefficients_exact": fit.coeffs.as_ref().filter(|_| S::EXACT).map(|c| c.iter().map(exact).collect::<Vec<_>>()),
        "max_mismatch": fit.max_mismatch,
    })
}

pub fn orthotoric(ctx: &Ctx) -> Result<Outcome> {
    let oc = ctx.cfg.orthotoric.as_ref().ok_or_else(|| usage("config has no [orthotoric] table"))?;
    if oc.trials == 0 {
        return Err(usage("orthotoric.trials must be positive"));
    }
    let m = oc.m;
    let p = oc.p.power("orthotoric.p")?;
    let poly = rationals(&oc.poly, "orthotoric.poly")?;
    let f = rationals(&oc.f, "orthotoric.f")?;
    let theta = if oc.b.is_empty() {
        vec![ThetaSpec::polynomial(poly.clone()); m]
    } else if oc.b.len() == m {
        oc.b
            .iter()
            .enumerate()
            .map(|(j, [b1, b2])| {
                let what = format!("orthotoric.b[{j}]");
                Ok(ThetaSpec { poly: poly.clone(), b1: b1.rational(&what)?, b2: b2.rational(&what)? })
            })
            .collect::<Result<_>>()?
    } else {
        return Err(usage(format!("orthotoric.b has {} entries, need 0 or m = {m}", oc.b.len())));
    };
    let spec = OrthotoricSpec::new(m, theta, f.clone(), p)?;

    let families = if oc.vandermonde.is_empty() {
        vec![VandermondeName::General, VandermondeName::Basic, VandermondeName::Inverse]
    } else {
        oc.vandermonde.clone()
    };
    let mut vander = Vec::new();
    let mut failed = Vec::new();
    for fam in families {
        let family = match fam {
            VandermondeName::General => VandermondeFamily::General,
            VandermondeName::Basic => VandermondeFamily::Basic,
            VandermondeName::Inverse => VandermondeFamily::Inverse,
        };
        let r = check_vandermonde(m, family, oc.trials, ctx.seed)?;
        if !r.passed() {
            failed.push(family.label());
        }
        vander.push(json!({
            "family": family.label(),
            "identities_checked": r.identities_checked,
            "passed": r.passed(),
            "failures": r.failures.iter().map(|pt| pt.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }));
    }

    let (affinity, coeffs): (Value, Option<Vec<Rational>>) = match ctx.mode {
        Mode::Exact => {
            let fit = check_spec_affine::<Rational>(&spec, oc.trials, ctx.seed)?;
            (fit_json(&fit), fit.coeffs.clone().filter(|_| fit.is_affine))
        }
        Mode::Float => (fit_json(&check_spec_affine::<f64>(&spec, oc.trials, ctx.seed)?), None),
    };

    let mut payload = json!({
        "m": m,
        "p": power_json(p),
        "vandermonde": vander,
        "affinity": affinity,
    });

    // flat case: Θ_j = P with deg P ≤ m and f = a0 + a1 σ1
    let flat = oc.b.is_empty() && poly.len() <= m + 1 && f[2..].iter().all(|c| c.is_zero());
    if let (true, Power::Int(pi)) = (flat, p) {
        let c = |k: usize| poly.get(k).cloned().unwrap_or_else(Rational::zero);
        let (b0, b1) = flat_coefficients(m, &Rational::from_integer(pi.into()), &f[0], &f[1], &c(m), &c(m - 1));
        let matches = coeffs.as_ref().map(|b| b[0] == b0 && b[1] == b1 && b[2..].iter().all(|v| v.is_zero()));
        payload["flat"] = json!({
            "expected_b0": b0.to_string(),
            "expected_b1": b1.to_string(),
            "constant": b1.is_zero(),
            "matches_fit": matches,
        });
    }
    if spec.is_sigma_m() {
        if let Power::Int(pi) = p {
            if !(1..=m as i64 + 1).contains(&pi) {
                let c = sigma_m_csck_check(&spec, oc.trials, ctx.seed)?;
                payload["sigma_m_csck_check"] = json!({
                    "csck": c.csck,
                    "criterion": c.criterion,
                    "lower_vanish": c.lower_vanish,
                    "consistent": c.consistent(),
                });
            }
        }
    }
    if !failed.is_empty() {
        // the identities are theorems; a failure is an implementation fault
        return Err(Coded { code: INTERNAL, message: format!("Vandermonde identities failed: {}", failed.join(", ")) }.into());
    }
    Ok(Outcome { payload, curve: None, exit: OK })
}
