use admwex::einstein_maxwell::{
    hirzebruch_yamabe_scale, yamabe_critical_points, yamabe_functional, AUBIN_BOUND_M2,
};
use admwex::{q, Scalar};
use anyhow::Result;
use rayon::prelude::*;
use serde_json::json;

use super::{setup_json, Ctx};
use crate::config::YamabeNormalization;
use crate::exit::{usage, OK};
use crate::report::{Curve, Outcome};

pub fn yamabe(ctx: &Ctx) -> Result<Outcome> {
    ctx.float_only("yamabe")?;
    let opts = &ctx.cfg.yamabe;
    if !(opts.t_min > 1.0 && opts.t_max > opts.t_min) {
        return Err(usage(format!("yamabe needs 1 < t_min < t_max, got [{}, {}]", opts.t_min, opts.t_max)));
    }
    if opts.points < 2 {
        return Err(usage("yamabe.points must be at least 2"));
    }
    let es = ctx.setup()?;
    let scale = match opts.normalization {
        YamabeNormalization::Raw => 1.0,
        YamabeNormalization::Hirzebruch => match es.blocks() {
            [b] if b.d == 1 && b.s == q(2, 1) && es.d0() == 0 && es.dinf() == 0 => hirzebruch_yamabe_scale(b.x.to_f64()),
            _ => return Err(usage("hirzebruch normalization needs one block with d = 1, s = 2")),
        },
    };
    let setup = es.to_f64();
    let n = opts.points;
    let ts: Vec<f64> =
        (0..n).map(|i| opts.t_min + (opts.t_max - opts.t_min) * i as f64 / (n - 1) as f64).collect();
    let fs: Vec<f64> = ts.par_iter().map(|&t| Ok(scale * yamabe_functional(&setup, t)?)).collect::<Result<_>>()?;
    let mut curve = Curve::new(&["t", "f"]);
    for (t, f) in ts.iter().zip(&fs) {
        curve.push(vec![*t, *f]);
    }

    let bound_applies = setup.m() == 2 && opts.normalization == YamabeNormalization::Hirzebruch;
    let mut critical = Vec::new();
    for c in yamabe_critical_points(&setup, opts.t_max)?.into_iter().filter(|c| c.t >= opts.t_min) {
        // second difference as an independent max/min check
        let h = 1e-3 * (c.t - 1.0).min(1.0);
        let d2 = yamabe_functional(&setup, c.t + h)? - 2.0 * c.value + yamabe_functional(&setup, c.t - h)?;
        let f = scale * c.value;
        let mut v = json!({
            "t": c.t,
            "f": f,
            "kind": c.kind.label(),
            "second_difference": scale * d2,
        });
        if bound_applies {
            v["below_aubin_bound"] = json!(f < AUBIN_BOUND_M2);
        }
        critical.push(v);
    }
    let payload = json!({
        "setup": setup_json(&es),
        "normalization": match opts.normalization {
            YamabeNormalization::Raw => "raw",
            YamabeNormalization::Hirzebruch => "hirzebruch",
        },
        "scale": scale,
        "grid": { "t_min": opts.t_min, "t_max": opts.t_max, "points": n },
        "critical_points": critical,
        "aubin_bound": if bound_applies { json!(AUBIN_BOUND_M2) } else { json!(null) },
    });
    Ok(Outcome { payload, curve: Some(curve), exit: OK })
}
