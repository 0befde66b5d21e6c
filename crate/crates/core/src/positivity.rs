//! Sign of the profile on `(-1, 1)`: exact root counting for rational
//! profiles, sampled minimization otherwise.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::poly::Poly;
use crate::profile::Profile;
use crate::roots::{chebyshev_nodes, golden_min, rational_root_in, real_roots, simplest_rational_between};
use crate::scalar::{q, rational_to_f64, Scalar};

/// An interior zero of the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorZero {
    pub location: f64,
    /// Multiplicity when known exactly.
    pub multiplicity: Option<usize>,
    /// `Some(true)` for a rational zero, `Some(false)` for an irrational one.
    pub rational: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PositivityVerdict {
    Positive,
    NonnegativeWithInteriorZero { zeros: Vec<InteriorZero> },
    NegativeSomewhere { witness: f64, value: f64 },
    Inconclusive { location: f64, value: f64 },
}

impl PositivityVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            PositivityVerdict::Positive => "positive",
            PositivityVerdict::NonnegativeWithInteriorZero { .. } => "nonnegative-with-interior-zero",
            PositivityVerdict::NegativeSomewhere { .. } => "negative-somewhere",
            PositivityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, PositivityVerdict::Positive)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityMethod {
    ExactSturm,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub verdict: PositivityVerdict,
    pub method: PositivityMethod,
    /// Minimum over the sample of the normalized profile `F / ((1 - z^2) p_c)`.
    pub min_normalized: f64,
    pub argmin: f64,
}

/// Grid size of the sampled path.
pub const SAMPLE_POINTS: usize = 2048;
/// Relative band around zero reported as inconclusive by the sampled path.
pub const SAMPLE_THRESHOLD: f64 = 1e-10;

/// Classifies the sign of `F` on `(-1, 1)`.
pub fn positivity_check<S: Scalar>(prof: &Profile<S>) -> PositivityReport {
    if prof.is_exact() {
        if let Some((pz, _)) = prof.z_form() {
            let pz = pz.map(|c| c.to_rational().expect("exact coefficient"));
            return exact_check(&pz, &prof.momentum_polynomial().map(|c| c.to_rational().expect("exact")));
        }
    }
    sampled_check(prof)
}

/// `F / ((1 - z^2) p_c)`; equals 1 at both endpoints for a solver profile.
fn normalized<S: Scalar>(prof: &Profile<S>, pc: &Poly<f64>, z: f64) -> f64 {
    prof.value_f64(z) / ((1.0 - z * z) * pc.eval(&z))
}

fn sampled_check<S: Scalar>(prof: &Profile<S>) -> PositivityReport {
    let pc = prof.momentum_polynomial().to_f64();
    let nodes = chebyshev_nodes(SAMPLE_POINTS);
    let inner = &nodes[1..nodes.len() - 1];
    let vals: Vec<f64> = inner.iter().map(|&z| normalized(prof, &pc, z)).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let thr = SAMPLE_THRESHOLD * scale.max(f64::MIN_POSITIVE);
    let (mut zmin, mut vmin) = (0.0, f64::INFINITY);
    // refine every local minimum of the sample
    for i in 0..vals.len() {
        let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
        let right = if i + 1 == vals.len() { f64::INFINITY } else { vals[i + 1] };
        if vals[i] <= left && vals[i] <= right {
            let lo = nodes[i];
            let hi = nodes[i + 2];
            let (z, v) = golden_min(|t| normalized(prof, &pc, t), lo, hi, 1e-12);
            let (z, v) = if vals[i] < v { (inner[i], vals[i]) } else { (z, v) };
            if v < vmin {
                vmin = v;
                zmin = z;
            }
        }
    }
    let verdict = if vmin > thr {
        PositivityVerdict::Positive
    } else if vmin < -thr {
        PositivityVerdict::NegativeSomewhere { witness: zmin, value: prof.value_f64(zmin) }
    } else {
        PositivityVerdict::Inconclusive { location: zmin, value: prof.value_f64(zmin) }
    };
    PositivityReport { verdict, method: PositivityMethod::Sampled, min_normalized: vmin, argmin: zmin }
}

fn exact_check(pz: &Poly<BigRational>, pc: &Poly<BigRational>) -> PositivityReport {
    let one = q(1, 1);
    let (_, p1) = pz.deflate_root(&-one.clone());
    let (_, core) = p1.deflate_root(&one);
    let roots = real_roots(&core, &-one.clone(), &one, &q(1, 1i64 << 40));
    // sample points: one rational in every gap between roots
    let mut cuts = vec![-one.clone()];
    for r in &roots {
        cuts.push(r.lo.clone());
        cuts.push(r.hi.clone());
    }
    cuts.push(one.clone());
    let mut witness: Option<(BigRational, BigRational)> = None;
    let mut min_norm = f64::INFINITY;
    let mut argmin = 0.0;
    for pair in cuts.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let t = if a == b { a.clone() } else { simplest_rational_between(a, b) };
        let t = if &t == a || &t == b { (a.clone() + b.clone()) / q(2, 1) } else { t };
        let v = pz.eval(&t);
        let denom = (one.clone() - t.clone() * t.clone()) * pc.eval(&t);
        let nv = rational_to_f64(&(v.clone() / denom));
        if nv < min_norm {
            min_norm = nv;
            argmin = rational_to_f64(&t);
        }
        if v.is_negative() && witness.is_none() {
            witness = Some((t, v));
        }
    }
    let verdict = if let Some((t, v)) = witness {
        PositivityVerdict::NegativeSomewhere { witness: rational_to_f64(&t), value: rational_to_f64(&v) }
    } else if roots.is_empty() {
        PositivityVerdict::Positive
    } else {
        // all gaps positive: every interior root is a touching zero
        let sf_parts = crate::roots::squarefree_decomposition(&core);
        let zeros = roots
            .iter()
            .map(|r| {
                let factor = sf_parts
                    .iter()
                    .find(|(f, m)| *m == r.multiplicity && sign_change(f, &r.lo, &r.hi))
                    .map(|(f, _)| f.clone());
                let rational = factor.map(|f| rational_root_in(&f, &r.lo, &r.hi).is_some());
                InteriorZero { location: r.to_f64(), multiplicity: Some(r.multiplicity), rational }
            })
            .collect();
        min_norm = 0.0;
        PositivityVerdict::NonnegativeWithInteriorZero { zeros }
    };
    if let PositivityVerdict::NonnegativeWithInteriorZero { zeros } = &verdict {
        argmin = zeros[0].location;
    }
    PositivityReport { verdict, method: PositivityMethod::ExactSturm, min_normalized: min_norm, argmin }
}

fn sign_change(f: &Poly<BigRational>, lo: &BigRational, hi: &BigRational) -> bool {
    let a = f.eval(lo);
    let b = f.eval(hi);
    a.is_zero() || b.is_zero() || a.signum() != b.signum()
}
