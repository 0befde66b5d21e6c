//! Donaldson–Futaki invariants of admissible test configurations, the
//! weighted Mabuchi energy, and the resulting stability verdicts.

use crate::error::{Error, Result};
use crate::moments::{quad, solve_extremal_constants, wpow};
use crate::poly::Poly;
use crate::positivity::{positivity_check, PositivityReport, PositivityVerdict};
use crate::profile::{build_profile, build_profile_integral, Profile};
use crate::roots::chebyshev_nodes;
use crate::scalar::{Power, Scalar};
use crate::setup::{AdmissibleSetup, WeightParams};

/// Break points of the admissible test configurations sampled in reports.
pub const DF_SAMPLE_POINTS: [f64; 5] = [-0.9, -0.5, 0.0, 0.5, 0.9];

fn one_minus_p(p: Power) -> Power {
    match p {
        Power::Int(n) => Power::Int(1 - n),
        Power::Real(v) => Power::Real(1.0 - v),
    }
}

/// Relative Donaldson–Futaki invariant of the configuration broken at `zeta`:
/// `(1/4) (zeta + a)^{1-p} F(zeta)`.
pub fn df_from_profile<S: Scalar>(w: &WeightParams<S>, prof: &Profile<S>, zeta: &S) -> Result<S> {
    if !(*zeta > -S::one() && *zeta < S::one()) {
        return Err(Error::InvalidArgument(format!("zeta = {zeta} must lie in (-1, 1)")));
    }
    let wz = zeta.clone() + w.a.clone();
    let factor = match w.p {
        Power::Int(n) => wz.ipow(1 - n),
        Power::Real(v) => S::from_f64(wz.to_f64().powf(1.0 - v)).expect("finite"),
    };
    Ok(factor * prof.jet(zeta).f / S::from_i64(4))
}

/// [`df_from_profile`] with the profile built for `(setup, w)`.
pub fn df_admissible<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>, zeta: &S) -> Result<S> {
    let prof = build_profile(setup, w)?;
    df_from_profile(w, &prof, zeta)
}

/// Independent evaluation of the Donaldson–Futaki invariant from the
/// weighted volumes and total curvatures of the central fibre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfOracle {
    pub b00: f64,
    pub b10: f64,
    pub b01: f64,
    pub b11: f64,
    pub df: f64,
}

impl DfOracle {
    /// Size of the terms combined into `df`, used as a comparison scale.
    pub fn scale(&self) -> f64 {
        self.b11.abs().max((self.b01 * self.b10 / self.b00).abs())
    }
}

/// `DF = b11 - (b10 / b00) b01` computed by direct quadrature.
pub fn df_oracle(setup: &AdmissibleSetup<f64>, w: &WeightParams<f64>, zeta: f64) -> Result<DfOracle> {
    let pc = setup.momentum_polynomial();
    let sp = setup.curvature_density();
    let a = w.a;
    let q1 = crate::moments::neg(crate::moments::shift(w.p, 1));
    let q2 = one_minus_p(w.p);
    let b00 = quad(|t| pc.eval(&t) * wpow(t + a, q1), -1.0, 1.0, "b00")?;
    let b10 = 0.5
        * (quad(|t| sp.eval(&t) * wpow(t + a, q2), -1.0, 1.0, "b10")?
            + wpow(a - 1.0, q2) * pc.eval(&-1.0)
            + wpow(a + 1.0, q2) * pc.eval(&1.0));
    let b01 = quad(|t| (zeta - t) * pc.eval(&t) * wpow(t + a, q1), -1.0, zeta, "b01")?;
    let b11 = 0.5 * quad(|t| (zeta - t) * sp.eval(&t) * wpow(t + a, q2), -1.0, zeta, "b11")?
        + 0.5 * (1.0 + zeta) * wpow(a - 1.0, q2) * pc.eval(&-1.0);
    Ok(DfOracle { b00, b10, b01, b11, df: b11 - b10 / b00 * b01 })
}

/// Invariant of the product configuration: `((α0 α2 - α1²) / (4 α0)) A1`.
pub fn df_product<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>) -> Result<S> {
    let c = solve_extremal_constants(setup, w)?;
    Ok(c.gram_gap() / (S::from_i64(4) * c.alpha[0].clone()) * c.a1)
}

/// The same invariant from the curvature moments: `(β1 - (α1/α0) β0) / 2`.
pub fn df_product_from_moments<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>) -> Result<S> {
    let c = solve_extremal_constants(setup, w)?;
    Ok((c.beta[1].clone() - c.alpha[1].clone() / c.alpha[0].clone() * c.beta[0].clone()) / S::from_i64(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityVerdict {
    AnalyticallyKStable,
    KStableOnRationals,
    KSemistable,
    NotKSemistable,
    Inconclusive,
}

impl StabilityVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            StabilityVerdict::AnalyticallyKStable => "analytically-K-stable",
            StabilityVerdict::KStableOnRationals => "K-stable-on-rationals",
            StabilityVerdict::KSemistable => "K-semistable",
            StabilityVerdict::NotKSemistable => "not-K-semistable",
            StabilityVerdict::Inconclusive => "inconclusive",
        }
    }

    /// Position in the implication chain; higher implies every lower rung.
    pub fn rank(&self) -> u8 {
        match self {
            StabilityVerdict::AnalyticallyKStable => 3,
            StabilityVerdict::KStableOnRationals => 2,
            StabilityVerdict::KSemistable => 1,
            StabilityVerdict::NotKSemistable | StabilityVerdict::Inconclusive => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub a1: f64,
    pub a2: f64,
    pub futaki_vanishes: bool,
    pub df_product: f64,
    pub positivity: PositivityReport,
    /// Verdict relative to the extremal field (ignores `A1`).
    pub relative: StabilityVerdict,
    /// Absolute verdict; requires the Futaki invariant to vanish.
    pub absolute: StabilityVerdict,
    /// `(zeta, DF)` pairs; a destabilizing `zeta` is appended when found.
    pub df_samples: Vec<(f64, f64)>,
}

fn verdict_from_positivity(r: &PositivityReport) -> StabilityVerdict {
    match &r.verdict {
        PositivityVerdict::Positive => StabilityVerdict::AnalyticallyKStable,
        PositivityVerdict::NonnegativeWithInteriorZero { zeros } => {
            if zeros.iter().all(|z| z.rational == Some(false)) {
                StabilityVerdict::KStableOnRationals
            } else {
                StabilityVerdict::KSemistable
            }
        }
        PositivityVerdict::NegativeSomewhere { .. } => StabilityVerdict::NotKSemistable,
        PositivityVerdict::Inconclusive { .. } => StabilityVerdict::Inconclusive,
    }
}

/// Combines positivity of `F`, the Futaki invariant and sampled
/// Donaldson–Futaki invariants. `tol` decides `A1 = 0` in float mode
/// (relative to `max(1, |A2|)`); exact mode tests equality.
pub fn stability_verdict<S: Scalar>(
    setup: &AdmissibleSetup<S>,
    w: &WeightParams<S>,
    tol: f64,
) -> Result<StabilityReport> {
    let prof = build_profile(setup, w)?;
    let (a1, a2) = prof.constants().expect("solver profile carries constants");
    let futaki_vanishes = if S::EXACT {
        a1.is_zero()
    } else {
        a1.to_f64().abs() <= tol * a2.to_f64().abs().max(1.0)
    };
    let positivity = positivity_check(&prof);
    let relative = verdict_from_positivity(&positivity);
    let absolute = if futaki_vanishes { relative } else { StabilityVerdict::NotKSemistable };
    let mut zetas: Vec<f64> = DF_SAMPLE_POINTS.to_vec();
    if let PositivityVerdict::NegativeSomewhere { witness, .. } = positivity.verdict {
        if witness > -1.0 && witness < 1.0 && !zetas.contains(&witness) {
            zetas.push(witness);
        }
    }
    let mut df_samples = Vec::new();
    for z in zetas {
        let zz = S::from_f64(z).expect("finite");
        df_samples.push((z, df_from_profile(w, &prof, &zz)?.to_f64()));
    }
    Ok(StabilityReport {
        a1: a1.to_f64(),
        a2: a2.to_f64(),
        futaki_vanishes,
        df_product: df_product(setup, w)?.to_f64(),
        positivity,
        relative,
        absolute,
        df_samples,
    })
}

/// A function on `[-1, 1]` with its first two derivatives.
pub trait ThetaFn: Sync {
    fn value(&self, z: f64) -> f64;
    fn d1(&self, z: f64) -> f64;
    fn d2(&self, z: f64) -> f64;
}

impl ThetaFn for Poly<f64> {
    fn value(&self, z: f64) -> f64 {
        self.eval(&z)
    }
    fn d1(&self, z: f64) -> f64 {
        self.derivative().eval(&z)
    }
    fn d2(&self, z: f64) -> f64 {
        self.derivative().derivative().eval(&z)
    }
}

type ThetaRef = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Weighted Mabuchi energy relative to the extremal profile of `(setup, w)`,
/// normalized to vanish at a reference `Θ` (by default `1 - z²`).
pub struct Mabuchi {
    setup: AdmissibleSetup<f64>,
    w: WeightParams<f64>,
    extremal: Profile<f64>,
    pc: Poly<f64>,
    reference: ThetaRef,
}

/// Endpoint tolerance when validating a test `Θ`.
const THETA_ENDPOINT_TOL: f64 = 1e-6;

impl Mabuchi {
    pub fn new(setup: &AdmissibleSetup<f64>, w: &WeightParams<f64>) -> Result<Self> {
        let extremal = build_profile_integral(setup, w)?;
        Ok(Self::with_profile(setup, w, extremal))
    }

    pub fn with_profile(setup: &AdmissibleSetup<f64>, w: &WeightParams<f64>, extremal: Profile<f64>) -> Self {
        Mabuchi {
            setup: setup.clone(),
            w: w.clone(),
            pc: setup.momentum_polynomial(),
            extremal,
            reference: Box::new(|z| 1.0 - z * z),
        }
    }

    /// Replaces the base point; fails unless `theta` is a valid profile.
    pub fn with_reference(mut self, theta: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        self.validate(&theta)?;
        self.reference = Box::new(theta);
        Ok(self)
    }

    pub fn extremal(&self) -> &Profile<f64> {
        &self.extremal
    }

    fn g_extremal(&self, z: f64) -> f64 {
        self.extremal.value_f64(z) * (z + self.w.a).powf(1.0 - self.w.p.to_f64())
    }

    /// Checks `Θ > 0` inside, `Θ(±1) = 0` and `Θ'(±1) = ∓2`.
    pub fn validate(&self, theta: &dyn Fn(f64) -> f64) -> Result<()> {
        for (z, slope) in [(-1.0, 2.0), (1.0, -2.0)] {
            let v = theta(z);
            if v.abs() > THETA_ENDPOINT_TOL {
                return Err(Error::InvalidProfile(format!("Θ({z}) = {v} is not 0")));
            }
            // second-order one-sided difference
            let h = if z < 0.0 { 1e-5 } else { -1e-5 };
            let d = (-3.0 * v + 4.0 * theta(z + h) - theta(z + 2.0 * h)) / (2.0 * h);
            if (d - slope).abs() > 1e-3 {
                return Err(Error::InvalidProfile(format!("Θ'({z}) ≈ {d}, expected {slope}")));
            }
        }
        for z in chebyshev_nodes(512).into_iter().skip(1).take(511) {
            let v = theta(z);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidProfile(format!("Θ({z}) = {v} is not positive")));
            }
        }
        Ok(())
    }

    /// `∫ G_Ω (u'' - u_c'') - ∫ p_c (z+a)^{1-p} log(u''/u_c'')` with
    /// `u'' = 1/Θ` and `u_c'' = 1/Θ_ref`.
    pub fn energy(&self, theta: &dyn Fn(f64) -> f64) -> Result<f64> {
        self.validate(theta)?;
        let a = self.w.a;
        let e = 1.0 - self.w.p.to_f64();
        let f = |z: f64| {
            let th = theta(z);
            let thc = (self.reference)(z);
            self.g_extremal(z) * (1.0 / th - 1.0 / thc) - self.pc.eval(&z) * (z + a).powf(e) * (thc / th).ln()
        };
        quad(f, -1.0, 1.0, "Mabuchi energy")
    }

    /// Jet of `F = Θ p_c`.
    fn product_jet(&self, theta: &dyn ThetaFn, z: f64) -> (f64, f64, f64) {
        let pc = self.pc.eval(&z);
        let dpc = self.pc.derivative().eval(&z);
        let d2pc = self.pc.derivative().derivative().eval(&z);
        let (t0, t1, t2) = (theta.value(z), theta.d1(z), theta.d2(z));
        (t0 * pc, t1 * pc + t0 * dpc, t2 * pc + 2.0 * t1 * dpc + t0 * d2pc)
    }

    /// `(z+a)^{p+1} / p_c · (G_Ω - G_F)''` for the profile `F = Θ p_c`.
    pub fn reduced_scalar_curvature(&self, theta: &dyn ThetaFn, z: f64) -> f64 {
        let p = self.w.p.to_f64();
        let ww = z + self.w.a;
        let pc = self.pc.eval(&z);
        let (f, df, d2f) = self.product_jet(theta, z);
        let e = 1.0 - p;
        let g2 = |f: f64, df: f64, d2f: f64| {
            e * (e - 1.0) * ww.powf(e - 2.0) * f + 2.0 * e * ww.powf(e - 1.0) * df + ww.powf(e) * d2f
        };
        let jo = self.extremal.jet_f64(z);
        ww.powf(p + 1.0) / pc * (g2(jo.f, jo.df, jo.d2f) - g2(f, df, d2f))
    }

    /// `Scal_w(F) - A1 z - A2` for `F = Θ p_c`, from the scalar-curvature formula.
    pub fn scal_minus_extremal(&self, theta: &dyn ThetaFn, z: f64) -> f64 {
        let (a1, a2) = self.extremal.constants().expect("extremal constants");
        let p = self.w.p.to_f64();
        let ww = z + self.w.a;
        let pc = self.pc.eval(&z);
        let (f, df, d2f) = self.product_jet(theta, z);
        let l = -ww * ww * d2f + 2.0 * (p - 1.0) * ww * df - p * (p - 1.0) * f;
        let scal = l / pc + 2.0 * ww * ww * self.setup.curvature_density().eval(&z) / pc;
        scal - a1 * z - a2
    }

    /// Directional derivative along `v`: central difference of the energy and
    /// the pairing `∫ Scal^⊥ v (z+a)^{-(p+1)} p_c`.
    pub fn gradient_check(&self, base: &dyn ThetaFn, v: &Poly<f64>, eps: f64) -> Result<(f64, f64)> {
        let v2 = v.derivative().derivative();
        let v2 = &v2;
        let th = |e: f64| move |z: f64| {
            let t = base.value(z);
            t / (1.0 + e * t * v2.eval(&z))
        };
        let fd = (self.energy(&th(eps))? - self.energy(&th(-eps))?) / (2.0 * eps);
        let p = self.w.p.to_f64();
        let a = self.w.a;
        let analytic = quad(
            |z| self.reduced_scalar_curvature(base, z) * v.eval(&z) * (z + a).powf(-(p + 1.0)) * self.pc.eval(&z),
            -1.0,
            1.0,
            "Mabuchi gradient",
        )?;
        Ok((fd, analytic))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::setup::Block;

    fn setup_f() -> (AdmissibleSetup<f64>, WeightParams<f64>) {
        let s = AdmissibleSetup::new(vec![Block::new(0.5, 1, 2.0), Block::new(1.0 / 3.0, 1, 1.0)], 0, 0).unwrap();
        (s, WeightParams::int(5.0, 6).unwrap())
    }

    #[test]
    fn product_invariant_two_ways() {
        let s = AdmissibleSetup::new(vec![Block::new(q(1, 2), 1, q(2, 1)), Block::new(q(1, 3), 1, q(1, 1))], 0, 0)
            .unwrap();
        let w = WeightParams::int(q(5, 1), 6).unwrap();
        assert_eq!(df_product(&s, &w).unwrap(), df_product_from_moments(&s, &w).unwrap());
        let (sf, wf) = setup_f();
        let a = df_product(&sf, &wf).unwrap();
        let b = df_product_from_moments(&sf, &wf).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs());
    }

    #[test]
    fn reduced_curvature_two_routes() {
        let (s, w) = setup_f();
        let mb = Mabuchi::new(&s, &w).unwrap();
        let canon = Poly::new(vec![1.0, 0.0, -1.0]);
        for z in [-0.8, -0.1, 0.4, 0.9] {
            let r1 = mb.reduced_scalar_curvature(&canon, z);
            let r2 = mb.scal_minus_extremal(&canon, z);
            assert!((r1 - r2).abs() < 1e-8 * (1.0 + r2.abs()), "{z}: {r1} vs {r2}");
        }
    }

    #[test]
    fn rejects_bad_theta() {
        let (s, w) = setup_f();
        let mb = Mabuchi::new(&s, &w).unwrap();
        assert!(mb.energy(&|z: f64| 1.0 - z * z).is_ok());
        assert!(matches!(mb.energy(&|z: f64| (1.0 - z * z) * (z - 0.2)), Err(Error::InvalidProfile(_))));
        assert!(matches!(mb.energy(&|z: f64| 2.0 * (1.0 - z * z)), Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn energy_vanishes_at_reference() {
        let (s, w) = setup_f();
        let mb = Mabuchi::new(&s, &w).unwrap();
        assert!(mb.energy(&|z: f64| 1.0 - z * z).unwrap().abs() < 1e-13);
        let mb = mb.with_reference(|z: f64| (1.0 - z * z) * (1.2 - 0.2 * z * z)).unwrap();
        assert!(mb.energy(&|z: f64| (1.0 - z * z) * (1.2 - 0.2 * z * z)).unwrap().abs() < 1e-13);
    }

    #[test]
    fn gradient_matches_pairing() {
        let (s, w) = setup_f();
        let mb = Mabuchi::new(&s, &w).unwrap();
        let base = Poly::new(vec![1.0, 0.0, -1.0]);
        for v in [Poly::new(vec![0.0, 0.0, 0.0, 0.3]), Poly::new(vec![0.1, -0.2, 0.0, 0.0, 0.25])] {
            let (fd, an) = mb.gradient_check(&base, &v, 1e-4).unwrap();
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1e-3), "{fd} vs {an}");
        }
    }

    #[test]
    fn reduced_curvature_orthogonal_to_affine() {
        let (s, w) = setup_f();
        let mb = Mabuchi::new(&s, &w).unwrap();
        let base = Poly::new(vec![1.0, 0.0, -1.0]);
        let pc = s.momentum_polynomial();
        for k in 0..2 {
            let i = quad(
                |z| mb.reduced_scalar_curvature(&base, z) * z.powi(k) * (z + 5.0).powi(-7) * pc.eval(&z),
                -1.0,
                1.0,
                "test",
            )
            .unwrap();
            assert!(i.abs() < 1e-9, "{k}: {i}");
        }
    }
}
