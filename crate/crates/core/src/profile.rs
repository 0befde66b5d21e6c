//! The momentum profile `F(z)` of a weighted extremal metric, built either
//! from the closed-form ansatz (integer `p` outside `0..=m+1`) or by direct
//! integration of the second-order equation for `G = (z+a)^{1-p} F`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::{quad, solve_extremal_constants, wpow};
use crate::poly::Poly;
use crate::quadrature::gk21;
use crate::ratfn::RationalFn;
use crate::roots::chebyshev_nodes;
use crate::scalar::{Field, Power, Scalar};
use crate::setup::{AdmissibleSetup, WeightParams};

/// Value and first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<S> {
    pub f: S,
    pub df: S,
    pub d2f: S,
}

/// `F = sum_k c_k (z + a)^k` over a finite set of integer exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzProfile<F> {
    pub a: F,
    pub p: i64,
    pub coeffs: BTreeMap<i64, F>,
}

impl<F: Field> AnsatzProfile<F> {
    pub fn jet(&self, z: &F) -> Jet<F> {
        let w = z.clone() + self.a.clone();
        let mut j = Jet { f: F::zero(), df: F::zero(), d2f: F::zero() };
        for (&k, c) in &self.coeffs {
            let kk = F::from_i64(k);
            j.f = j.f + c.clone() * w.ipow(k);
            if k != 0 {
                j.df = j.df + c.clone() * kk.clone() * w.ipow(k - 1);
            }
            if k != 0 && k != 1 {
                j.d2f = j.d2f + c.clone() * kk * F::from_i64(k - 1) * w.ipow(k - 2);
            }
        }
        j
    }

    /// `F = P(z) (z + a)^e` with `P` a polynomial and `e <= 0`.
    pub fn z_form(&self) -> (Poly<F>, i64) {
        let kmin = self.coeffs.keys().next().copied().unwrap_or(0).min(0);
        let kmax = self.coeffs.keys().last().copied().unwrap_or(0);
        let mut v = vec![F::zero(); (kmax - kmin + 1) as usize];
        for (&k, c) in &self.coeffs {
            v[(k - kmin) as usize] = c.clone();
        }
        let pw = Poly::new(v);
        (pw.taylor_shift(&self.a), kmin)
    }

    pub fn rational_form(&self) -> RationalFn<F> {
        let (pz, e) = self.z_form();
        let w = Poly::linear(self.a.clone(), F::one());
        RationalFn::new(pz, w.pow((-e) as u32))
    }
}

/// Coefficients and constants from the ansatz, over any field.
#[derive(Debug, Clone)]
pub struct AnsatzSolution<F> {
    pub a1: F,
    pub a2: F,
    pub profile: AnsatzProfile<F>,
}

/// Eigenvalue of `L = -(z+a)^2 d^2 + 2(p-1)(z+a) d - p(p-1)` on `(z+a)^k`.
pub fn ansatz_eigenvalue(k: i64, p: i64) -> i64 {
    -(k - p) * (k - p + 1)
}

pub fn ansatz_applicable(m: u32, p: i64) -> bool {
    p < 0 || p > m as i64 + 1
}

/// Solves the weighted extremal equation with the ansatz
/// `F = sum_{k=0}^{m} c_k w^k + c_{p-1} w^{p-1} + c_p w^p`, `w = z + a`,
/// fixing `(A1, A2, c_{p-1}, c_p)` from the four endpoint conditions.
pub fn ansatz_solve<F: Field>(setup: &AdmissibleSetup<F>, a: &F, p: i64) -> Result<AnsatzSolution<F>> {
    let m = setup.m();
    if !ansatz_applicable(m, p) {
        return Err(Error::AnsatzNotApplicable(format!("p = {p} lies in 0..={}", m + 1)));
    }
    let pc = setup.momentum_polynomial();
    let cd = setup.curvature_density();
    let wpoly = Poly::linear(a.clone(), F::one());
    // right-hand side (A1 z + A2) p_c - 2 (z+a)^2 S p_c in powers of w
    let u = (&Poly::identity() * &pc).shift_basis(a);
    let v = pc.shift_basis(a);
    let g = (&(&wpoly * &wpoly) * &cd).scale(&F::from_i64(-2)).shift_basis(a);
    let top = m as i64;
    let mu = |k: i64| F::from_i64(ansatz_eigenvalue(k, p));
    let uk: Vec<F> = (0..=top).map(|k| u.coeff(k as usize) / mu(k)).collect();
    let vk: Vec<F> = (0..=top).map(|k| v.coeff(k as usize) / mu(k)).collect();
    let gk: Vec<F> = (0..=top).map(|k| g.coeff(k as usize) / mu(k)).collect();

    let hi = a.clone() + F::one();
    let lo = a.clone() - F::one();
    let val = |c: &[F], w: &F| -> F {
        c.iter()
            .enumerate()
            .fold(F::zero(), |acc, (k, ck)| acc + ck.clone() * w.ipow(k as i64))
    };
    let der = |c: &[F], w: &F| -> F {
        c.iter().enumerate().skip(1).fold(F::zero(), |acc, (k, ck)| {
            acc + ck.clone() * F::from_i64(k as i64) * w.ipow(k as i64 - 1)
        })
    };
    let pf = F::from_i64(p);
    let pm1 = F::from_i64(p - 1);
    let two = F::from_i64(2);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (w, sgn) in [(hi.clone(), F::one()), (lo.clone(), -F::one())] {
        rows.push(vec![val(&uk, &w), val(&vk, &w), w.ipow(p - 1), w.ipow(p)]);
        rhs.push(-val(&gk, &w));
        // F'(±1) = ∓2 p_c(±1)
        let z = sgn.clone();
        rows.push(vec![
            der(&uk, &w),
            der(&vk, &w),
            pm1.clone() * w.ipow(p - 2),
            pf.clone() * w.ipow(p - 1),
        ]);
        rhs.push(-two.clone() * sgn * pc.eval(&z) - der(&gk, &w));
    }
    let x = linalg::solve(rows, rhs).ok_or_else(|| Error::Singular("ansatz endpoint system".into()))?;
    let (a1, a2) = (x[0].clone(), x[1].clone());
    let mut coeffs = BTreeMap::new();
    for k in 0..=top {
        let c = a1.clone() * uk[k as usize].clone() + a2.clone() * vk[k as usize].clone() + gk[k as usize].clone();
        coeffs.insert(k, c);
    }
    for (k, c) in [(p - 1, x[2].clone()), (p, x[3].clone())] {
        let e = coeffs.entry(k).or_insert_with(F::zero);
        *e = e.clone() + c;
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(AnsatzSolution { a1, a2, profile: AnsatzProfile { a: a.clone(), p, coeffs } })
}

/// Diagnostics of the integral construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralDiagnostics {
    /// `|G_L(1)|` relative to the size of its terms (left representation).
    pub compat_right_rel: f64,
    /// `|G_R(-1)|` relative to the size of its terms (right representation).
    pub compat_left_rel: f64,
    /// Ratio of term magnitudes to the attained `max |G|`; large values mean
    /// cancellation-dominated evaluation.
    pub condition: f64,
    /// Constant mismatch `G_L' - G_R'` entering the second derivative.
    pub slope_mismatch: f64,
}

/// Profile from `G'' = Q` with
/// `Q = 2 S p_c (z+a)^{1-p} - (A1 z + A2) p_c (z+a)^{-(p+1)}`.
///
/// `G` is integrated from both endpoints (`G_L` from `-1`, `G_R` from `+1`)
/// on Chebyshev–Lobatto panels and blended affinely, which keeps the
/// boundary values exact and each side accurate where its terms are small.
pub struct IntegralProfile {
    a: f64,
    p: f64,
    pub a1: f64,
    pub a2: f64,
    pc: Poly<f64>,
    sp: Poly<f64>,
    nodes: Vec<f64>,
    i0: Vec<f64>,
    k_left: Vec<f64>,
    j0: Vec<f64>,
    k_right: Vec<f64>,
    slope_left: f64,
    slope_right: f64,
    pub diagnostics: IntegralDiagnostics,
}

/// Panel count of the integral construction.
pub const INTEGRAL_PANELS: usize = 2048;

/// Relative compatibility residual above which the construction is rejected.
pub const COMPAT_TOL: f64 = 1e-8;

impl IntegralProfile {
    fn q(&self, t: f64) -> f64 {
        q_value(&self.pc, &self.sp, self.a, self.p, self.a1, self.a2, t)
    }

    fn seg_int(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return 0.0;
        }
        let (v, e, abs) = gk21(&f, lo, hi);
        if e <= 1e-14 * abs.max(1e-300) {
            return v;
        }
        crate::quadrature::integrate(f, lo, hi).value
    }

    fn segment(&self, z: f64) -> usize {
        let n = self.nodes.len() - 1;
        match self.nodes.binary_search_by(|x| x.total_cmp(&z)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// `(G_L, G_L', G_R, G_R')` at `z`.
    fn sides(&self, z: f64) -> (f64, f64, f64, f64) {
        let i = self.segment(z);
        let (zl, zr) = (self.nodes[i], self.nodes[i + 1]);
        let q = |t: f64| self.q(t);
        let i0 = self.i0[i] + self.seg_int(q, zl, z);
        let kl = self.k_left[i] + (z - zl) * self.i0[i] + self.seg_int(|t| (z - t) * self.q(t), zl, z);
        let j0 = self.j0[i + 1] + self.seg_int(q, z, zr);
        let kr = self.k_right[i + 1] + (zr - z) * self.j0[i + 1] + self.seg_int(|t| (t - z) * self.q(t), z, zr);
        let gl = self.slope_left * (z + 1.0) + kl;
        let gr = self.slope_right * (z - 1.0) + kr;
        (gl, self.slope_left + i0, gr, self.slope_right - j0)
    }

    /// `(G, G', G'')`.
    pub fn g_jet(&self, z: f64) -> (f64, f64, f64) {
        let (gl, dgl, gr, dgr) = self.sides(z);
        let lam = 0.5 * (1.0 - z);
        let g = lam * gl + (1.0 - lam) * gr;
        let dg = lam * dgl + (1.0 - lam) * dgr - 0.5 * (gl - gr);
        let d2g = self.q(z) - (dgl - dgr);
        (g, dg, d2g)
    }

    pub fn jet(&self, z: f64) -> Jet<f64> {
        let (g, dg, d2g) = self.g_jet(z);
        let w = z + self.a;
        let e = self.p - 1.0;
        let w0 = w.powf(e);
        let w1 = e * w.powf(e - 1.0);
        let w2 = e * (e - 1.0) * w.powf(e - 2.0);
        Jet { f: w0 * g, df: w1 * g + w0 * dg, d2f: w2 * g + 2.0 * w1 * dg + w0 * d2g }
    }

    /// `Q` at `t`, the source term of the `G` equation.
    pub fn source(&self, t: f64) -> f64 {
        self.q(t)
    }
}

pub(crate) fn q_value(pc: &Poly<f64>, sp: &Poly<f64>, a: f64, p: f64, a1: f64, a2: f64, t: f64) -> f64 {
    let w = t + a;
    let pw = Power::from_f64(p);
    2.0 * sp.eval(&t) * wpow(w, crate::moments::neg(crate::moments::shift(pw, -1)))
        - (a1 * t + a2) * pc.eval(&t) * wpow(w, crate::moments::neg(crate::moments::shift(pw, 1)))
}

/// Builds the integral profile from float data and given constants.
pub fn integral_profile_with_constants(
    setup: &AdmissibleSetup<f64>,
    w: &WeightParams<f64>,
    a1: f64,
    a2: f64,
) -> Result<IntegralProfile> {
    let a = w.a;
    let p = w.p.to_f64();
    let pc = setup.momentum_polynomial();
    let sp = setup.curvature_density();
    let nodes = chebyshev_nodes(INTEGRAL_PANELS);
    let n = INTEGRAL_PANELS;
    let mut prof = IntegralProfile {
        a,
        p,
        a1,
        a2,
        slope_left: 2.0 * pc.eval(&-1.0) * (a - 1.0).powf(1.0 - p),
        slope_right: -2.0 * pc.eval(&1.0) * (a + 1.0).powf(1.0 - p),
        pc,
        sp,
        nodes,
        i0: vec![0.0; n + 1],
        k_left: vec![0.0; n + 1],
        j0: vec![0.0; n + 1],
        k_right: vec![0.0; n + 1],
        diagnostics: IntegralDiagnostics {
            compat_right_rel: 0.0,
            compat_left_rel: 0.0,
            condition: 1.0,
            slope_mismatch: 0.0,
        },
    };
    let mut seg_q = vec![0.0; n];
    let mut seg_l = vec![0.0; n];
    let mut seg_r = vec![0.0; n];
    for i in 0..n {
        let (zl, zr) = (prof.nodes[i], prof.nodes[i + 1]);
        seg_q[i] = prof.seg_int(|t| prof.q(t), zl, zr);
        seg_l[i] = prof.seg_int(|t| (zr - t) * prof.q(t), zl, zr);
        seg_r[i] = prof.seg_int(|t| (t - zl) * prof.q(t), zl, zr);
    }
    for i in 0..n {
        let h = prof.nodes[i + 1] - prof.nodes[i];
        prof.i0[i + 1] = prof.i0[i] + seg_q[i];
        prof.k_left[i + 1] = prof.k_left[i] + h * prof.i0[i] + seg_l[i];
    }
    for i in (0..n).rev() {
        let h = prof.nodes[i + 1] - prof.nodes[i];
        prof.j0[i] = prof.j0[i + 1] + seg_q[i];
        prof.k_right[i] = prof.k_right[i + 1] + h * prof.j0[i + 1] + seg_r[i];
    }
    if !prof.k_left[n].is_finite() || !prof.k_right[0].is_finite() {
        return Err(Error::Quadrature("non-finite profile integrals".into()));
    }
    let abs_q = |wt: &dyn Fn(f64) -> f64| quad(|t| wt(t) * prof.q(t).abs(), -1.0, 1.0, "profile scale");
    let scale_l = 2.0 * prof.slope_left.abs() + abs_q(&|t| 1.0 - t)?;
    let scale_r = 2.0 * prof.slope_right.abs() + abs_q(&|t| 1.0 + t)?;
    let gl_end = 2.0 * prof.slope_left + prof.k_left[n];
    let gr_end = -2.0 * prof.slope_right + prof.k_right[0];
    let gmax = prof
        .nodes
        .iter()
        .step_by(16)
        .map(|&z| prof.g_jet(z).0.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    prof.diagnostics = IntegralDiagnostics {
        compat_right_rel: gl_end.abs() / scale_l.max(f64::MIN_POSITIVE),
        compat_left_rel: gr_end.abs() / scale_r.max(f64::MIN_POSITIVE),
        condition: scale_l.max(scale_r) / gmax,
        slope_mismatch: prof.slope_left + prof.i0[n] - prof.slope_right,
    };
    Ok(prof)
}

/// How a profile was obtained.
#[derive(Clone)]
pub enum ProfileKind<S> {
    Ansatz(AnsatzProfile<S>),
    /// `F` given directly as a polynomial in `z`.
    Polynomial(Poly<S>),
    Integral(Arc<IntegralProfile>),
}

#[derive(Clone)]
pub struct Profile<S> {
    kind: ProfileKind<S>,
    pc: Poly<S>,
    constants: Option<(S, S)>,
}

impl<S: Scalar> fmt::Debug for Profile<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            ProfileKind::Ansatz(a) => format!("Ansatz({:?})", a.coeffs),
            ProfileKind::Polynomial(p) => format!("Polynomial({p:?})"),
            ProfileKind::Integral(i) => format!("Integral({:?})", i.diagnostics),
        };
        write!(f, "Profile {{ kind: {kind}, constants: {:?} }}", self.constants)
    }
}

impl<S: Scalar> Profile<S> {
    pub fn from_polynomial(setup: &AdmissibleSetup<S>, f: Poly<S>) -> Self {
        Profile { kind: ProfileKind::Polynomial(f), pc: setup.momentum_polynomial(), constants: None }
    }

    pub fn kind(&self) -> &ProfileKind<S> {
        &self.kind
    }

    pub fn momentum_polynomial(&self) -> &Poly<S> {
        &self.pc
    }

    /// `(A1, A2)` when the profile solves the extremal equation.
    pub fn constants(&self) -> Option<(S, S)> {
        self.constants.clone()
    }

    pub fn is_exact(&self) -> bool {
        S::EXACT && !matches!(self.kind, ProfileKind::Integral(_))
    }

    pub fn jet(&self, z: &S) -> Jet<S> {
        match &self.kind {
            ProfileKind::Ansatz(a) => a.jet(z),
            ProfileKind::Polynomial(p) => {
                let d = p.derivative();
                Jet { f: p.eval(z), df: d.eval(z), d2f: d.derivative().eval(z) }
            }
            ProfileKind::Integral(i) => {
                let j = i.jet(z.to_f64());
                let c = |v: f64| S::from_f64(v).unwrap_or_else(S::zero);
                Jet { f: c(j.f), df: c(j.df), d2f: c(j.d2f) }
            }
        }
    }

    /// Float evaluation. Exact profiles are evaluated exactly at the
    /// (exactly representable) point and rounded once.
    pub fn jet_f64(&self, z: f64) -> Jet<f64> {
        match &self.kind {
            ProfileKind::Integral(i) => i.jet(z),
            _ => {
                let zz = S::from_f64(z).expect("finite evaluation point");
                let j = self.jet(&zz);
                Jet { f: j.f.to_f64(), df: j.df.to_f64(), d2f: j.d2f.to_f64() }
            }
        }
    }

    pub fn value_f64(&self, z: f64) -> f64 {
        self.jet_f64(z).f
    }

    /// `F` as a rational function of `z`, when available.
    pub fn rational_form(&self) -> Option<RationalFn<S>> {
        match &self.kind {
            ProfileKind::Ansatz(a) => Some(a.rational_form()),
            ProfileKind::Polynomial(p) => Some(RationalFn::from_poly(p.clone())),
            ProfileKind::Integral(_) => None,
        }
    }

    /// `P` and `e <= 0` with `F = P(z) (z+a)^e`, for the exact kinds.
    pub fn z_form(&self) -> Option<(Poly<S>, i64)> {
        match &self.kind {
            ProfileKind::Ansatz(a) => Some(a.z_form()),
            ProfileKind::Polynomial(p) => Some((p.clone(), 0)),
            ProfileKind::Integral(_) => None,
        }
    }

    pub fn integral(&self) -> Option<&IntegralProfile> {
        match &self.kind {
            ProfileKind::Integral(i) => Some(i),
            _ => None,
        }
    }

    /// `Θ = F / p_c`; at zeros of `p_c` the exact kinds cancel symbolically
    /// and the integral kind returns the boundary value 0.
    pub fn theta(&self, z: &S) -> Result<S> {
        let pcz = self.pc.eval(z);
        if !pcz.is_zero() {
            return Ok(self.jet(z).f / pcz);
        }
        match self.rational_form() {
            Some(rf) => {
                let th = rf / RationalFn::from_poly(self.pc.clone());
                th.eval(z).ok_or_else(|| Error::InvalidProfile("Θ has a pole at a zero of p_c".into()))
            }
            None => Ok(S::zero()),
        }
    }

    /// `Θ'`, with the same treatment of zeros of `p_c` as [`Profile::theta`].
    pub fn theta_derivative(&self, z: &S) -> Result<S> {
        let pcz = self.pc.eval(z);
        if !pcz.is_zero() {
            let j = self.jet(z);
            let dp = self.pc.derivative().eval(z);
            return Ok((j.df * pcz.clone() - j.f * dp) / (pcz.clone() * pcz));
        }
        match self.rational_form() {
            Some(rf) => {
                let th = rf / RationalFn::from_poly(self.pc.clone());
                th.derivative()
                    .eval(z)
                    .ok_or_else(|| Error::InvalidProfile("Θ' has a pole at a zero of p_c".into()))
            }
            None => Err(Error::InvalidArgument("Θ' at a zero of p_c needs an exact profile".into())),
        }
    }
}

/// Closed-form ansatz profile (requires an integer `p` outside `0..=m+1`).
pub fn build_profile_ansatz<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>) -> Result<Profile<S>> {
    let p = w
        .p
        .as_int()
        .ok_or_else(|| Error::AnsatzNotApplicable(format!("non-integer p = {}", w.p)))?;
    let sol = ansatz_solve(setup, &w.a, p)?;
    Ok(Profile {
        kind: ProfileKind::Ansatz(sol.profile),
        pc: setup.momentum_polynomial(),
        constants: Some((sol.a1, sol.a2)),
    })
}

/// Integral profile from float data. Fails with `Inconsistency` when the
/// two endpoint representations of `G` disagree beyond [`COMPAT_TOL`].
pub fn build_profile_integral(setup: &AdmissibleSetup<f64>, w: &WeightParams<f64>) -> Result<Profile<f64>> {
    let c = solve_extremal_constants(setup, w)?;
    let prof = integral_profile_with_constants(setup, w, c.a1, c.a2)?;
    let d = prof.diagnostics;
    if !(d.compat_left_rel <= COMPAT_TOL && d.compat_right_rel <= COMPAT_TOL) {
        return Err(Error::Inconsistency(format!(
            "compatibility residuals {:.3e} / {:.3e} exceed {COMPAT_TOL:e}",
            d.compat_left_rel, d.compat_right_rel
        )));
    }
    Ok(Profile {
        kind: ProfileKind::Integral(Arc::new(prof)),
        pc: setup.momentum_polynomial(),
        constants: Some((c.a1, c.a2)),
    })
}

/// Ansatz profile in exact mode, integral profile in float mode.
pub fn build_profile<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>) -> Result<Profile<S>> {
    if S::EXACT {
        return build_profile_ansatz(setup, w);
    }
    let f = build_profile_integral(&setup.to_f64(), &w.to_f64())?;
    let (a1, a2) = f.constants.expect("integral profile carries constants");
    let kind = match f.kind {
        ProfileKind::Integral(i) => ProfileKind::Integral(i),
        _ => unreachable!("integral builder returns an integral profile"),
    };
    Ok(Profile {
        kind,
        pc: setup.momentum_polynomial(),
        constants: Some((S::from_f64(a1).expect("finite"), S::from_f64(a2).expect("finite"))),
    })
}

/// The canonical profile `(1 - z^2) p_c(z)`.
pub fn canonical_profile<S: Scalar>(setup: &AdmissibleSetup<S>) -> Profile<S> {
    let f = &Poly::new(vec![S::one(), S::zero(), -S::one()]) * &setup.momentum_polynomial();
    Profile::from_polynomial(setup, f)
}

fn p_as<S: Scalar>(p: Power) -> S {
    match p {
        Power::Int(n) => S::from_i64(n),
        Power::Real(v) => S::from_f64(v).expect("finite exponent"),
    }
}

/// `(−w² F'' + 2(p−1) w F' − p(p−1) F) / p_c + 2 w² S` with `w = z + a`.
pub fn weighted_scalar_curvature<S: Scalar>(
    setup: &AdmissibleSetup<S>,
    w: &WeightParams<S>,
    prof: &Profile<S>,
    z: &S,
) -> Result<S> {
    let p: S = p_as(w.p);
    let one = S::one();
    let two = S::from_i64(2);
    let pcz = setup.momentum_polynomial().eval(z);
    let cd = setup.curvature_density();
    let ww = z.clone() + w.a.clone();
    if !pcz.is_zero() {
        let j = prof.jet(z);
        let l = -(ww.clone() * ww.clone()) * j.d2f + two.clone() * (p.clone() - one.clone()) * ww.clone() * j.df
            - p.clone() * (p - one) * j.f;
        return Ok((l + two * ww.clone() * ww * cd.eval(z)) / pcz);
    }
    let rf = prof
        .rational_form()
        .ok_or_else(|| Error::InvalidArgument("scalar curvature at a zero of p_c needs an exact profile".into()))?;
    let pr = |c: S| RationalFn::constant(c);
    let wl = RationalFn::from_poly(Poly::linear(w.a.clone(), one.clone()));
    let d1 = rf.derivative();
    let d2 = d1.derivative();
    let l = -(wl.clone() * wl.clone() * d2) + pr(two.clone() * (p.clone() - one.clone())) * wl.clone() * d1
        - pr(p.clone() * (p - one)) * rf
        + pr(two) * wl.clone() * wl * RationalFn::from_poly(cd);
    let s = l / RationalFn::from_poly(setup.momentum_polynomial());
    s.eval(z)
        .ok_or_else(|| Error::InvalidProfile("scalar curvature has a pole at a zero of p_c".into()))
}

/// `Θ(z) = F(z) / p_c(z)`.
pub fn theta<S: Scalar>(prof: &Profile<S>, z: &S) -> Result<S> {
    prof.theta(z)
}

/// `|G'' - Q|` with `G''` recovered from the jet of `F`.
pub fn ode_residual(setup: &AdmissibleSetup<f64>, w: &WeightParams<f64>, prof: &Profile<f64>, z: f64) -> Result<f64> {
    let (a1, a2) = prof
        .constants()
        .ok_or_else(|| Error::InvalidArgument("profile has no extremal constants".into()))?;
    let p = w.p.to_f64();
    let ww = z + w.a;
    let j = prof.jet_f64(z);
    // G = w^{1-p} F
    let e = 1.0 - p;
    let g2 = e * (e - 1.0) * ww.powf(e - 2.0) * j.f + 2.0 * e * ww.powf(e - 1.0) * j.df + ww.powf(e) * j.d2f;
    let qz = q_value(&setup.momentum_polynomial(), &setup.curvature_density(), w.a, p, a1, a2, z);
    Ok((g2 - qz).abs())
}

/// One row of a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub z: f64,
    pub f: f64,
    pub theta: f64,
    pub scal: f64,
}

/// Samples `F`, `Θ` and the weighted scalar curvature on `n + 1` Chebyshev nodes.
pub fn sample_profile(
    setup: &AdmissibleSetup<f64>,
    w: &WeightParams<f64>,
    prof: &Profile<f64>,
    n: usize,
) -> Vec<ProfileSample> {
    chebyshev_nodes(n)
        .into_iter()
        .map(|z| {
            let f = prof.value_f64(z);
            let theta = prof.theta(&z).unwrap_or(f64::NAN);
            let scal = weighted_scalar_curvature(setup, w, prof, &z).unwrap_or(f64::NAN);
            ProfileSample { z, f, theta, scal }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::setup::Block;
    use num_rational::BigRational;

    fn neg_scal(s1: BigRational, s2: BigRational) -> (AdmissibleSetup<BigRational>, WeightParams<BigRational>) {
        let setup =
            AdmissibleSetup::new(vec![Block::new(q(1, 2), 1, s1), Block::new(q(1, 3), 1, s2)], 0, 0).unwrap();
        (setup, WeightParams::int(q(5, 1), 6).unwrap())
    }

    #[test]
    fn ansatz_reproduces_closed_form_coefficients() {
        let (s, w) = neg_scal(q(0, 1), q(0, 1));
        let sol = ansatz_solve(&s, &w.a, 6).unwrap();
        assert_eq!(sol.a1, q(20 * 9840, 24073));
        assert_eq!(sol.a2, q(20 * 7836, 3439));
        let c = &sol.profile.coeffs;
        assert_eq!(c[&0], q(-12 * 314, 24073));
        assert_eq!(c[&1], q(2 * -135, 1267));
        assert_eq!(c[&2], q(7640, 15204));
        assert_eq!(c[&3], q(-98400, 433314));
        assert_eq!(c[&5], q(415, 30408));
        assert_eq!(c[&6], q(-21912, 13866048));
        assert!(!c.contains_key(&4));
    }

    #[test]
    fn endpoint_conditions_hold_exactly() {
        let (s, w) = neg_scal(q(2, 1), q(-836, 1203));
        let prof = build_profile_ansatz(&s, &w).unwrap();
        let pc = s.momentum_polynomial();
        for z in [q(1, 1), q(-1, 1)] {
            let j = prof.jet(&z);
            assert_eq!(j.f, q(0, 1));
            assert_eq!(j.df, -q(2, 1) * z.clone() * pc.eval(&z));
            assert_eq!(prof.theta_derivative(&z).unwrap(), -q(2, 1) * z);
        }
        let (a1, a2) = prof.constants().unwrap();
        assert_eq!(a1, q(0, 1));
        assert_eq!(a2, q(34320, 401));
        for k in -3..=3 {
            let z = q(k, 4);
            assert_eq!(weighted_scalar_curvature(&s, &w, &prof, &z).unwrap(), a2);
        }
    }

    #[test]
    fn blow_down_endpoint_uses_cancellation() {
        let s = AdmissibleSetup::new(vec![Block::new(q(1, 3), 1, q(2, 1))], 1, 0).unwrap();
        let w = WeightParams::int(q(3, 1), 7).unwrap();
        let prof = build_profile_ansatz(&s, &w).unwrap();
        let (a1, a2) = prof.constants().unwrap();
        let z = q(-1, 1);
        assert_eq!(s.momentum_polynomial().eval(&z), q(0, 1));
        assert_eq!(prof.theta(&z).unwrap(), q(0, 1));
        assert_eq!(prof.theta_derivative(&z).unwrap(), q(2, 1));
        assert_eq!(weighted_scalar_curvature(&s, &w, &prof, &z).unwrap(), a2 - a1);
    }

    #[test]
    fn integral_matches_ansatz() {
        let (s, w) = neg_scal(q(2, 1), q(-1, 3));
        let exact = build_profile_ansatz(&s, &w).unwrap();
        let fl = build_profile_integral(&s.to_f64(), &w.to_f64()).unwrap();
        let scale = chebyshev_nodes(64).iter().map(|&z| exact.value_f64(z).abs()).fold(0.0, f64::max);
        for z in chebyshev_nodes(64) {
            let d = (exact.value_f64(z) - fl.value_f64(z)).abs();
            assert!(d < 1e-10 * scale, "z={z} diff {d}");
        }
        let (a1, a2) = fl.constants().unwrap();
        for z in [-0.7, 0.1, 0.8] {
            let sc = weighted_scalar_curvature(&s.to_f64(), &w.to_f64(), &fl, &z).unwrap();
            assert!((sc - (a1 * z + a2)).abs() < 1e-9 * (a1.abs() + a2.abs()));
        }
    }

    #[test]
    fn ansatz_rejects_resonant_p() {
        let (s, _) = neg_scal(q(1, 1), q(1, 1));
        let w = WeightParams::int(q(5, 1), 4).unwrap();
        assert!(matches!(build_profile_ansatz(&s, &w), Err(Error::AnsatzNotApplicable(_))));
    }
}
