//! Scalar abstraction shared by the exact and floating-point pipelines.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic needed by the algebraic parts of the pipeline.
///
/// Implemented for `f64`, `BigRational` and rational functions over a field,
/// so the same moment and ansatz code can run numerically, exactly, or
/// symbolically in the weight parameter.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_i64(n: i64) -> Self;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    /// Pivot preference in elimination; zero means unusable.
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    /// Integer power; negative exponents invert.
    fn ipow(&self, n: i64) -> Self {
        if n < 0 {
            return self.ipow(-n).recip();
        }
        let mut base = self.clone();
        let mut e = n as u64;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// An ordered field that can be sampled as `f64`.
pub trait Scalar: Field + PartialOrd + Display + 'static {
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// Exact conversion of a finite float; `None` for NaN or infinities.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_rational(&self) -> Option<BigRational>;

    fn from_rational(r: &BigRational) -> Self;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }

    /// Integer check used to decide whether an exponent admits exact treatment.
    fn as_integer(&self) -> Option<i64>;
}

impl Field for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn ipow(&self, n: i64) -> Self {
        self.powi(n as i32)
    }
    fn pivot_weight(&self) -> f64 {
        f64::abs(*self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
    fn abs_val(&self) -> Self {
        f64::abs(*self)
    }
    fn as_integer(&self) -> Option<i64> {
        (self.fract() == 0.0 && f64::abs(*self) < 9.0e15).then_some(*self as i64)
    }
}

impl Field for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
    fn recip(&self) -> Self {
        BigRational::recip(self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.to_integer().to_i64()
        } else {
            None
        }
    }
}

/// Correctly scaled conversion that survives numerators and denominators
/// far outside the `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        r.numer().clone() / (r.denom().clone() << (shift as usize))
    } else {
        (r.numer().clone() << ((-shift) as usize)) / r.denom().clone()
    };
    let mant = scaled.to_f64().unwrap_or(0.0);
    mant * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

/// Parse `"p/q"`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from_i64(10);
    let mut r = BigRational::from_integer(digits) * ten.ipow(scale as i64);
    if neg {
        r = -r;
    }
    Some(r)
}

/// Exponent of the weight `(z+a)^{-p}`.
///
/// Integer exponents admit the exact pipeline; real ones are float-only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Power {
    Int(i64),
    Real(f64),
}

impl Power {
    pub fn from_f64(p: f64) -> Power {
        if p.fract() == 0.0 && p.abs() < 1.0e9 {
            Power::Int(p as i64)
        } else {
            Power::Real(p)
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self {
            Power::Int(n) => Some(n),
            Power::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Power::Int(n) => n as f64,
            Power::Real(p) => p,
        }
    }
}

impl Display for Power {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Power::Int(n) => write!(f, "{n}"),
            Power::Real(p) => write!(f, "{p}"),
        }
    }
}

/// Shorthand for small exact constants.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::from_ratio(n, d)
}
