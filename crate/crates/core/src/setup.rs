//! Admissible data: base blocks, the momentum polynomial `p_c` and the
//! curvature density `S p_c`.

use crate::error::{Error, Result};
use crate::poly::{product, Poly};
use crate::scalar::{Field, Power, Scalar};

/// One base factor: admissible parameter `x`, complex dimension `d` and
/// normalized scalar curvature `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<F> {
    pub x: F,
    pub d: u32,
    pub s: F,
}

impl<F: Field> Block<F> {
    pub fn new(x: F, d: u32, s: F) -> Self {
        Block { x, d, s }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleSetup<F> {
    blocks: Vec<Block<F>>,
    d0: u32,
    dinf: u32,
}

impl<S: Scalar> AdmissibleSetup<S> {
    /// Validates `0 < |x_a| < 1`, `d_a >= 1` and complex dimension `m >= 2`.
    pub fn new(blocks: Vec<Block<S>>, d0: u32, dinf: u32) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.d == 0 {
                return Err(Error::InvalidSetup(format!("block {i}: d must be positive")));
            }
            if b.x.is_zero() || !(b.x.abs_val() < S::one()) {
                return Err(Error::InvalidSetup(format!(
                    "block {i}: x = {} must satisfy 0 < |x| < 1",
                    b.x
                )));
            }
        }
        let setup = AdmissibleSetup { blocks, d0, dinf };
        if setup.m() < 2 {
            return Err(Error::InvalidSetup("complex dimension m must be at least 2".into()));
        }
        Ok(setup)
    }

    /// Single block `(x, d, s)` with no blow-down factors.
    pub fn single(x: S, d: u32, s: S) -> Result<Self> {
        Self::new(vec![Block::new(x, d, s)], 0, 0)
    }

    pub fn to_f64(&self) -> AdmissibleSetup<f64> {
        self.map(|v| v.to_f64())
    }
}

impl<F: Field> AdmissibleSetup<F> {
    pub fn blocks(&self) -> &[Block<F>] {
        &self.blocks
    }

    pub fn d0(&self) -> u32 {
        self.d0
    }

    pub fn dinf(&self) -> u32 {
        self.dinf
    }

    /// Base blocks plus the `x = 1` and `x = -1` factors when `d0`, `dinf` > 0.
    pub fn extended_blocks(&self) -> Vec<Block<F>> {
        let mut v = self.blocks.clone();
        if self.d0 > 0 {
            v.push(Block::new(F::one(), self.d0, F::from_i64(self.d0 as i64 + 1)));
        }
        if self.dinf > 0 {
            v.push(Block::new(-F::one(), self.dinf, F::from_i64(-(self.dinf as i64 + 1))));
        }
        v
    }

    /// Complex dimension `1 + sum d_a` over the extended index set.
    pub fn m(&self) -> u32 {
        1 + self.blocks.iter().map(|b| b.d).sum::<u32>() + self.d0 + self.dinf
    }

    /// `p_c(z) = prod (1 + x_a z)^{d_a}`.
    pub fn momentum_polynomial(&self) -> Poly<F> {
        product(
            self.extended_blocks()
                .into_iter()
                .map(|b| Poly::linear(F::one(), b.x).pow(b.d)),
        )
    }

    /// `S(z) p_c(z) = sum x_a d_a s_a p_c(z) / (1 + x_a z)`, a polynomial of
    /// degree at most `m - 2`.
    pub fn curvature_density(&self) -> Poly<F> {
        let ext = self.extended_blocks();
        let mut acc = Poly::zero();
        for (i, b) in ext.iter().enumerate() {
            let c = b.x.clone() * F::from_i64(b.d as i64) * b.s.clone();
            if c.is_zero() {
                continue;
            }
            let others = product(ext.iter().enumerate().map(|(j, o)| {
                let e = if i == j { o.d - 1 } else { o.d };
                Poly::linear(F::one(), o.x.clone()).pow(e)
            }));
            acc = &acc + &others.scale(&c);
        }
        acc
    }

    /// The same manifold in the coordinate `-z`: `(x_a, s_a) -> (-x_a, -s_a)`
    /// and the two blow-down factors trade places. A weight `z + a` becomes
    /// `-(z' - a)`, so parameters `a < -1` here are `-a > 1` there.
    pub fn mirror(&self) -> Self {
        AdmissibleSetup {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block { x: -b.x.clone(), d: b.d, s: -b.s.clone() })
                .collect(),
            d0: self.dinf,
            dinf: self.d0,
        }
    }

    /// Coefficient-wise conversion, bypassing validation.
    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> AdmissibleSetup<G> {
        AdmissibleSetup {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block { x: f(&b.x), d: b.d, s: f(&b.s) })
                .collect(),
            d0: self.d0,
            dinf: self.dinf,
        }
    }
}

/// Weight `(z + a)^{-p}` parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightParams<F> {
    pub a: F,
    pub p: Power,
}

impl<S: Scalar> WeightParams<S> {
    /// Requires `a > 1`.
    pub fn new(a: S, p: Power) -> Result<Self> {
        if !(a > S::one()) {
            return Err(Error::InvalidWeight(format!("a = {a} must exceed 1")));
        }
        if let Power::Real(v) = p {
            if !v.is_finite() {
                return Err(Error::InvalidWeight("p must be finite".into()));
            }
        }
        Ok(WeightParams { a, p })
    }

    pub fn int(a: S, p: i64) -> Result<Self> {
        Self::new(a, Power::Int(p))
    }

    pub fn to_f64(&self) -> WeightParams<f64> {
        WeightParams { a: self.a.to_f64(), p: self.p }
    }
}

impl<F: Field> WeightParams<F> {
    /// Unvalidated constructor for symbolic or already-checked data.
    pub fn raw(a: F, p: Power) -> Self {
        WeightParams { a, p }
    }
}
