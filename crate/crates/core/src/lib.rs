//! Weighted extremal Kähler profiles on admissible projective bundles.
//!
//! The crate is generic over the scalar type: `f64` drives the numerical
//! pipeline and [`Rational`] the exact one. Aliases for both live here.

pub mod einstein_maxwell;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod orthotoric;
pub mod poly;
pub mod positivity;
pub mod profile;
pub mod quadrature;
pub mod ratfn;
pub mod roots;
pub mod scalar;
pub mod setup;
pub mod stability;

pub use error::{Error, Result};
pub use moments::{alpha, beta, solve_extremal_constants, ExtremalConstants};
pub use poly::Poly;
pub use positivity::{positivity_check, PositivityReport, PositivityVerdict};
pub use profile::{
    build_profile, build_profile_ansatz, build_profile_integral, canonical_profile, theta, weighted_scalar_curvature,
    Jet, Profile,
};
pub use ratfn::RationalFn;
pub use scalar::{parse_rational, q, Field, Power, Scalar};
pub use setup::{AdmissibleSetup, Block, WeightParams};
pub use stability::{df_admissible, df_oracle, df_product, stability_verdict, Mabuchi, StabilityReport, StabilityVerdict};

pub type Rational = num_rational::BigRational;

pub type ExactPoly = Poly<Rational>;
pub type FloatPoly = Poly<f64>;
pub type ExactSetup = AdmissibleSetup<Rational>;
pub type FloatSetup = AdmissibleSetup<f64>;
pub type ExactWeight = WeightParams<Rational>;
pub type FloatWeight = WeightParams<f64>;
pub type ExactConstants = ExtremalConstants<Rational>;
pub type FloatConstants = ExtremalConstants<f64>;
pub type ExactProfile = Profile<Rational>;
pub type FloatProfile = Profile<f64>;
