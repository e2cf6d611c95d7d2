//! Generalized Hilbert series operators `H_μ a(m) = Σ_n μ[m+n] a_n` on
//! weighted sequence spaces `ℓ^p_α`.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the double-precision instantiation used by the CLI.

pub mod cli;
pub mod error;
pub mod measures;
pub mod normest;
pub mod operator;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod seqspace;
pub mod series;
pub mod specfun;
pub mod sum;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Measure64 = measures::Measure<f64>;
pub type Density64 = measures::Density<f64>;
pub type MomentTable64 = measures::MomentTable<f64>;
pub type WeightParams64 = seqspace::WeightParams<f64>;
pub type Seq64 = seqspace::Seq<f64>;
pub type OperatorContext64 = operator::OperatorContext<f64>;
pub type NormEstimate64 = normest::NormEstimate<f64>;

pub type Measure32 = measures::Measure<f32>;
pub type WeightParams32 = seqspace::WeightParams<f32>;
pub type Seq32 = seqspace::Seq<f32>;
