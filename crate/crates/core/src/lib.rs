//! Numerical laboratory for degenerate elliptic and parabolic operators
//! `-x_d² a Δ + x_d b·D + c + λ` in weighted Sobolev spaces `L_{p,θ}`, `H^n_{p,θ}`.
//!
//! Generic modules work for `f32` and `f64`; the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod bumps;
pub mod corpus;
pub mod elliptic;
pub mod error;
pub mod fd;
pub mod grid;
pub mod indicial;
pub mod parabolic;
pub mod quadrature;
pub mod scalar;
pub mod sharpness;
pub mod spaces;
pub mod sweep;
pub mod tridiag;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = grid::LogGrid<f64>;
pub type Axis = grid::UniformAxis<f64>;
pub type Function = grid::GridFunction<f64>;
pub type SpaceTime = grid::SpaceTimeFunction<f64>;
pub type Norm = spaces::NormParams<f64>;
pub type Weight = spaces::TimeWeight<f64>;
pub type Cutoff = spaces::DyadicCutoff<f64>;
