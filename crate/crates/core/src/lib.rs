//! Tail asymptotics for sums and products of independent random variables
//! and for suprema of self-similar Gaussian processes with random trends,
//! together with the numerical oracles that check them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic_engine;
pub mod error;
pub mod gp_extremes;
pub mod laplace_kernel;
pub mod montecarlo;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod tail_model;

pub use error::{Error, ErrorClass, Result};
pub use tail_model::{
    make_model, moment, sf_eval, AsymptoticTail, DeclaredTail, DistSpec, DistributionModel, EdgeTail, PowerTail,
    RatioRow, RatioTable, Support, WeibullTail,
};
