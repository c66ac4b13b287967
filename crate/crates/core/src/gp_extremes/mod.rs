//! Suprema of self-similar Gaussian processes minus power trends.
//!
//! Deterministic-trend constants, the random-trend and random-offset tail
//! results, fBm simulation, Monte Carlo estimates of the Pickands and 𝔈
//! constants, and an exact oracle for Brownian motion.

mod brownian;
mod constants;
mod estimators;
mod fbm;
mod model;
mod theorems;

pub use brownian::{
    bm_conditional_mc, bm_exact_oracle, bm_exact_oracle_for, bounded_offset_surrogate_oracle, eta_law, zeta_law,
};
pub use constants::{
    hp_constants, pickands_exact, std_normal_pdf, std_normal_tail, trend_tail_asymptotic, HPConstants, PickandsSource,
    TrendTail,
};
pub use estimators::{
    e_const_estimate, e_const_estimates, normalized_sups, pickands_estimate, sup_exceedance, truncation_horizon,
    Estimate, GaussianProcess, PickandsMethod, ESTIMATED,
};
pub use fbm::{fbm_paths, fbm_simulate, FbmGenerator, PathDump};
pub use model::{EtaSpec, LimitConstant, ProcessKind, TrendModel, ZetaSpec};
pub use theorems::{
    e_const_brownian, e_const_order, resolve_e_const, theorem5_by_composition, theorem5_tail, theorem6_case,
    theorem6_tail, EConstSource, Theorem6Case,
};
