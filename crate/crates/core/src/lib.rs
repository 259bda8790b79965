#![forbid(unsafe_code)]

//! Executable effective topology.
//!
//! The crate turns the core moves of constructive countably-based topology
//! into runnable, certificate-producing algorithms:
//!
//! - [`sigma`]: fuel-indexed semidecidable truth values, partial values,
//!   and the compactified naturals;
//! - [`kernel`]: a register-machine universe of partial computable
//!   functions, with s-m-n and fixed points of program transformers;
//! - [`spaces`]: countably based represented spaces (Cantor and Baire
//!   space, dyadic reals, the Scott domain of enumerations, algebraic
//!   cpos) and the universal embedding via neighborhood filters;
//! - [`engine`]: monotone acceptors on enumerations, finite-support
//!   certificates, waiting-argument searches, and overt subsets;
//! - [`sober`]: recovery of points from neighborhood-filter oracles, and a
//!   bounded consistency checker for filter laws;
//! - [`klst`]: regularity witnesses, separation witnesses, and the
//!   modulus-of-continuity extractor for expression-defined real maps.
//!
//! Everything that could search forever takes an explicit budget, and
//! exhausting the budget is an outcome, never a claim of falsity. All
//! real-number arithmetic is exact dyadic arithmetic ([`dyadic`]).

pub mod dyadic;
pub mod engine;
pub mod kernel;
pub mod klst;
pub mod nat;
pub mod sigma;
pub mod sober;
pub mod spaces;

pub use dyadic::{formal_ball_inclusion, Ball, Dyadic, Interval};
pub use engine::{
    accepts, overt_exists, shrink_support, wso_search, EngineError, MonotoneMachine, OvertSubset,
    SupportCertificate,
};
pub use klst::{
    grid_check, modulus, parse_expr, regularity_witness, spreen_witness, Expr, KlstError, Modulus,
    ModulusParams, SeparationWitness, SpreenParams,
};
pub use sigma::{extraction, markov_run, omega_lt_infty, Lifted, MarkovOutcome, OmegaBar, Semi};
pub use sober::{
    check_filter_laws, recover_cpo_point, recover_real, FilterOracle, RecoveredReal, SoberError,
};
pub use spaces::{embed, nbh, DyadicReal, Enumeration, ScottPoint, Space};
