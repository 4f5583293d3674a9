//! Drawdown stopping rules for spectrally negative Lévy processes.
//!
//! A spectrally negative Lévy process with negative mean drifts to −∞ and
//! its all-time maximum `X̄_∞` is finite, Exp(Φ)-distributed. This crate
//! solves the prediction problem of stopping the process so that its
//! position is as close as possible, in mean squared error, to a fixed
//! offset `b` below that (unobservable) maximum. The solution is explicit:
//! below a threshold `b*` it is optimal to stop at once, above it the
//! optimal rule stops the first time the drawdown `X̄_t − X_t` reaches a
//! barrier `a* ≤ b` computed from the scale function of the process.
//!
//! Modules:
//! - [`model`] — parametric families, Laplace exponent ψ and right inverse Φ;
//! - [`scale`] — scale function `W` in exponential-sum form with exact
//!   antiderivatives;
//! - [`solver`] — payoff transform `H`, case threshold, barrier `a*` and the
//!   value function;
//! - [`sim`] — Monte Carlo simulation of the reflected (drawdown) process
//!   for cross-validating the closed forms.
//!
//! The crate is `no_std`-compatible (`alloc` required); the default `std`
//! feature uses the host float intrinsics, without it float math comes
//! from `libm`.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod model;
pub mod scale;
pub mod sim;
pub mod solver;

mod quad;
mod roots;

pub use error::{Error, Result};
pub use model::{Family, LevyModel, ModelConfig, ValidationReport, Variation};
pub use scale::{build_w, ExpSumFunction};
pub use sim::{
    simulate_prediction_error, simulate_prediction_error_with, simulate_reflected_stop,
    simulate_reflected_stop_with, simulate_ultimate_supremum, simulate_ultimate_supremum_with,
    PathRunner, SerialRunner, SimConfig, SimEstimate, SupremumSample,
};
pub use solver::{
    monotone_penalty_verdict, solve, threshold_b_star, transform_h_general, transform_h_quadratic,
    CaseTag, MonotoneVerdict, PenaltySpec, Solver, StoppingSolution,
};
