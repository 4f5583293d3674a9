//! Error type shared across the library.

use alloc::string::String;
use core::fmt;

/// Errors from model construction, solving and simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of the Laplace exponent.
    Domain { z: f64, lower: f64 },
    /// Unsupported argument value.
    Argument(&'static str),
    /// Parameter set violates the negative-drift condition, so the
    /// all-time supremum is not finite.
    ModelCondition(String),
    /// Parameter outside its admissible range.
    InvalidParameter(String),
    /// Coinciding scale-function exponents; the exponential-sum form
    /// does not exist for these parameters.
    DegenerateModel(String),
    /// A numerical routine failed to reach its tolerance.
    Numerics(String),
    /// Barrier search requested although `b ≤ b*`, where stopping at
    /// once is optimal.
    CaseOne { b: f64, b_star: f64 },
    /// Event budget exhausted before the path terminated.
    SimulationBudget { max_events: u64 },
    /// Penalty not covered by the closed-form solution.
    UnsupportedPenalty(&'static str),
    /// The monotone-penalty verdict does not apply to this penalty.
    NotApplicable(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain { z, lower } => {
                write!(f, "z = {z} outside the domain ({lower}, inf) of psi")
            }
            Self::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Self::ModelCondition(msg) => write!(f, "model condition violated: {msg}"),
            Self::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Self::DegenerateModel(msg) => write!(f, "degenerate model: {msg}"),
            Self::Numerics(msg) => write!(f, "numerical failure: {msg}"),
            Self::CaseOne { b, b_star } => write!(
                f,
                "b = {b} <= b* = {b_star}: stopping immediately is optimal, no barrier exists"
            ),
            Self::SimulationBudget { max_events } => {
                write!(f, "path exceeded the event budget of {max_events}")
            }
            Self::UnsupportedPenalty(msg) => write!(f, "unsupported penalty: {msg}"),
            Self::NotApplicable(msg) => write!(f, "not applicable: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
