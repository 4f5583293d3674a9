//! Closed-form solution of the drawdown stopping problem.
//!
//! With `X̄_∞ ~ Exp(Φ)`, conditioning on the current drawdown turns the
//! squared-error prediction objective into a standard optimal stopping
//! problem for the reflected process with payoff
//!
//! ```text
//! H(y) = (y − b)² + (2/Φ) e^{−Φy} (y − b + 1/Φ),
//! ```
//!
//! so minimizing `E[(X̄_∞ − X_τ − b)²]` over stopping times is the same
//! problem as minimizing `E[H(Y_τ)]` over stopping rules for the drawdown
//! `Y`. The solution splits on a threshold:
//!
//! * `b ≤ b* = (ψ'(Φ)/Φ − ψ''(0)/2)/ψ'(0)` — stopping at once is optimal
//!   and the value function is `H` itself;
//! * `b > b*` — the first time the drawdown reaches `a*` is optimal, where
//!   `a* ∈ (0, b]` is the unique root of the function `g` below, and the
//!   value function is the candidate payoff `f_{a*}`.
//!
//! `g`, `f_a` and the value function are exact expressions in `W`, `W'`
//! and the integrals `I1`, `I2`, `I3`, so the only numerics is the
//! one-dimensional root search for `a*`.

use alloc::format;

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::quad::unit_interval_with_left_singularity;
use crate::roots::brent;
use crate::scale::{build_w, ExpSumFunction};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Which case of the solution applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `b ≤ b*`: stop at once, `V = H`.
    StopImmediately,
    /// `b > b*`: stop when the drawdown first reaches `a*`.
    Barrier,
}

/// Penalty on the gap `X̄_∞ − X_τ`.
pub enum PenaltySpec<'a> {
    /// `φ(x) = (x − b)²` with `b > 0`; the case with a closed-form solution.
    Quadratic { b: f64 },
    /// Any nonnegative continuous `φ` with `∫_0^∞ φ(x) e^{−Φx} dx < ∞`,
    /// plus a declared monotonicity flag. Provided for inspection via
    /// [`transform_h_general`] and [`monotone_penalty_verdict`]; not
    /// accepted by [`solve`].
    General {
        phi: &'a dyn Fn(f64) -> f64,
        nondecreasing: bool,
    },
}

/// `H(y) = (y−b)² + (2/Φ) e^{−Φy} (y − b + 1/Φ)`: expected squared error
/// of stopping right now at drawdown `y`.
pub fn transform_h_quadratic(model: &LevyModel, b: f64, y: f64) -> f64 {
    quad_h(model.phi0(), b, y)
}

pub(crate) fn quad_h(phi: f64, b: f64, y: f64) -> f64 {
    let d = y - b;
    d * d + 2.0 / phi * (-phi * y).exp() * (d + 1.0 / phi)
}

/// `H'(y) = 2 (y − b)(1 − e^{−Φy})`: negative on `(0, b)`, zero at `b`,
/// positive beyond, so `H` bottoms out at `b`.
pub(crate) fn quad_h_prime(phi: f64, b: f64, y: f64) -> f64 {
    2.0 * (y - b) * (-(-phi * y).exp_m1())
}

/// `H(y) = φ(y)(1 − e^{−Φy}) + ∫_y^∞ φ(z) Φ e^{−Φz} dz` for a general
/// penalty.
///
/// The tail integral is computed by adaptive quadrature after the
/// substitution `u = e^{−Φ(z−y)}`, which maps it to
/// `e^{−Φy} ∫_0^1 φ(y − ln(u)/Φ) du`, to absolute accuracy `1e−10`.
/// A divergent tail (integrability condition violated) is reported as a
/// numerics error.
pub fn transform_h_general(
    model: &LevyModel,
    penalty_phi: &dyn Fn(f64) -> f64,
    y: f64,
) -> Result<f64> {
    let phi = model.phi0();
    let tail = unit_interval_with_left_singularity(|u| penalty_phi(y - u.ln() / phi), 1e-10)?;
    Ok(penalty_phi(y) * (-(-phi * y).exp_m1()) + (-phi * y).exp() * tail)
}

/// Verdict for a nondecreasing penalty: waiting cannot beat the present,
/// so stopping at once is optimal with value `E[φ(X̄_∞)] = H(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneVerdict {
    /// Optimal value, attained by `τ = 0` for every starting drawdown.
    pub value: f64,
}

/// Classify a penalty declared nondecreasing. Errors with `NotApplicable`
/// for quadratic penalties (not monotone) and for general penalties whose
/// flag is unset.
pub fn monotone_penalty_verdict(
    model: &LevyModel,
    penalty: &PenaltySpec<'_>,
) -> Result<MonotoneVerdict> {
    match penalty {
        PenaltySpec::Quadratic { .. } => {
            Err(Error::NotApplicable("quadratic penalty is not monotone"))
        }
        PenaltySpec::General {
            nondecreasing: false,
            ..
        } => Err(Error::NotApplicable("penalty not declared nondecreasing")),
        PenaltySpec::General { phi, .. } => Ok(MonotoneVerdict {
            value: transform_h_general(model, phi, 0.0)?,
        }),
    }
}

/// `b* = (ψ'(Φ)/Φ − ψ''(0)/2)/ψ'(0)`: the largest offset for which
/// stopping at once is optimal. Zero exactly when the process has no
/// jumps, strictly positive otherwise.
pub fn threshold_b_star(model: &LevyModel) -> f64 {
    let phi = model.phi0();
    (model.psi_deriv_raw(phi, 1) / phi - model.psi_deriv_raw(0.0, 2) / 2.0)
        / model.psi_deriv_raw(0.0, 1)
}

/// Carrier of the per-`(model, b)` constants and closed forms.
///
/// Immutable after construction; all methods are pure functions, safe to
/// share across threads.
#[derive(Debug, Clone)]
pub struct Solver {
    model: LevyModel,
    b: f64,
    phi: f64,
    dpsi0: f64,
    dpsi_phi: f64,
    d2psi0: f64,
    w: ExpSumFunction,
}

impl Solver {
    pub fn new(model: &LevyModel, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "quadratic penalty requires b > 0, got {b}"
            )));
        }
        let phi = model.phi0();
        Ok(Self {
            model: *model,
            b,
            phi,
            dpsi0: model.psi_deriv_raw(0.0, 1),
            dpsi_phi: model.psi_deriv_raw(phi, 1),
            d2psi0: model.psi_deriv_raw(0.0, 2),
            w: build_w(model)?,
        })
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn phi0(&self) -> f64 {
        self.phi
    }

    pub fn scale_w(&self) -> &ExpSumFunction {
        &self.w
    }

    /// Payoff transform `H`.
    pub fn h(&self, y: f64) -> f64 {
        quad_h(self.phi, self.b, y)
    }

    /// `H'`.
    pub fn h_prime(&self, y: f64) -> f64 {
        quad_h_prime(self.phi, self.b, y)
    }

    pub fn threshold_b_star(&self) -> f64 {
        threshold_b_star(&self.model)
    }

    /// `g2(a) = ψ''(0) + 2ψ'(0)(b − a) − (2/Φ) e^{−Φa} ψ'(Φ)`; strictly
    /// increasing, and `g' = W'·g2`.
    pub fn g2(&self, a: f64) -> f64 {
        self.d2psi0 + 2.0 * self.dpsi0 * (self.b - a)
            - 2.0 / self.phi * (-self.phi * a).exp() * self.dpsi_phi
    }

    /// The barrier criterion function
    /// `g(a) = 2ψ'(0) I1(a) − 2ψ'(Φ) I3(a) + W(a) g2(a)`.
    ///
    /// For `b > b*` it is negative on `(0, a*)`, zero at the optimal
    /// barrier `a*` and positive beyond; for `b ≤ b*` it is positive on
    /// all of `(0, ∞)`.
    pub fn g(&self, a: f64) -> f64 {
        2.0 * self.dpsi0 * self.w.integral_i1(a) - 2.0 * self.dpsi_phi * self.w.integral_i3(a, self.phi)
            + self.w.eval(a) * self.g2(a)
    }

    /// Magnitude of the summands of `g(a)`, used to scale the residual check.
    fn g_scale(&self, a: f64) -> f64 {
        1.0 + (2.0 * self.dpsi0 * self.w.integral_i1(a)).abs()
            + (2.0 * self.dpsi_phi * self.w.integral_i3(a, self.phi)).abs()
            + (self.w.eval(a) * self.g2(a)).abs()
    }

    /// Unique root of `g` on `(0, ∞)`, defined when `b > b*`.
    ///
    /// The root satisfies `a* ≤ b`, so the bracket starts at `(0, b]` and
    /// doubles upward only to absorb the no-jump boundary case `a* = b`
    /// where `g(b)` is an exact zero up to rounding. The returned point is
    /// accurate to well below the `1e−10` budget in `a` and its residual
    /// is checked against `1e−12` of the term magnitudes.
    pub fn find_a_star(&self) -> Result<f64> {
        let b_star = self.threshold_b_star();
        if self.b <= b_star {
            return Err(Error::CaseOne {
                b: self.b,
                b_star,
            });
        }
        let mut hi = self.b;
        let mut g_hi = self.g(hi);
        if g_hi == 0.0 {
            return Ok(hi);
        }
        let mut doublings = 0;
        while g_hi < 0.0 {
            hi *= 2.0;
            g_hi = self.g(hi);
            doublings += 1;
            if doublings > 60 {
                return Err(Error::Numerics(
                    "barrier search: g stayed negative while doubling upward".into(),
                ));
            }
        }
        let mut lo = 0.5 * hi.min(self.b);
        while self.g(lo) >= 0.0 {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::Numerics(
                    "barrier search: no sign change above zero".into(),
                ));
            }
        }
        let a_star = brent(|a| self.g(a), lo, hi, 1e-13)?;
        let residual = self.g(a_star).abs();
        if residual > 1e-12 * self.g_scale(a_star) {
            return Err(Error::Numerics(format!(
                "barrier root residual {residual:.3e} above tolerance at a* = {a_star}"
            )));
        }
        Ok(a_star)
    }

    /// Expected payoff `f_a(y) = E[H(Y^y_{τ_a})]` of the barrier rule at
    /// level `a`, in closed form. Equals `H(y)` for `y ≥ a` (the rule stops
    /// at once there).
    pub fn f_a(&self, a: f64, y: f64) -> f64 {
        if y >= a {
            self.h(y)
        } else {
            self.f_a_lower(a, y)
        }
    }

    /// The pre-barrier branch of `f_a` as an analytic expression, not
    /// gated on `y < a`. At `y = a` this is the left limit
    /// `H(a) + g(a) W(0)/W'(a)`, and it extends smoothly to slightly
    /// negative `y`, which the boundary diagnostics use.
    pub fn f_a_lower(&self, a: f64, y: f64) -> f64 {
        let r = a - y;
        let ey = (-self.phi * y).exp();
        self.h(y)
            - self.w.integral_i1(r) * (2.0 * self.dpsi0 * (self.b - y) + self.d2psi0)
            + 2.0 * self.dpsi0 * self.w.integral_i2(r)
            + 2.0 * self.dpsi_phi * ey * self.w.integral_i3(r, self.phi) / self.phi
            + self.g(a) * self.w.eval(r) / self.w.eval_deriv(a)
    }

    /// Spatial derivative of `f_a`. For `y < a`:
    ///
    /// ```text
    /// f_a'(y) = H'(y) + W(a−y) g2(a) + 2ψ'(0) I1(a−y)
    ///           − 2ψ'(Φ) e^{−Φy} I3(a−y) − g(a) W'(a−y)/W'(a),
    /// ```
    ///
    /// which telescopes to `0` at `y = 0` (the drawdown reflects at zero)
    /// and, at the left edge `y ↑ a`, to `H'(a) − g(a) W'(0)/W'(a)` — equal
    /// to `H'(a)` exactly at `a = a*` for unbounded-variation models.
    pub fn f_a_prime(&self, a: f64, y: f64) -> f64 {
        if y >= a {
            return self.h_prime(y);
        }
        let r = a - y;
        let ey = (-self.phi * y).exp();
        self.h_prime(y) + self.w.eval(r) * self.g2(a) + 2.0 * self.dpsi0 * self.w.integral_i1(r)
            - 2.0 * self.dpsi_phi * ey * self.w.integral_i3(r, self.phi)
            - self.g(a) * self.w.eval_deriv(r) / self.w.eval_deriv(a)
    }

    /// Resolve the case split and package the value function.
    pub fn solve(self) -> Result<StoppingSolution> {
        let b_star = self.threshold_b_star();
        if self.b <= b_star {
            Ok(StoppingSolution {
                solver: self,
                case: CaseTag::StopImmediately,
                b_star,
                a_star: None,
            })
        } else {
            let a_star = self.find_a_star()?;
            Ok(StoppingSolution {
                solver: self,
                case: CaseTag::Barrier,
                b_star,
                a_star: Some(a_star),
            })
        }
    }
}

/// Solve the quadratic-penalty problem for a model.
///
/// General penalties are rejected: the closed-form machinery covers the
/// quadratic case only (nondecreasing penalties have their own trivial
/// verdict via [`monotone_penalty_verdict`]).
pub fn solve(model: &LevyModel, penalty: &PenaltySpec<'_>) -> Result<StoppingSolution> {
    match penalty {
        PenaltySpec::Quadratic { b } => Solver::new(model, *b)?.solve(),
        PenaltySpec::General { .. } => Err(Error::UnsupportedPenalty(
            "closed-form solution covers the quadratic penalty only",
        )),
    }
}

/// The solved stopping problem: case tag, threshold, optimal barrier and
/// evaluators for the value function `V` and the payoff transform `H`.
///
/// In the barrier case `V(y) = f_{a*}(y)` for `y < a*` and `V = H` from
/// `a*` on; `V ≤ H` everywhere and `V` is continuous.
#[derive(Debug, Clone)]
pub struct StoppingSolution {
    solver: Solver,
    case: CaseTag,
    b_star: f64,
    a_star: Option<f64>,
}

impl StoppingSolution {
    pub fn case(&self) -> CaseTag {
        self.case
    }

    pub fn b_star(&self) -> f64 {
        self.b_star
    }

    /// Optimal barrier; `None` in the stop-immediately case.
    pub fn a_star(&self) -> Option<f64> {
        self.a_star
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    /// Value function `V(y)`.
    pub fn value(&self, y: f64) -> f64 {
        match self.a_star {
            None => self.solver.h(y),
            Some(a_star) => self.solver.f_a(a_star, y),
        }
    }

    /// Payoff transform `H(y)`.
    pub fn h(&self, y: f64) -> f64 {
        self.solver.h(y)
    }
}
