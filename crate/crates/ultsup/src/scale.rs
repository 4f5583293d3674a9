//! Scale functions in exponential-sum form.
//!
//! The scale function `W` of a spectrally negative Lévy process is the
//! unique increasing function on `[0, ∞)`, zero on `(−∞, 0)`, with Laplace
//! transform `∫_0^∞ e^{−βx} W(x) dx = 1/ψ(β)` for `β > Φ`. For the three
//! supported families `1/ψ` is rational with simple poles, so `W` is a
//! finite sum `Σᵢ Aᵢ e^{θᵢ x}` — the coefficients are the residues
//! `1/ψ'(zᵢ)` at the roots `zᵢ` of (the rational continuation of) ψ. This
//! makes `W`, `W'` and the barrier integrals
//!
//! ```text
//! I1(a) = ∫_0^a W(x) dx,   I2(a) = ∫_0^a x W(x) dx,
//! I3(a) = ∫_0^a e^{−Φx} W(x) dx
//! ```
//!
//! exact: each is a closed-form antiderivative per term, with the `θ = 0`
//! and `θ = Φ` limits handled explicitly instead of by perturbation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Family, LevyModel};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// `x ↦ Σᵢ Aᵢ e^{θᵢ x}` on `x ≥ 0`, zero on `x < 0`.
///
/// Serializes as the plain list of `(A, θ)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ExpSumFunction {
    terms: Vec<(f64, f64)>,
}

impl ExpSumFunction {
    /// Build from `(coefficient, exponent rate)` pairs. The exponents must
    /// be pairwise distinct: a repeated root would need a polynomial
    /// factor that this representation deliberately excludes.
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("empty exponential sum".into()));
        }
        let scale = terms
            .iter()
            .map(|(_, th)| th.abs())
            .fold(1.0f64, f64::max);
        for (i, &(a, th)) in terms.iter().enumerate() {
            if !a.is_finite() || !th.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite exponential-sum term ({a}, {th})"
                )));
            }
            for &(_, other) in &terms[..i] {
                if (th - other).abs() <= 1e-9 * scale {
                    return Err(Error::DegenerateModel(format!(
                        "repeated scale-function exponent {th}"
                    )));
                }
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    /// `W(x)`; zero for `x < 0` by the support convention.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.terms.iter().map(|&(a, th)| a * (th * x).exp()).sum()
    }

    /// `W'(x)` for `x ≥ 0` (right derivative at 0); zero for `x < 0`.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|&(a, th)| a * th * (th * x).exp())
            .sum()
    }

    /// `I1(a) = ∫_0^a W(x) dx`.
    pub fn integral_i1(&self, a: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, th)| if th == 0.0 { c * a } else { c * (th * a).exp_m1() / th })
            .sum()
    }

    /// `I2(a) = ∫_0^a x W(x) dx`.
    pub fn integral_i2(&self, a: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, th)| {
                let u = th * a;
                if u.abs() < 0.5 {
                    // ∫_0^a x e^{θx} dx = a² Σ_k u^k / (k! (k+2)); the closed
                    // form loses precision to cancellation for small |u|
                    c * a * a * small_u_series(u)
                } else {
                    c * (a * u.exp() / th - u.exp_m1() / (th * th))
                }
            })
            .sum()
    }

    /// `I3(a, Φ) = ∫_0^a e^{−Φx} W(x) dx`; the term with `θ = Φ` integrates
    /// to `A·a` exactly.
    pub fn integral_i3(&self, a: f64, phi0: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, th)| {
                let d = th - phi0;
                if d == 0.0 {
                    c * a
                } else {
                    c * (d * a).exp_m1() / d
                }
            })
            .sum()
    }
}

/// `Σ_{k≥0} u^k / (k! (k+2))`, the factor in `∫_0^a x e^{θx} dx = a² Σ`.
fn small_u_series(u: f64) -> f64 {
    let mut term = 0.5f64;
    let mut acc = term;
    let mut k = 1.0;
    while term.abs() > 1e-18 {
        term *= u / k * (k + 1.0) / (k + 2.0);
        acc += term;
        k += 1.0;
    }
    acc
}

/// Construct the scale function of a model as an exponential sum.
///
/// Per family the terms are `(1/ψ'(zᵢ), zᵢ)` over the roots of the rational
/// continuation of ψ: `{0, Φ}` for Brownian-with-drift and the compound
/// Poisson family, `{0, Φ, z₋}` (one negative root) for the jump diffusion.
/// `W(0) = Σ Aᵢ` is `1/c` in the bounded-variation case and `0` otherwise,
/// and `W'(0) = Σ Aᵢ θᵢ` is finite by construction.
pub fn build_w(model: &LevyModel) -> Result<ExpSumFunction> {
    let phi = model.phi0();
    let terms = match model.family() {
        Family::BrownianDrift => vec![
            (1.0 / model.psi_deriv_raw(phi, 1), phi),
            (1.0 / model.psi_deriv_raw(0.0, 1), 0.0),
        ],
        Family::CramerLundbergExp => {
            let (c, mu, eta) = (model.c(), model.mu(), model.eta());
            let denom = mu - eta * c;
            vec![(mu / (c * denom), phi), (-eta / denom, 0.0)]
        }
        Family::JumpDiffusionExp => {
            let (_, neg) = model.jd_nonzero_roots();
            vec![
                (1.0 / model.psi_deriv_raw(phi, 1), phi),
                (1.0 / model.psi_deriv_raw(0.0, 1), 0.0),
                (1.0 / model.psi_deriv_raw(neg, 1), neg),
            ]
        }
    };
    ExpSumFunction::new(terms)
}
