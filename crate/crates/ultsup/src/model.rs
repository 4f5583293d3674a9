//! Parametric families of spectrally negative Lévy processes.
//!
//! Three families are supported, each with a closed-form Laplace exponent
//! `ψ(z) = log E[exp(z X₁)]`:
//!
//! * `BrownianDrift` — `X_t = σ B_t + c t` with `σ > 0`, `c < 0`;
//! * `CramerLundbergExp` — `X_t = c t − Σ_{k ≤ N_t} Z_k` with premium rate
//!   `c > 0`, Poisson intensity `μ` and `Z_k ~ Exp(η)`;
//! * `JumpDiffusionExp` — the previous two combined, `σ > 0`.
//!
//! Constructors enforce `ψ'(0) < 0` (equivalently `Φ := Φ(0) > 0`), which
//! makes the process drift to −∞ and its all-time supremum a.s. finite and
//! Exp(Φ)-distributed. ψ is strictly convex on its domain with `ψ(0) = 0`,
//! so the right inverse `Φ(q) = sup{z ≥ 0 | ψ(z) = q}` is well defined.

use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::brent;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Model family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    BrownianDrift,
    CramerLundbergExp,
    JumpDiffusionExp,
}

/// Path variation class. Bounded variation iff `σ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variation {
    Bounded,
    Unbounded,
}

/// A validated spectrally negative Lévy process.
///
/// Construct through [`LevyModel::brownian_drift`],
/// [`LevyModel::cramer_lundberg`], [`LevyModel::jump_diffusion`] or a
/// [`ModelConfig`]; construction fails unless the drift condition
/// `ψ'(0) < 0` and the per-family parameter ranges hold. All values are
/// immutable, every method is a pure function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelConfig", into = "ModelConfig")]
pub struct LevyModel {
    family: Family,
    sigma: f64,
    c: f64,
    mu: f64,
    eta: f64,
}

impl LevyModel {
    /// `X_t = σ B_t + c t`, requires `σ > 0` and `c < 0`.
    pub fn brownian_drift(sigma: f64, c: f64) -> Result<Self> {
        ModelConfig {
            family: Family::BrownianDrift,
            sigma,
            c,
            mu: 0.0,
            eta: 0.0,
        }
        .build()
    }

    /// `X_t = c t − Σ Z_k` with `Z_k ~ Exp(η)` arriving at rate `μ`;
    /// requires `c, μ, η > 0` and `μ > c η`.
    pub fn cramer_lundberg(c: f64, mu: f64, eta: f64) -> Result<Self> {
        ModelConfig {
            family: Family::CramerLundbergExp,
            sigma: 0.0,
            c,
            mu,
            eta,
        }
        .build()
    }

    /// `X_t = σ B_t + c t − Σ Z_k`; requires `σ, μ, η > 0` and `c < μ/η`.
    pub fn jump_diffusion(sigma: f64, c: f64, mu: f64, eta: f64) -> Result<Self> {
        ModelConfig {
            family: Family::JumpDiffusionExp,
            sigma,
            c,
            mu,
            eta,
        }
        .build()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn variation(&self) -> Variation {
        if self.sigma == 0.0 {
            Variation::Bounded
        } else {
            Variation::Unbounded
        }
    }

    fn has_jumps(&self) -> bool {
        self.family != Family::BrownianDrift
    }

    /// Lower endpoint of the domain of ψ (open; −∞ when there are no jumps).
    pub fn domain_lower(&self) -> f64 {
        if self.has_jumps() {
            -self.eta
        } else {
            f64::NEG_INFINITY
        }
    }

    fn check_domain(&self, z: f64) -> Result<()> {
        if z.is_finite() && z > self.domain_lower() {
            Ok(())
        } else {
            Err(Error::Domain {
                z,
                lower: self.domain_lower(),
            })
        }
    }

    /// Laplace exponent `ψ(z)`.
    pub fn psi(&self, z: f64) -> Result<f64> {
        self.check_domain(z)?;
        Ok(self.psi_raw(z))
    }

    /// ψ as a rational function, without the domain check. Used internally
    /// on the meromorphic continuation past `−η`.
    pub(crate) fn psi_raw(&self, z: f64) -> f64 {
        match self.family {
            Family::BrownianDrift => 0.5 * self.sigma * self.sigma * z * z + self.c * z,
            // cz − μ + μη/(z+η) with the jump part factored through z, so
            // that ψ(0) = 0 holds exactly in floats
            Family::CramerLundbergExp => self.c * z - self.mu * z / (z + self.eta),
            Family::JumpDiffusionExp => {
                0.5 * self.sigma * self.sigma * z * z + self.c * z
                    - self.mu * z / (z + self.eta)
            }
        }
    }

    /// `k`-th derivative of ψ for `k ∈ {1, 2, 3}`, in closed form.
    ///
    /// `ψ'' > 0` (strict convexity) and `ψ''' ≤ 0`, with equality exactly
    /// when the process has no jumps.
    pub fn psi_deriv(&self, z: f64, order: u32) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::Argument("derivative order must be 1, 2 or 3"));
        }
        self.check_domain(z)?;
        Ok(self.psi_deriv_raw(z, order))
    }

    pub(crate) fn psi_deriv_raw(&self, z: f64, order: u32) -> f64 {
        let s2 = self.sigma * self.sigma;
        let diffusion = match order {
            1 => s2 * z + self.c,
            2 => s2,
            _ => 0.0,
        };
        if !self.has_jumps() {
            return diffusion;
        }
        let d = z + self.eta;
        let jump = match order {
            1 => -self.mu * self.eta / (d * d),
            2 => 2.0 * self.mu * self.eta / (d * d * d),
            _ => -6.0 * self.mu * self.eta / (d * d * d * d),
        };
        diffusion + jump
    }

    /// `Φ := Φ(0)`, the largest nonnegative root of ψ. Strictly positive
    /// for every constructed model.
    pub fn phi0(&self) -> f64 {
        self.phi0_raw().max(0.0)
    }

    /// Largest root of ψ on `[0, ∞)` computed from raw parameters; can be
    /// zero (or formally negative before clamping) when the drift
    /// condition fails.
    fn phi0_raw(&self) -> f64 {
        match self.family {
            Family::BrownianDrift => -2.0 * self.c / (self.sigma * self.sigma),
            Family::CramerLundbergExp => self.mu / self.c - self.eta,
            Family::JumpDiffusionExp => self.jd_nonzero_roots().0,
        }
    }

    /// The two nonzero roots of the rational ψ of the jump-diffusion
    /// family, `(positive, negative)`. For valid parameters the roots of
    /// `ψ(z)(z + η) = z (σ²z²/2 + (c + σ²η/2) z + (cη − μ))` are `0`, one
    /// positive and one negative root of the quadratic factor.
    pub(crate) fn jd_nonzero_roots(&self) -> (f64, f64) {
        let a = 0.5 * self.sigma * self.sigma;
        let b = self.c + 0.5 * self.sigma * self.sigma * self.eta;
        let c = self.c * self.eta - self.mu;
        let disc = (b * b - 4.0 * a * c).sqrt();
        if b >= 0.0 {
            let neg = (-b - disc) / (2.0 * a);
            (c / (a * neg), neg)
        } else {
            let pos = (-b + disc) / (2.0 * a);
            (pos, c / (a * pos))
        }
    }

    /// Right inverse `Φ(q) = sup{z ≥ 0 | ψ(z) = q}` for `q ≥ 0`.
    ///
    /// Closed form except for jump-diffusion with `q > 0`, which brackets
    /// the root above `Φ(0)` and iterates to `|ψ(Φ(q)) − q| ≤ 1e−12·max(1, q)`.
    pub fn phi(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::Argument("q must be finite and nonnegative"));
        }
        if q == 0.0 {
            return Ok(self.phi0());
        }
        let root = match self.family {
            Family::BrownianDrift => {
                let s2 = self.sigma * self.sigma;
                (-self.c + (self.c * self.c + 2.0 * s2 * q).sqrt()) / s2
            }
            Family::CramerLundbergExp => {
                // c z² + (cη − μ − q) z − qη = 0; the linear coefficient is
                // negative for valid parameters, so this form is stable.
                let b = self.c * self.eta - self.mu - q;
                let disc = b * b + 4.0 * self.c * q * self.eta;
                (-b + disc.sqrt()) / (2.0 * self.c)
            }
            Family::JumpDiffusionExp => {
                let lo = self.phi0();
                let mut hi = lo + 1.0;
                let mut doublings = 0;
                while self.psi_raw(hi) <= q {
                    hi = lo + 2.0 * (hi - lo);
                    doublings += 1;
                    if doublings > 200 {
                        return Err(Error::Numerics(format!(
                            "phi({q}): failed to bracket the root"
                        )));
                    }
                }
                brent(|z| self.psi_raw(z) - q, lo, hi, 1e-14)?
            }
        };
        let residual = (self.psi_raw(root) - q).abs();
        if residual > 1e-12 * q.max(1.0) {
            return Err(Error::Numerics(format!(
                "phi({q}): residual {residual:.3e} above tolerance"
            )));
        }
        Ok(root)
    }

    /// Diagnostic report of the standing assumptions. Passes by
    /// construction for any `LevyModel`; see [`ModelConfig::validate`] for
    /// unvalidated parameter sets.
    pub fn validate(&self) -> ValidationReport {
        report(self)
    }
}

/// Raw, JSON-facing parameter set: `{family, sigma, c, mu, eta}`.
///
/// Absent numeric fields default to zero and are validated per family when
/// building a [`LevyModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: Family,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub eta: f64,
}

impl ModelConfig {
    /// Per-family parameter-range checks that do not involve the drift
    /// condition: positivity and which fields must be absent.
    fn check_shape(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for (name, v) in [
            ("sigma", self.sigma),
            ("c", self.c),
            ("mu", self.mu),
            ("eta", self.eta),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        match self.family {
            Family::BrownianDrift => {
                if self.sigma <= 0.0 {
                    return bad(format!("BrownianDrift requires sigma > 0, got {}", self.sigma));
                }
                if self.mu != 0.0 || self.eta != 0.0 {
                    return bad("BrownianDrift has no jumps; mu and eta must be absent".into());
                }
            }
            Family::CramerLundbergExp => {
                if self.sigma != 0.0 {
                    return bad("CramerLundbergExp requires sigma = 0".into());
                }
                if self.c <= 0.0 {
                    return bad(format!("CramerLundbergExp requires c > 0, got {}", self.c));
                }
                if self.mu <= 0.0 || self.eta <= 0.0 {
                    return bad(format!(
                        "CramerLundbergExp requires mu > 0 and eta > 0, got mu = {}, eta = {}",
                        self.mu, self.eta
                    ));
                }
            }
            Family::JumpDiffusionExp => {
                if self.sigma <= 0.0 {
                    return bad(format!(
                        "JumpDiffusionExp requires sigma > 0, got {}",
                        self.sigma
                    ));
                }
                if self.mu <= 0.0 || self.eta <= 0.0 {
                    return bad(format!(
                        "JumpDiffusionExp requires mu > 0 and eta > 0, got mu = {}, eta = {}",
                        self.mu, self.eta
                    ));
                }
            }
        }
        Ok(())
    }

    fn as_model_unchecked(&self) -> LevyModel {
        LevyModel {
            family: self.family,
            sigma: self.sigma,
            c: self.c,
            mu: self.mu,
            eta: self.eta,
        }
    }

    /// Validate and build the model. Fails on out-of-range parameters and
    /// on `ψ'(0) ≥ 0` (finite supremum condition).
    pub fn build(&self) -> Result<LevyModel> {
        let rep = self.validate()?;
        if !rep.drift_to_minus_infinity {
            return Err(Error::ModelCondition(format!(
                "psi'(0) = {} >= 0, so the supremum is infinite; need negative mean drift",
                rep.mean_x1
            )));
        }
        Ok(self.as_model_unchecked())
    }

    /// Compute the [`ValidationReport`] without requiring the drift
    /// condition to hold; the report carries the pass/fail flags.
    /// Out-of-range parameters (for which ψ is meaningless) still error.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_shape()?;
        Ok(report(&self.as_model_unchecked()))
    }
}

impl TryFrom<ModelConfig> for LevyModel {
    type Error = Error;

    fn try_from(cfg: ModelConfig) -> Result<Self> {
        cfg.build()
    }
}

impl From<LevyModel> for ModelConfig {
    fn from(m: LevyModel) -> Self {
        ModelConfig {
            family: m.family,
            sigma: m.sigma,
            c: m.c,
            mu: m.mu,
            eta: m.eta,
        }
    }
}

/// Outcome of checking a model against the standing assumptions.
///
/// * `drift_to_minus_infinity` — `ψ'(0) < 0`, equivalently `Φ > 0`;
/// * `finite_negative_exponent` — ψ is finite on an open interval below 0
///   (all three families: `(−η, ∞)`, or all of ℝ without jumps);
/// * `atomless_jumps` — the jump law has no atoms (exponential, or no
///   jumps at all).
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub family: Family,
    /// Largest nonnegative root of ψ; zero exactly when the drift
    /// condition fails.
    pub phi0: f64,
    /// `ψ'(0) = E[X₁]`.
    pub mean_x1: f64,
    /// `ψ''(0) = Var(X₁)`.
    pub var_x1: f64,
    pub variation: Variation,
    /// Lower endpoint of the domain of ψ.
    pub psi_domain_lower: f64,
    pub drift_to_minus_infinity: bool,
    pub finite_negative_exponent: bool,
    pub atomless_jumps: bool,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.drift_to_minus_infinity && self.finite_negative_exponent && self.atomless_jumps
    }
}

fn report(m: &LevyModel) -> ValidationReport {
    let mean_x1 = m.psi_deriv_raw(0.0, 1);
    ValidationReport {
        family: m.family,
        phi0: if mean_x1 < 0.0 { m.phi0() } else { 0.0 },
        mean_x1,
        var_x1: m.psi_deriv_raw(0.0, 2),
        variation: m.variation(),
        psi_domain_lower: m.domain_lower(),
        drift_to_minus_infinity: mean_x1 < 0.0,
        finite_negative_exponent: true,
        atomless_jumps: true,
    }
}
