//! Monte Carlo simulation of the reflected (drawdown) process.
//!
//! Paths serve to cross-validate the closed forms: stopping the drawdown
//! `Y^y_t = (y ∨ X̄_t) − X_t` at a barrier `a` and averaging `H(Y_τ)` must
//! reproduce `f_a(y)`, and the raw squared prediction error
//! `(X̄_∞ − X_τ − b)²` must reproduce the same value — the two estimators
//! only agree because conditioning on the drawdown loses nothing.
//!
//! Simulation is exact for the compound Poisson family (event-driven,
//! piecewise-linear paths, closed-form crossings) and an Euler skeleton
//! for the families with a diffusion part (crossing detected at grid
//! times; the discretization bias is one-sided, shrinking with the step).
//!
//! Determinism: each path draws from its own ChaCha stream keyed by
//! `(seed, path_index)`, and estimates aggregate by pairwise summation
//! over the path-ordered sample vector, so results are bit-identical
//! across runs and thread counts. The [`PathRunner`] trait is the seam a
//! parallel driver plugs into.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Family, LevyModel};
use crate::solver::quad_h;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Truncation rule: once the drawdown exceeds `L`, the probability that
/// the running maximum ever grows again is `e^{−ΦL}`.
const TRUNCATION_BIAS_CAP: f64 = 1e-6;

/// Simulation parameters.
///
/// `stop_level` is the supremum-truncation level `L`; when unset it
/// defaults to `max(20.5/Φ, a + 10)`, putting the truncation bias bound
/// `e^{−ΦL}` below `2e−9`. Whatever the source, `e^{−ΦL} ≤ 1e−6` is
/// enforced at run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_paths: u64,
    pub seed: u64,
    /// Euler step for the diffusion families; ignored by the exact
    /// compound Poisson simulator.
    pub time_step: f64,
    /// Supremum truncation level `L`; `None` picks the default above.
    pub stop_level: Option<f64>,
    /// Per-path safety cap on events (jumps or grid steps).
    pub max_events: u64,
}

impl SimConfig {
    pub fn new(n_paths: u64, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            time_step: 1e-3,
            stop_level: None,
            max_events: 50_000_000,
        }
    }

    pub fn with_time_step(mut self, dt: f64) -> Self {
        self.time_step = dt;
        self
    }

    pub fn with_stop_level(mut self, level: f64) -> Self {
        self.stop_level = Some(level);
        self
    }

    pub fn with_max_events(mut self, cap: u64) -> Self {
        self.max_events = cap;
        self
    }

    fn check(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be positive".into()));
        }
        if !(self.time_step > 0.0 && self.time_step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time_step must be positive, got {}",
                self.time_step
            )));
        }
        Ok(())
    }

    /// Resolve `L` and enforce the truncation-bias invariant.
    fn resolve_stop_level(&self, phi: f64, barrier: f64) -> Result<f64> {
        let level = self
            .stop_level
            .unwrap_or_else(|| (20.5 / phi).max(barrier + 10.0));
        if !(level > 0.0 && level.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "stop level must be positive, got {level}"
            )));
        }
        let bias = (-phi * level).exp();
        if bias > TRUNCATION_BIAS_CAP {
            return Err(Error::InvalidParameter(format!(
                "stop level {level} leaves truncation bias {bias:.3e} above {TRUNCATION_BIAS_CAP:.0e}"
            )));
        }
        Ok(level)
    }
}

/// A Monte Carlo point estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Upper bound on the truncation bias of the estimand (zero when no
    /// truncation is involved).
    pub truncation_bias_bound: f64,
}

impl SimEstimate {
    /// Aggregate per-path samples. Pairwise summation in path order keeps
    /// the result independent of how the paths were scheduled.
    pub fn from_samples(samples: &[f64], seed: u64, truncation_bias_bound: f64) -> Self {
        let n = samples.len();
        let mean = pairwise_sum_by(samples, |x| x) / n as f64;
        let std_error = if n > 1 {
            let ss = pairwise_sum_by(samples, |x| {
                let d = x - mean;
                d * d
            });
            (ss / ((n - 1) as f64 * n as f64)).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n_paths: n as u64,
            seed,
            truncation_bias_bound,
        }
    }
}

/// Empirical sample of the all-time supremum, with its summary estimate.
#[derive(Debug, Clone)]
pub struct SupremumSample {
    pub samples: Vec<f64>,
    pub estimate: SimEstimate,
}

/// Maps path indices to per-path samples. Implementations must preserve
/// index order in the returned vector; whether paths run serially or in
/// parallel is their business.
pub trait PathRunner {
    fn map_paths(
        &self,
        n_paths: u64,
        sample: &(dyn Fn(u64) -> Result<f64> + Sync),
    ) -> Result<Vec<f64>>;
}

/// Runs paths one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialRunner;

impl PathRunner for SerialRunner {
    fn map_paths(
        &self,
        n_paths: u64,
        sample: &(dyn Fn(u64) -> Result<f64> + Sync),
    ) -> Result<Vec<f64>> {
        (0..n_paths).map(sample).collect()
    }
}

/// The RNG stream of one path: ChaCha keyed by the run seed, nonce set to
/// the path index. Streams are independent, and a path's draws do not
/// depend on how many other paths run or where.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

fn pairwise_sum_by<F: Fn(f64) -> f64 + Copy>(xs: &[f64], f: F) -> f64 {
    if xs.len() <= 64 {
        xs.iter().map(|&x| f(x)).sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum_by(&xs[..mid], f) + pairwise_sum_by(&xs[mid..], f)
    }
}

// ---------------------------------------------------------------------------
// Path kernels
// ---------------------------------------------------------------------------

/// One evolving path of `X` with its running maximum, exposing the
/// drawdown `(y ∨ X̄) − X`. Advancing is driven by drawdown levels, so the
/// barrier crossing and the later supremum truncation reuse the same
/// state.
struct PathState {
    kernel: Kernel,
    y0: f64,
    x: f64,
    xbar: f64,
    events: u64,
}

enum Kernel {
    /// Event-driven compound Poisson with drift: exact. Between jumps the
    /// drawdown falls at rate `c` (flooring at zero as the maximum grows);
    /// jumps lift it by Exp(η) amounts, so every crossing is a jump with
    /// memoryless overshoot.
    Exact { c: f64, jump_rate: Exp<f64>, jump_size: Exp<f64> },
    /// Euler skeleton of step `dt` for the diffusion families; crossings
    /// are detected at grid times.
    Euler {
        drift: f64,
        sig_sqrt_dt: f64,
        jumps: Option<(Poisson<f64>, Exp<f64>)>,
    },
}

impl PathState {
    fn new(model: &LevyModel, y0: f64, dt: f64) -> Self {
        let kernel = match model.family() {
            Family::CramerLundbergExp => Kernel::Exact {
                c: model.c(),
                jump_rate: Exp::new(model.mu()).expect("mu > 0"),
                jump_size: Exp::new(model.eta()).expect("eta > 0"),
            },
            Family::BrownianDrift => Kernel::Euler {
                drift: model.c() * dt,
                sig_sqrt_dt: model.sigma() * dt.sqrt(),
                jumps: None,
            },
            Family::JumpDiffusionExp => Kernel::Euler {
                drift: model.c() * dt,
                sig_sqrt_dt: model.sigma() * dt.sqrt(),
                jumps: Some((
                    Poisson::new(model.mu() * dt).expect("mu dt > 0"),
                    Exp::new(model.eta()).expect("eta > 0"),
                )),
            },
        };
        Self {
            kernel,
            y0,
            x: 0.0,
            xbar: 0.0,
            events: 0,
        }
    }

    fn drawdown(&self) -> f64 {
        self.y0.max(self.xbar) - self.x
    }

    /// Run until the drawdown first reaches `level`; returns the drawdown
    /// there (including any overshoot).
    fn advance_until_drawdown<R: Rng>(
        &mut self,
        level: f64,
        max_events: u64,
        rng: &mut R,
    ) -> Result<f64> {
        let mut d = self.drawdown();
        if d >= level {
            return Ok(d);
        }
        loop {
            self.events += 1;
            if self.events > max_events {
                return Err(Error::SimulationBudget { max_events });
            }
            match &self.kernel {
                Kernel::Exact {
                    c,
                    jump_rate,
                    jump_size,
                } => {
                    let dt: f64 = jump_rate.sample(rng);
                    self.x += c * dt;
                    if self.x > self.xbar {
                        self.xbar = self.x;
                    }
                    self.x -= jump_size.sample(rng);
                }
                Kernel::Euler {
                    drift,
                    sig_sqrt_dt,
                    jumps,
                } => {
                    let z: f64 = StandardNormal.sample(rng);
                    let mut dx = drift + sig_sqrt_dt * z;
                    if let Some((poisson, jump_size)) = jumps {
                        let n = poisson.sample(rng) as u64;
                        for _ in 0..n {
                            dx -= jump_size.sample(rng);
                        }
                    }
                    self.x += dx;
                    if self.x > self.xbar {
                        self.xbar = self.x;
                    }
                }
            }
            d = self.drawdown();
            if d >= level {
                return Ok(d);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// Estimate `E[H(Y^y_{τ_a})]`: the expected squared-error payoff of the
/// barrier rule at `a`, started from drawdown `y`, for the quadratic
/// penalty with offset `b`. The closed-form counterpart is
/// [`Solver::f_a`](crate::solver::Solver::f_a).
///
/// For `y ≥ a` the rule stops at once and the estimate is `H(y)` exactly
/// with zero standard error.
pub fn simulate_reflected_stop(
    model: &LevyModel,
    b: f64,
    y: f64,
    a: f64,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    simulate_reflected_stop_with(&SerialRunner, model, b, y, a, cfg)
}

pub fn simulate_reflected_stop_with(
    runner: &dyn PathRunner,
    model: &LevyModel,
    b: f64,
    y: f64,
    a: f64,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    cfg.check()?;
    check_barrier_args(b, y, a)?;
    let phi = model.phi0();
    if y >= a {
        return Ok(SimEstimate {
            mean: quad_h(phi, b, y),
            std_error: 0.0,
            n_paths: cfg.n_paths,
            seed: cfg.seed,
            truncation_bias_bound: 0.0,
        });
    }
    let samples = runner.map_paths(cfg.n_paths, &|i| {
        let mut rng = path_rng(cfg.seed, i);
        let mut path = PathState::new(model, y, cfg.time_step);
        let stopped = path.advance_until_drawdown(a, cfg.max_events, &mut rng)?;
        Ok(quad_h(phi, b, stopped))
    })?;
    Ok(SimEstimate::from_samples(&samples, cfg.seed, 0.0))
}

/// Draw approximate samples of the all-time supremum `X̄_∞`.
///
/// Each path runs until its drawdown exceeds the truncation level `L` and
/// reports the running maximum at that moment; the probability that the
/// true supremum still exceeds it is at most `e^{−ΦL}`, reported as the
/// bias bound. The exact law is Exp(Φ).
pub fn simulate_ultimate_supremum(model: &LevyModel, cfg: &SimConfig) -> Result<SupremumSample> {
    simulate_ultimate_supremum_with(&SerialRunner, model, cfg)
}

pub fn simulate_ultimate_supremum_with(
    runner: &dyn PathRunner,
    model: &LevyModel,
    cfg: &SimConfig,
) -> Result<SupremumSample> {
    cfg.check()?;
    let phi = model.phi0();
    let level = cfg.resolve_stop_level(phi, 0.0)?;
    let samples = runner.map_paths(cfg.n_paths, &|i| {
        let mut rng = path_rng(cfg.seed, i);
        let mut path = PathState::new(model, 0.0, cfg.time_step);
        path.advance_until_drawdown(level, cfg.max_events, &mut rng)?;
        Ok(path.xbar)
    })?;
    let estimate = SimEstimate::from_samples(&samples, cfg.seed, (-phi * level).exp());
    Ok(SupremumSample { samples, estimate })
}

/// Estimate the raw objective `E[(X̄_∞ − X_{τ_a} − b)²]` of the barrier
/// rule started at zero drawdown, using one path for both the stopping
/// position and the (truncated) supremum.
///
/// `a = 0` means stopping at once (`X_τ = 0`), which estimates
/// `E[(X̄_∞ − b)²] = H(0)`. Must agree with [`simulate_reflected_stop`]
/// within statistical error — the two average different functionals of the
/// same stopped paths.
pub fn simulate_prediction_error(
    model: &LevyModel,
    b: f64,
    a: f64,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    simulate_prediction_error_with(&SerialRunner, model, b, a, cfg)
}

pub fn simulate_prediction_error_with(
    runner: &dyn PathRunner,
    model: &LevyModel,
    b: f64,
    a: f64,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    cfg.check()?;
    check_barrier_args(b, 0.0, a)?;
    let phi = model.phi0();
    let level = cfg.resolve_stop_level(phi, a)?;
    let samples = runner.map_paths(cfg.n_paths, &|i| {
        let mut rng = path_rng(cfg.seed, i);
        let mut path = PathState::new(model, 0.0, cfg.time_step);
        if a > 0.0 {
            path.advance_until_drawdown(a, cfg.max_events, &mut rng)?;
        }
        let x_at_stop = path.x;
        path.advance_until_drawdown(level, cfg.max_events, &mut rng)?;
        let err = path.xbar - x_at_stop - b;
        Ok(err * err)
    })?;
    Ok(SimEstimate::from_samples(
        &samples,
        cfg.seed,
        (-phi * level).exp(),
    ))
}

fn check_barrier_args(b: f64, y: f64, a: f64) -> Result<()> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("b must be positive, got {b}")));
    }
    if !(y >= 0.0 && y.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "starting drawdown must be nonnegative, got {y}"
        )));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "barrier must be nonnegative, got {a}"
        )));
    }
    Ok(())
}
