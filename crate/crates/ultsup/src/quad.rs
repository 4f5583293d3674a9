//! Adaptive Simpson quadrature for the general-penalty transform.

use alloc::format;

use crate::error::{Error, Result};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute accuracy `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numerics(format!(
            "adaptive quadrature did not converge on [{a}, {b}]"
        )));
    }
    let half_tol = 0.5 * tol;
    Ok(recurse(f, a, fa, m, fm, lm, flm, left, half_tol, depth + 1)?
        + recurse(f, m, fm, b, fb, rm, frm, right, half_tol, depth + 1)?)
}

/// `∫_0^1 f(u) du` where `f` may blow up (integrably) as `u → 0+`.
///
/// The unit interval is split into dyadic pieces `[2^-(k+1), 2^-k]`, each
/// integrated adaptively; the sum is truncated once a piece falls below the
/// tolerance. Pieces that fail to decay signal a divergent integrand.
pub(crate) fn unit_interval_with_left_singularity<F: Fn(f64) -> f64>(
    f: F,
    tol: f64,
) -> Result<f64> {
    let mut total = 0.0;
    let mut hi = 1.0;
    let mut last_pieces = [f64::INFINITY; 3];
    for k in 0..64u32 {
        let lo = hi * 0.5;
        let piece = adaptive_simpson(&f, lo, hi, tol * 0.25)?;
        total += piece;
        last_pieces[(k % 3) as usize] = piece.abs();
        if piece.abs() < tol * 0.5 {
            return Ok(total);
        }
        hi = lo;
    }
    // 64 halvings put the boundary at ~5e-20; a polynomially growing
    // integrand has long converged by now.
    if last_pieces.iter().all(|p| p.abs() < tol) {
        Ok(total)
    } else {
        Err(Error::Numerics(format!(
            "tail integral did not converge (last dyadic piece {:.3e})",
            last_pieces[2]
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory() {
        let v = adaptive_simpson(|x| (10.0 * x).sin(), 0.0, 1.0, 1e-12).unwrap();
        let exact = (1.0 - (10.0f64).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn log_singularity() {
        // ∫_0^1 ln(1/u) du = 1
        let v = unit_interval_with_left_singularity(|u| -u.ln(), 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn log_squared_singularity() {
        // ∫_0^1 ln(u)^2 du = 2
        let v = unit_interval_with_left_singularity(|u| u.ln() * u.ln(), 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn divergent_integrand_is_error() {
        assert!(unit_interval_with_left_singularity(|u| 1.0 / u, 1e-10).is_err());
    }
}
