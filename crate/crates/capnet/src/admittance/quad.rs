//! Adaptive quadrature of Laplace-type integrals ∫ e^{−f(s)/ε} ds for
//! convex f with a proper minimum at 0.
//!
//! The integrand is a spike of width ~√ε around the origin with value 1
//! at its peak, so the integral itself never under- or overflows; all
//! exponential prefactors are applied by the callers in log space. The
//! domain is truncated where f clears `f_trunc = ε·(ln(1/tol) + 46)`;
//! convexity makes the discarded tails geometric and smaller than
//! tol·integral by a wide margin.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("profile is not proper: failed to clear the truncation level within |s| ≤ {0:e}")]
    TruncationNotFound(f64),
    #[error("adaptive rule failed to converge to the requested tolerance")]
    NoConvergence,
    #[error("profile minimum at 0 must be 0, got {0}")]
    BadMinimum(f64),
}

/// Default relative tolerance for all quadratures.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Hard cap on the truncation search; profiles flatter than this are
/// treated as non-proper.
const DOMAIN_BOUND: f64 = 1e8;

/// Maximum recursion depth of the adaptive Simpson refinement.
const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || (b - a) < 1e-300 {
        return left + right + err / 15.0;
    }
    if depth == 0 {
        *ok = false;
        return left + right;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok)
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute
/// tolerance `tol_abs`.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol_abs: f64,
) -> Result<f64, QuadError> {
    if a >= b {
        return Ok(0.0);
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let mut ok = true;
    let out = adapt(f, a, b, fa, fm, fb, whole, tol_abs, MAX_DEPTH, &mut ok);
    if !ok {
        return Err(QuadError::NoConvergence);
    }
    Ok(out)
}

/// Finds `b > 0` with `profile(dir·b) ≥ target`, growing geometrically
/// from `seed`.
fn truncation_point(
    profile: &dyn Fn(f64) -> f64,
    dir: f64,
    seed: f64,
    target: f64,
) -> Result<f64, QuadError> {
    let mut b = seed;
    while profile(dir * b) < target {
        b *= 2.0;
        if b > DOMAIN_BOUND {
            return Err(QuadError::TruncationNotFound(DOMAIN_BOUND));
        }
    }
    Ok(b)
}

/// ∫_ℝ e^{−f(s)/ε} ds for convex `f ≥ 0` with `f(0) = 0`.
pub fn laplace_integral_1d(
    f: &dyn Fn(f64) -> f64,
    eps: f64,
    tol: f64,
) -> Result<f64, QuadError> {
    laplace_integral_1d_capped(f, eps, tol, f64::INFINITY)
}

/// Same as [`laplace_integral_1d`] but restricted to the sublevel set
/// `{f < cap}` (used to check that the tail outside `{g < δ}` is
/// negligible, which licenses the truncation in the first place).
pub fn laplace_integral_1d_capped(
    f: &dyn Fn(f64) -> f64,
    eps: f64,
    tol: f64,
    cap: f64,
) -> Result<f64, QuadError> {
    let f0 = f(0.0);
    if f0.abs() > 1e-12 {
        return Err(QuadError::BadMinimum(f0));
    }
    // e^{-46} ≈ 1e-20 of safety under the requested tolerance
    let f_trunc = (eps * ((1.0 / tol).ln() + 46.0)).min(cap);
    let seed = eps.sqrt().max(1e-6);
    let mut total = 0.0;
    for dir in [1.0, -1.0] {
        let b = truncation_point(f, dir, seed, f_trunc)?;
        let b = refine_cap(f, dir, b, f_trunc);
        // geometric panels resolve the spike near 0 before the adaptive
        // rule takes over
        let mut knots = vec![0.0];
        let mut t = (b / 1024.0).min(seed / 4.0);
        while t < b {
            knots.push(t);
            t *= 2.0;
        }
        knots.push(b);
        let g = move |s: f64| (-f(dir * s) / eps).exp();
        // a crude first pass fixes the absolute error budget
        let rough: f64 = knots
            .windows(2)
            .map(|w| simpson(g(w[0]), g(0.5 * (w[0] + w[1])), g(w[1]), w[1] - w[0]))
            .sum();
        let budget = tol * rough.abs().max(eps.sqrt() * 1e-3);
        for w in knots.windows(2) {
            let frac = (w[1] - w[0]) / b;
            total += adaptive_simpson(&g, w[0], w[1], budget * frac.max(1e-3))?;
        }
    }
    Ok(total)
}

/// Bisects the last doubling step so the domain ends close to where the
/// profile crosses `f_trunc` (important when a hard `cap` is in force).
fn refine_cap(f: &dyn Fn(f64) -> f64, dir: f64, b: f64, f_trunc: f64) -> f64 {
    let mut lo = b / 2.0;
    let mut hi = b;
    if f(dir * lo) >= f_trunc {
        return lo;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(dir * mid) >= f_trunc {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
