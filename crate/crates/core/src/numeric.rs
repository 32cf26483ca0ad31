//! Bracketing root finders shared by the KKT, regime and solver modules.

use crate::error::{Result, SwiptError};

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    /// End of the final bracket on the non-negative side of the residual.
    pub x_nonneg: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]` for an increasing or decreasing residual.
///
/// Stops when the bracket no longer shrinks in floating point, when its
/// width drops to `xtol`, or after `max_iter` halvings.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    bracketed(&mut f, lo, hi, max_iter, |a, b| 0.5 * (a + b), |a, b| b - a <= xtol)
}

/// Bisection in the logarithm of `x` on `[lo, hi]`, `0 < lo < hi`, until
/// `hi/lo − 1 ≤ rtol`.
///
/// Suited to roots that may sit many decades below the bracket width, such
/// as multiplier gaps close to their pole.
pub fn bisect_geometric<F>(mut f: F, lo: f64, hi: f64, rtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if !(lo > 0.0) {
        return Err(SwiptError::Domain(format!("geometric bisection needs lo > 0, got {lo}")));
    }
    bracketed(&mut f, lo, hi, max_iter, |a, b| (a * b).sqrt(), |a, b| b - a <= rtol * b)
}

fn bracketed<F, M, D>(f: &mut F, lo: f64, hi: f64, max_iter: usize, mid: M, done: D) -> Result<Root>
where
    F: FnMut(f64) -> f64,
    M: Fn(f64, f64) -> f64,
    D: Fn(f64, f64) -> bool,
{
    if !(lo < hi) {
        return Err(SwiptError::Domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(SwiptError::NumericalBracket(format!("residual is NaN on [{lo}, {hi}]")));
    }
    if fa == 0.0 {
        return Ok(Root { x: a, x_nonneg: a, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, x_nonneg: b, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(SwiptError::NumericalBracket(format!(
            "f({lo:e}) = {fa:e} and f({hi:e}) = {fb:e} share a sign"
        )));
    }
    let increasing = fb > 0.0;
    let mut iterations = 0;
    while iterations < max_iter {
        let m = mid(a, b);
        if !(m > a && m < b) || done(a, b) {
            break;
        }
        iterations += 1;
        let fm = f(m);
        if fm.is_nan() {
            return Err(SwiptError::NumericalBracket(format!("residual is NaN at {m:e}")));
        }
        if fm == 0.0 {
            return Ok(Root { x: m, x_nonneg: m, iterations });
        }
        if (fm > 0.0) == increasing {
            b = m;
        } else {
            a = m;
        }
    }
    let x_nonneg = if increasing { b } else { a };
    Ok(Root { x: mid(a, b), x_nonneg, iterations })
}
