//! Bracketed scalar root finding for monotone residuals.
//!
//! Illinois-modified regula falsi with a bisection fallback whenever the
//! bracket fails to halve over two consecutive steps.

pub(crate) const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveFailure {
    pub iterations: usize,
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Finds `x` in `[lo, hi]` with `f(x) = 0` for an increasing `f` with
/// `f(lo) <= 0 <= f(hi)`.
///
/// Stops when `|f(x)| <= ftol`, when the bracket is narrower than `xtol`, or
/// when the bracket can no longer be split in floating point.
pub(crate) fn solve_increasing<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    ftol: f64,
    xtol: f64,
) -> Result<f64, SolveFailure> {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo.abs() <= ftol {
        return Ok(lo);
    }
    if f_hi.abs() <= ftol {
        return Ok(hi);
    }
    let failure = |it, lo, hi, f_lo, f_hi| SolveFailure { iterations: it, lo, hi, f_lo, f_hi };
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(failure(0, lo, hi, f_lo, f_hi));
    }
    // Illinois weights on each end; `side` remembers which end moved last.
    let (mut w_lo, mut w_hi) = (1.0, 1.0);
    let mut side = 0i8;
    let mut slow_steps = 0;
    for it in 1..=MAX_ITERATIONS {
        let width = hi - lo;
        let mid = lo + 0.5 * width;
        if mid <= lo || mid >= hi || width <= xtol {
            return Ok(if f_lo.abs() < f_hi.abs() { lo } else { hi });
        }
        let x = if slow_steps >= 2 {
            slow_steps = 0;
            mid
        } else {
            let (a, b) = (w_lo * f_lo, w_hi * f_hi);
            let s = lo - a * width / (b - a);
            if s > lo && s < hi && s.is_finite() {
                s
            } else {
                mid
            }
        };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(failure(it, lo, hi, f_lo, f_hi));
        }
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            w_lo = 1.0;
            if side == -1 {
                w_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            w_hi = 1.0;
            if side == 1 {
                w_lo *= 0.5;
            }
            side = 1;
        }
        if hi - lo > 0.5 * width {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
    }
    Err(failure(MAX_ITERATIONS, lo, hi, f_lo, f_hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let x = solve_increasing(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 1e-15).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn handles_very_flat_and_steep_functions() {
        let x = solve_increasing(|x| x.powi(21) - 1e-10, 0.0, 1.0, 1e-24, 1e-16).unwrap();
        assert!((x.powi(21) - 1e-10).abs() < 1e-22);
        let y = solve_increasing(|x| (x - 0.3).exp() - 1.0, -50.0, 50.0, 1e-15, 1e-15).unwrap();
        assert!((y - 0.3).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_brackets() {
        assert!(solve_increasing(|x| x + 1.0, 0.0, 1.0, 1e-12, 1e-12).is_err());
    }
}
