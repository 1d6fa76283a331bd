//! Bracketed scalar root finding.
//!
//! Two solvers live here: a regula-falsi iteration with the Illinois
//! modification and a bisection safeguard (used for the implicit mean
//! equation), and plain bisection for inverting monotone functions.

use crate::error::{Error, Result};

/// Stopping rules for the bracketed solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Absolute tolerance on the argument. Zero means "to working precision".
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            xtol: 1e-13,
            max_iter: 400,
        }
    }
}

impl RootOptions {
    pub fn full_precision() -> Self {
        RootOptions {
            xtol: 0.0,
            ..Self::default()
        }
    }

    fn converged(&self, a: f64, b: f64) -> bool {
        let scale = a.abs().max(b.abs());
        (b - a).abs() <= self.xtol + 4.0 * f64::EPSILON * scale
    }
}

fn finite(x: f64, y: f64) -> Result<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::numeric(format!("non-finite residual {y} at {x}")))
    }
}

/// Finds a zero of `f` in `[a, b]` given a sign change at the endpoints.
///
/// Regula falsi with the Illinois weight halving; a bisection step is forced
/// whenever two consecutive steps fail to halve the bracket.
pub fn solve_bracketed<F>(mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut fa = finite(a, f(a)?)?;
    if fa == 0.0 {
        return Ok(a);
    }
    let mut fb = finite(b, f(b)?)?;
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numeric(format!(
            "root not bracketed: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }

    // -1: last update moved `b`, +1: last update moved `a`.
    let mut last_side = 0i8;
    // Illinois halving distorts fa/fb; keep the true endpoint residuals.
    let (mut ra, mut rb) = (fa.abs(), fb.abs());
    let best = |a: f64, b: f64, ra: f64, rb: f64| if ra <= rb { a } else { b };
    let mut checkpoint = b - a;
    let mut steps_since_check = 0;
    let mut force_bisect = false;

    for _ in 0..opts.max_iter {
        if opts.converged(a, b) {
            return Ok(best(a, b, ra, rb));
        }
        let mut x = if force_bisect {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
            if !(x > a && x < b) {
                // adjacent floats
                return Ok(best(a, b, ra, rb));
            }
        }
        force_bisect = false;
        let fx = finite(x, f(x)?)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            rb = fx.abs();
            if last_side == -1 {
                fa *= 0.5;
            }
            last_side = -1;
        } else {
            a = x;
            fa = fx;
            ra = fx.abs();
            if last_side == 1 {
                fb *= 0.5;
            }
            last_side = 1;
        }

        steps_since_check += 1;
        if steps_since_check == 2 {
            if b - a > 0.5 * checkpoint {
                force_bisect = true;
            }
            checkpoint = b - a;
            steps_since_check = 0;
        }
    }
    if opts.converged(a, b) {
        Ok(best(a, b, ra, rb))
    } else {
        Err(Error::numeric(format!(
            "no convergence after {} iterations, bracket [{a}, {b}]",
            opts.max_iter
        )))
    }
}

/// Solves `phi(y) = target` for a monotone `phi` on `[a, b]` by bisection.
///
/// Targets outside the range spanned by the endpoint values are clamped to
/// the corresponding endpoint once they are within `slack` of it; farther
/// targets are an error.
pub fn invert_monotone<F>(phi: F, target: f64, a: f64, b: f64, opts: RootOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let (plo, phi_hi) = (phi(lo), phi(hi));
    if !plo.is_finite() || !phi_hi.is_finite() || !target.is_finite() {
        return Err(Error::numeric(format!(
            "cannot invert: phi({lo}) = {plo}, phi({hi}) = {phi_hi}, target {target}"
        )));
    }
    if lo == hi {
        return Ok(lo);
    }
    let increasing = phi_hi >= plo;
    let (min_v, max_v) = if increasing { (plo, phi_hi) } else { (phi_hi, plo) };
    let slack = 1e-9 * (1.0 + min_v.abs().max(max_v.abs()));
    if target <= min_v {
        if target < min_v - slack {
            return Err(Error::numeric(format!(
                "target {target} below monotone range [{min_v}, {max_v}]"
            )));
        }
        return Ok(if increasing { lo } else { hi });
    }
    if target >= max_v {
        if target > max_v + slack {
            return Err(Error::numeric(format!(
                "target {target} above monotone range [{min_v}, {max_v}]"
            )));
        }
        return Ok(if increasing { hi } else { lo });
    }
    for _ in 0..opts.max_iter {
        if opts.converged(lo, hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let v = phi(mid);
        if !v.is_finite() {
            return Err(Error::numeric(format!("phi({mid}) = {v} during inversion")));
        }
        if (v < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_root() {
        let r = solve_bracketed(|x| Ok(x * x - 2.0), 0.0, 3.0, RootOptions::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn stiff_function_still_converges() {
        // regula falsi alone stalls on this one
        let r = solve_bracketed(|x| Ok(x.powi(11) - 1e-3), 0.0, 4.0, RootOptions::full_precision())
            .unwrap();
        assert!((r - 1e-3f64.powf(1.0 / 11.0)).abs() < 1e-14);
    }

    #[test]
    fn unbracketed_is_error() {
        let e = solve_bracketed(|x| Ok(x * x + 1.0), -1.0, 1.0, RootOptions::default());
        assert!(matches!(e, Err(Error::Numeric(_))));
    }

    #[test]
    fn endpoint_root() {
        let r = solve_bracketed(|x| Ok(x - 1.0), 1.0, 2.0, RootOptions::default()).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn inversion_of_decreasing_map() {
        let y = invert_monotone(|x| 1.0 / x, 0.25, 1.0, 10.0, RootOptions::default()).unwrap();
        assert!((y - 4.0).abs() < 1e-12);
        let clamp = invert_monotone(|x| x, 1.0 + 1e-12, 0.0, 1.0, RootOptions::default()).unwrap();
        assert_eq!(clamp, 1.0);
        assert!(invert_monotone(|x| x, 5.0, 0.0, 1.0, RootOptions::default()).is_err());
    }
}
