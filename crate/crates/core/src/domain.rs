//! Open real intervals and the finite windows used to sample them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// An open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[ExtReal; 2]", into = "[ExtReal; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[ExtReal; 2]> for Interval {
    fn from(b: [ExtReal; 2]) -> Self {
        Interval { lo: b[0].0, hi: b[1].0 }
    }
}

impl From<Interval> for [ExtReal; 2] {
    fn from(i: Interval) -> Self {
        [ExtReal(i.lo), ExtReal(i.hi)]
    }
}

/// Where unbounded intervals are truncated for sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowOptions {
    /// `(0, inf)` is sampled on `[1/span, span]`, `(a, inf)` with `a > 0` on `[a, a * span^2]`.
    pub positive_span: f64,
    /// Half-width used for ends that are unbounded on a signed axis.
    pub real_half_width: f64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions {
            positive_span: 1e3,
            real_half_width: 20.0,
        }
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::input(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub const fn positive() -> Self {
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub const fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn check(&self, x: f64, what: &str) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::input(format!(
                "{what} = {x} outside the open interval ({}, {})",
                self.lo, self.hi
            )))
        }
    }

    /// Finite closed window `[a, b]` used for sampling, plus whether the
    /// window ends are interior points of the interval.
    pub fn window(&self, opts: &WindowOptions) -> (f64, f64, bool) {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi, false),
            (true, false) if self.lo == 0.0 => (1.0 / opts.positive_span, opts.positive_span, true),
            (true, false) if self.lo > 0.0 => {
                (self.lo * (1.0 + 1e-6), self.lo * opts.positive_span.powi(2), true)
            }
            (true, false) => (self.lo + 1e-6, self.lo + 2.0 * opts.real_half_width, true),
            (false, true) => (self.hi - 2.0 * opts.real_half_width, self.hi - 1e-6, true),
            (false, false) => (-opts.real_half_width, opts.real_half_width, true),
        }
    }

    /// `n` increasing points inside the interval.
    ///
    /// Bounded intervals get interior midpoints of a uniform partition; with
    /// `closure` set the endpoints themselves are used instead (suprema over
    /// an open interval are attained there by continuity). Unbounded
    /// intervals are sampled on their window, geometrically when the window
    /// is positive and spans more than two decades.
    pub fn grid(&self, n: usize, closure: bool, opts: &WindowOptions) -> Vec<f64> {
        let (a, b, inner) = self.window(opts);
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![if a > 0.0 && b / a > 100.0 { (a * b).sqrt() } else { 0.5 * (a + b) }];
        }
        let geometric = a > 0.0 && b / a > 100.0;
        let include_ends = inner || closure;
        (0..n)
            .map(|k| {
                let s = if include_ends {
                    k as f64 / (n - 1) as f64
                } else {
                    (k as f64 + 0.5) / n as f64
                };
                if geometric {
                    (a.ln() + s * (b.ln() - a.ln())).exp()
                } else {
                    a + s * (b - a)
                }
            })
            .collect()
    }

    /// Maps `s` in `[0, 1]` into the sampling window (geometric for wide
    /// positive windows).
    pub fn map_unit(&self, s: f64, opts: &WindowOptions) -> f64 {
        let (a, b, _) = self.window(opts);
        if a > 0.0 && b / a > 100.0 {
            (a.ln() + s * (b.ln() - a.ln())).exp()
        } else {
            a + s * (b - a)
        }
    }
}
