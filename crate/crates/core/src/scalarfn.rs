//! Scalar functions, Chebyshev pairs and the Gini building blocks.
//!
//! A [`ScalarFunction`] is a real function on an open interval that may carry
//! its first and second derivatives. Two of them form a [`ChebyshevPair`]
//! when the determinant
//!
//! ```text
//! D(x, y) = f(x) g(y) - f(y) g(x)
//! ```
//!
//! never vanishes for `x != y`. The Chebyshev property is checked on a finite
//! grid only; it cannot be decided for black-box functions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Interval, WindowOptions};
use crate::error::{Error, Result};

pub type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function on an open interval with optional derivatives.
#[derive(Clone)]
pub struct ScalarFunction {
    domain: Interval,
    value: RealMap,
    deriv1: Option<RealMap>,
    deriv2: Option<RealMap>,
    label: String,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("deriv1", &self.deriv1.is_some())
            .field("deriv2", &self.deriv2.is_some())
            .finish()
    }
}

fn arc<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> RealMap {
    Arc::new(f)
}

impl ScalarFunction {
    pub fn new<F>(domain: Interval, label: impl Into<String>, value: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarFunction {
            domain,
            value: arc(value),
            deriv1: None,
            deriv2: None,
            label: label.into(),
        }
    }

    pub fn with_deriv1<F>(mut self, d1: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv1 = Some(arc(d1));
        self
    }

    pub fn with_deriv2<F>(mut self, d2: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv2 = Some(arc(d2));
        self
    }

    /// `x^p` on `(0, inf)`.
    pub fn power(p: f64) -> Self {
        ScalarFunction::new(Interval::positive(), format!("x^{p}"), move |x| x.powf(p))
            .with_deriv1(move |x| if p == 0.0 { 0.0 } else { p * x.powf(p - 1.0) })
            .with_deriv2(move |x| {
                if p == 0.0 || p == 1.0 {
                    0.0
                } else {
                    p * (p - 1.0) * x.powf(p - 2.0)
                }
            })
    }

    /// `x^p ln x` on `(0, inf)`.
    pub fn log_power(p: f64) -> Self {
        ScalarFunction::new(Interval::positive(), format!("x^{p} ln x"), move |x| {
            x.powf(p) * x.ln()
        })
        .with_deriv1(move |x| x.powf(p - 1.0) * (p * x.ln() + 1.0))
        .with_deriv2(move |x| x.powf(p - 2.0) * (p * (p - 1.0) * x.ln() + 2.0 * p - 1.0))
    }

    pub fn log() -> Self {
        ScalarFunction::new(Interval::positive(), "ln x", f64::ln)
            .with_deriv1(|x| 1.0 / x)
            .with_deriv2(|x| -1.0 / (x * x))
    }

    pub fn exp() -> Self {
        ScalarFunction::new(Interval::real_line(), "exp x", f64::exp)
            .with_deriv1(f64::exp)
            .with_deriv2(f64::exp)
    }

    /// `a x + b` on the real line.
    pub fn affine(a: f64, b: f64) -> Self {
        ScalarFunction::new(Interval::real_line(), format!("{a} x + {b}"), move |x| a * x + b)
            .with_deriv1(move |_| a)
            .with_deriv2(|_| 0.0)
    }

    pub fn identity() -> Self {
        Self::affine(1.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        ScalarFunction::new(Interval::real_line(), format!("{c}"), move |_| c)
            .with_deriv1(|_| 0.0)
            .with_deriv2(|_| 0.0)
    }

    pub fn sin() -> Self {
        ScalarFunction::new(Interval::real_line(), "sin x", f64::sin)
            .with_deriv1(f64::cos)
            .with_deriv2(|x| -x.sin())
    }

    pub fn cos() -> Self {
        ScalarFunction::new(Interval::real_line(), "cos x", f64::cos)
            .with_deriv1(|x| -x.sin())
            .with_deriv2(|x| -x.cos())
    }

    /// `a f + b g` on the common domain; derivatives exist when both do.
    pub fn linear_combination(a: f64, f: &ScalarFunction, b: f64, g: &ScalarFunction) -> Result<Self> {
        let domain = f.domain.intersect(&g.domain)?;
        let label = format!("{a}*({}) + {b}*({})", f.label, g.label);
        let (fv, gv) = (f.value.clone(), g.value.clone());
        let mut out = ScalarFunction::new(domain, label, move |x| a * fv(x) + b * gv(x));
        if let (Some(f1), Some(g1)) = (&f.deriv1, &g.deriv1) {
            let (f1, g1) = (f1.clone(), g1.clone());
            out.deriv1 = Some(arc(move |x| a * f1(x) + b * g1(x)));
        }
        if let (Some(f2), Some(g2)) = (&f.deriv2, &g.deriv2) {
            let (f2, g2) = (f2.clone(), g2.clone());
            out.deriv2 = Some(arc(move |x| a * f2(x) + b * g2(x)));
        }
        Ok(out)
    }

    /// `outer ∘ inner`, restricted to points where `inner` lands in the
    /// domain of `outer` (checked lazily: out-of-domain values give NaN).
    pub fn compose(outer: &ScalarFunction, inner: &ScalarFunction) -> Self {
        let (o, i) = (outer.value.clone(), inner.value.clone());
        let odom = outer.domain;
        let label = format!("({})∘({})", outer.label, inner.label);
        let mut out = ScalarFunction::new(inner.domain, label, move |x| {
            let y = i(x);
            if odom.contains(y) {
                o(y)
            } else {
                f64::NAN
            }
        });
        if let (Some(o1), Some(i1)) = (&outer.deriv1, &inner.deriv1) {
            let (o1, i1, i0) = (o1.clone(), i1.clone(), inner.value.clone());
            out.deriv1 = Some(arc(move |x| o1(i0(x)) * i1(x)));
            if let (Some(o2), Some(i2)) = (&outer.deriv2, &inner.deriv2) {
                let (o1, o2, i0, i1, i2) = (
                    outer.deriv1.clone().unwrap(),
                    o2.clone(),
                    inner.value.clone(),
                    inner.deriv1.clone().unwrap(),
                    i2.clone(),
                );
                out.deriv2 = Some(arc(move |x| {
                    let y = i0(x);
                    let di = i1(x);
                    o2(y) * di * di + o1(y) * i2(x)
                }));
            }
        }
        out
    }

    /// The same function on a smaller interval.
    pub fn restricted(&self, domain: Interval) -> Result<Self> {
        let mut out = self.clone();
        out.domain = self.domain.intersect(&domain)?;
        Ok(out)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_deriv1(&self) -> bool {
        self.deriv1.is_some()
    }

    pub fn has_deriv2(&self) -> bool {
        self.deriv2.is_some()
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn deriv1(&self, x: f64) -> Result<f64> {
        self.deriv1
            .as_ref()
            .map(|d| d(x))
            .ok_or_else(|| Error::capability(format!("{} has no first derivative", self.label)))
    }

    pub fn deriv2(&self, x: f64) -> Result<f64> {
        self.deriv2
            .as_ref()
            .map(|d| d(x))
            .ok_or_else(|| Error::capability(format!("{} has no second derivative", self.label)))
    }
}

/// Sign of `D(x, y)` for `x < y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Regularity class: `C0` continuous Chebyshev pair, `Ck` additionally
/// `k`-times differentiable with a nonvanishing Wronskian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regularity {
    C0,
    C1,
    C2,
}

/// Grid used to verify the Chebyshev property of a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationGrid {
    pub points: Vec<f64>,
}

impl VerificationGrid {
    /// 64 increasing interior points of `domain` (or of its sampling window).
    pub fn for_domain(domain: &Interval) -> Self {
        Self::with_size(domain, 64)
    }

    pub fn with_size(domain: &Interval, n: usize) -> Self {
        VerificationGrid {
            points: domain.grid(n, false, &WindowOptions::default()),
        }
    }
}

/// Two functions forming a Chebyshev system on their common domain.
#[derive(Clone, Debug)]
pub struct ChebyshevPair {
    f: ScalarFunction,
    g: ScalarFunction,
    domain: Interval,
    orientation: Orientation,
    regularity: Regularity,
}

impl ChebyshevPair {
    /// Builds a pair and verifies it on the default 64-point grid.
    pub fn new(f: ScalarFunction, g: ScalarFunction) -> Result<Self> {
        let domain = f.domain().intersect(&g.domain())?;
        let grid = VerificationGrid::for_domain(&domain);
        Self::verified(f, g, domain, &grid)
    }

    /// Builds a pair on `domain` (intersected with the function domains).
    pub fn on(f: ScalarFunction, g: ScalarFunction, domain: Interval) -> Result<Self> {
        let domain = f.domain().intersect(&g.domain())?.intersect(&domain)?;
        let grid = VerificationGrid::for_domain(&domain);
        Self::verified(f, g, domain, &grid)
    }

    /// Verifies the pair on an explicit grid: every determinant for
    /// `x < y` must be nonzero with one sign, and the Wronskian must not
    /// vanish on the grid for the pair to count as `C1`/`C2`.
    pub fn verified(f: ScalarFunction, g: ScalarFunction, domain: Interval, grid: &VerificationGrid) -> Result<Self> {
        let pts: Vec<f64> = grid.points.iter().copied().filter(|&x| domain.contains(x)).collect();
        if pts.len() < 2 {
            return Err(Error::input("verification grid needs two points inside the domain"));
        }
        let fv: Vec<f64> = pts.iter().map(|&x| f.value(x)).collect();
        let gv: Vec<f64> = pts.iter().map(|&x| g.value(x)).collect();
        if let Some(i) = fv.iter().chain(&gv).position(|v| !v.is_finite()) {
            let x = pts[i % pts.len()];
            return Err(Error::evaluation(format!("x = {x}"), "pair function is not finite"));
        }
        let mut sign = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = fv[i] * gv[j] - fv[j] * gv[i];
                if d == 0.0 || !d.is_finite() {
                    return Err(Error::Degenerate(format!(
                        "D({}, {}) = {d}: ({}, {}) is not a Chebyshev system",
                        pts[i], pts[j], f.label(), g.label()
                    )));
                }
                if sign == 0.0 {
                    sign = d.signum();
                } else if d.signum() != sign {
                    return Err(Error::Degenerate(format!(
                        "determinant changes sign at ({}, {})",
                        pts[i], pts[j]
                    )));
                }
            }
        }
        let orientation = if sign > 0.0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        };

        let mut regularity = Regularity::C0;
        if f.has_deriv1() && g.has_deriv1() {
            let nonvanishing = pts.iter().all(|&x| {
                let w = f.deriv1(x).unwrap() * g.value(x) - g.deriv1(x).unwrap() * f.value(x);
                w != 0.0 && w.is_finite()
            });
            if nonvanishing {
                regularity = if f.has_deriv2() && g.has_deriv2() {
                    Regularity::C2
                } else {
                    Regularity::C1
                };
            }
        }
        Ok(ChebyshevPair {
            f,
            g,
            domain,
            orientation,
            regularity,
        })
    }

    /// The pair of `x^p, x^q` (or `x^p ln x, x^p` when `p = q`), scaled so
    /// that its determinant is exactly `Δ_{p,q}` (see [`capital_delta_gini`]).
    pub fn gini(p: f64, q: f64) -> Self {
        let (f, g) = if p == q {
            (ScalarFunction::log_power(p), ScalarFunction::power(p))
        } else {
            let s = 1.0 / (p - q);
            let f = ScalarFunction::linear_combination(s, &ScalarFunction::power(p), 0.0, &ScalarFunction::power(q))
                .expect("same domain");
            let mut f = f;
            f.label = format!("x^{p}/({})", p - q);
            (f, ScalarFunction::power(q))
        };
        // Δ_{p,q}(x, y) < 0 for x < y: δ_{p,q}(t) < 0 on (0, 1).
        ChebyshevPair {
            f,
            g,
            domain: Interval::positive(),
            orientation: Orientation::Negative,
            regularity: Regularity::C2,
        }
    }

    /// Quasi-arithmetic generator pair `(phi, 1)`.
    pub fn quasi_arithmetic(phi: ScalarFunction) -> Result<Self> {
        let one = ScalarFunction::constant(1.0);
        Self::new(phi, one)
    }

    pub fn f(&self) -> &ScalarFunction {
        &self.f
    }

    pub fn g(&self) -> &ScalarFunction {
        &self.g
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn label(&self) -> String {
        format!("({}, {})", self.f.label(), self.g.label())
    }

    /// `D(x, y) = f(x) g(y) - f(y) g(x)`.
    pub fn determinant(&self, x: f64, y: f64) -> Result<f64> {
        self.domain.check(x, "x")?;
        self.domain.check(y, "y")?;
        Ok(self.det_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn det_unchecked(&self, x: f64, y: f64) -> f64 {
        self.f.value(x) * self.g.value(y) - self.f.value(y) * self.g.value(x)
    }

    /// `f'(x) g(x) - g'(x) f(x)`, the derivative of `D` in its first slot
    /// on the diagonal.
    pub fn wronskian(&self, x: f64) -> Result<f64> {
        self.domain.check(x, "x")?;
        Ok(self.f.deriv1(x)? * self.g.value(x) - self.g.deriv1(x)? * self.f.value(x))
    }

    /// `∂₁²D(x,x) / ∂₁D(x,x) = (f'' g - g'' f) / (f' g - g' f)`.
    pub fn diag_d2_over_d1(&self, x: f64) -> Result<f64> {
        let w = self.wronskian(x)?;
        let num = self.f.deriv2(x)? * self.g.value(x) - self.g.deriv2(x)? * self.f.value(x);
        let scale = (self.f.deriv1(x)? * self.g.value(x)).abs() + (self.g.deriv1(x)? * self.f.value(x)).abs();
        if w == 0.0 || w.abs() <= 1e-14 * scale {
            return Err(Error::Degenerate(format!("Wronskian vanishes at x = {x}")));
        }
        Ok(num / w)
    }

    /// `D(u, v) / ∂₁D(v, v)`, the two-variable quantity compared in the
    /// global criterion.
    pub fn normalized_determinant(&self, u: f64, v: f64) -> Result<f64> {
        let w = self.wronskian(v)?;
        if w == 0.0 || !w.is_finite() {
            return Err(Error::Degenerate(format!("Wronskian vanishes at v = {v}")));
        }
        Ok(self.det_unchecked(u, v) / w)
    }

    /// `(αf + βg, γf + δg)`; the determinant scales by `αδ - βγ`.
    pub fn apply_transform(&self, t: &PairTransform) -> Result<ChebyshevPair> {
        let det = t.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::input(format!("singular transform {t:?}")));
        }
        let f = ScalarFunction::linear_combination(t.alpha, &self.f, t.beta, &self.g)?;
        let g = ScalarFunction::linear_combination(t.gamma, &self.f, t.delta, &self.g)?;
        Ok(ChebyshevPair {
            f,
            g,
            domain: self.domain,
            orientation: if det < 0.0 {
                self.orientation.flipped()
            } else {
                self.orientation
            },
            regularity: self.regularity,
        })
    }

    /// `g > 0` and `f/g` strictly monotone at every grid point.
    pub fn is_normalized_on(&self, points: &[f64]) -> bool {
        let mut prev: Option<f64> = None;
        let mut dir = 0.0;
        for &x in points {
            let gx = self.g.value(x);
            if !(gx > 0.0) {
                return false;
            }
            let r = self.f.value(x) / gx;
            if !r.is_finite() {
                return false;
            }
            if let Some(p) = prev {
                let step = r - p;
                if step == 0.0 {
                    return false;
                }
                if dir == 0.0 {
                    dir = step.signum();
                } else if step.signum() != dir {
                    return false;
                }
            }
            prev = Some(r);
        }
        true
    }

    /// Searches for an equivalent pair with `g* > 0` and `f*/g*` strictly
    /// monotone on `grid`.
    ///
    /// Candidates, in order: identity, swap, sign flips (alone and with the
    /// swap), then `α = 1, β = 0` with `(γ, δ)` on a `[-2, 2]²` grid of step
    /// 0.25. Exhausting the list is reported as inconclusive.
    pub fn normalize(&self, grid: &VerificationGrid) -> Result<(PairTransform, ChebyshevPair)> {
        let pts: Vec<f64> = grid.points.iter().copied().filter(|&x| self.domain.contains(x)).collect();
        let mut candidates = vec![
            PairTransform::IDENTITY,
            PairTransform::SWAP,
            PairTransform::new(-1.0, 0.0, 0.0, 1.0),
            PairTransform::new(1.0, 0.0, 0.0, -1.0),
            PairTransform::new(-1.0, 0.0, 0.0, -1.0),
            PairTransform::new(0.0, -1.0, 1.0, 0.0),
            PairTransform::new(0.0, 1.0, -1.0, 0.0),
            PairTransform::new(0.0, -1.0, -1.0, 0.0),
        ];
        let steps: Vec<f64> = (0..=16).map(|k| -2.0 + 0.25 * k as f64).collect();
        for &gamma in &steps {
            for &delta in &steps {
                if delta != 0.0 {
                    candidates.push(PairTransform::new(1.0, 0.0, gamma, delta));
                }
            }
        }
        for t in candidates {
            let candidate = self.apply_transform(&t)?;
            if candidate.is_normalized_on(&pts) {
                return Ok((t, candidate));
            }
        }
        Err(Error::Inconclusive(format!(
            "no normalizing transform found for {} within the search budget",
            self.label()
        )))
    }
}

/// Coefficients of `(f*, g*) = (αf + βg, γf + δg)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTransform {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl PairTransform {
    pub const IDENTITY: PairTransform = PairTransform {
        alpha: 1.0,
        beta: 0.0,
        gamma: 0.0,
        delta: 1.0,
    };

    pub const SWAP: PairTransform = PairTransform {
        alpha: 0.0,
        beta: 1.0,
        gamma: 1.0,
        delta: 0.0,
    };

    pub const fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        PairTransform {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }
}

/// `δ_{p,q}(t) = (t^p - t^q)/(p - q)`, or `t^p ln t` when `p = q`.
///
/// The `p = q` branch is selected by exact equality; `δ_{p,q}` is continuous
/// in the parameters, so nearby `p ≈ q` give nearby values anyway.
pub fn delta_gini(p: f64, q: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::input(format!("δ_(p,q)(t) needs t > 0, got {t}")));
    }
    Ok(delta_gini_unchecked(p, q, t))
}

#[inline]
pub(crate) fn delta_gini_unchecked(p: f64, q: f64, t: f64) -> f64 {
    if p == q {
        t.powf(p) * t.ln()
    } else {
        (t.powf(p) - t.powf(q)) / (p - q)
    }
}

/// `Δ_{p,q}(x, y) = y^{p+q} δ_{p,q}(x/y)`.
pub fn capital_delta_gini(p: f64, q: f64, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::input(format!("Δ_(p,q)(x, y) needs x, y > 0, got ({x}, {y})")));
    }
    Ok(y.powf(p + q) * delta_gini_unchecked(p, q, x / y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair(f: ScalarFunction, g: ScalarFunction) -> ChebyshevPair {
        ChebyshevPair::new(f, g).unwrap()
    }

    #[test]
    fn determinant_examples() {
        let lin = pair(ScalarFunction::constant(1.0), ScalarFunction::identity());
        assert_eq!(lin.determinant(1.0, 3.0).unwrap(), 2.0);
        assert_eq!(lin.determinant(2.5, 2.5).unwrap(), 0.0);
        assert_eq!(lin.orientation(), Orientation::Positive);

        let sq = pair(ScalarFunction::power(2.0), ScalarFunction::power(1.0));
        assert_eq!(sq.determinant(1.0, 2.0).unwrap(), -2.0);
        assert!(sq.determinant(-1.0, 2.0).unwrap_err().is_input());
    }

    #[test]
    fn wronskian_examples() {
        let lin = pair(ScalarFunction::constant(1.0), ScalarFunction::identity());
        for x in [-3.0, 0.0, 7.5] {
            assert_eq!(lin.wronskian(x).unwrap(), -1.0);
        }
        assert_eq!(ChebyshevPair::gini(2.0, 1.0).wronskian(1.0).unwrap(), 1.0);
        let cubic = pair(ScalarFunction::power(3.0), ScalarFunction::power(1.0));
        assert_relative_eq!(cubic.wronskian(2.0).unwrap(), 16.0, max_relative = 1e-15);

        let no_deriv = ScalarFunction::new(Interval::real_line(), "opaque", |x| x);
        let p = pair(ScalarFunction::constant(1.0), no_deriv);
        assert_eq!(p.regularity(), Regularity::C0);
        assert!(matches!(p.wronskian(1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn diag_ratio_examples() {
        assert_relative_eq!(ChebyshevPair::gini(2.0, 0.0).diag_d2_over_d1(1.0).unwrap(), 1.0);
        let aff = pair(ScalarFunction::identity(), ScalarFunction::constant(1.0));
        assert_eq!(aff.diag_d2_over_d1(4.2).unwrap(), 0.0);
        assert_relative_eq!(
            ChebyshevPair::gini(3.0, 2.0).diag_d2_over_d1(2.0).unwrap(),
            2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn transform_examples() {
        let base = pair(ScalarFunction::constant(1.0), ScalarFunction::identity());
        let id = base.apply_transform(&PairTransform::IDENTITY).unwrap();
        assert_eq!(id.determinant(1.0, 3.0).unwrap(), 2.0);

        let swapped = base.apply_transform(&PairTransform::SWAP).unwrap();
        assert_eq!(swapped.determinant(1.0, 3.0).unwrap(), -2.0);
        assert_eq!(swapped.orientation(), Orientation::Negative);
        assert_eq!(swapped.f().value(5.0), 5.0);
        assert_eq!(swapped.g().value(5.0), 1.0);

        let scaled = base.apply_transform(&PairTransform::new(2.0, 0.0, 0.0, 3.0)).unwrap();
        assert_eq!(scaled.determinant(1.0, 3.0).unwrap(), 12.0);

        assert!(base.apply_transform(&PairTransform::new(1.0, 2.0, 2.0, 4.0)).unwrap_err().is_input());
    }

    #[test]
    fn normalize_examples() {
        let id = pair(ScalarFunction::identity(), ScalarFunction::constant(1.0));
        let (t, _) = id.normalize(&VerificationGrid::for_domain(&id.domain())).unwrap();
        assert_eq!(t, PairTransform::IDENTITY);

        // g = id is not positive on the real line, the swap fixes it
        let one_id = pair(ScalarFunction::constant(1.0), ScalarFunction::identity());
        let (t, n) = one_id.normalize(&VerificationGrid::for_domain(&one_id.domain())).unwrap();
        assert_eq!(t, PairTransform::SWAP);
        assert!(n.g().value(-3.0) > 0.0);

        // on (0, inf) the identity already works: g = x > 0, f/g = 1/x
        let pos = ChebyshevPair::on(ScalarFunction::constant(1.0), ScalarFunction::identity(), Interval::positive())
            .unwrap();
        let (t, _) = pos.normalize(&VerificationGrid::for_domain(&pos.domain())).unwrap();
        assert_eq!(t, PairTransform::IDENTITY);

        let half_pi = std::f64::consts::FRAC_PI_2;
        let trig = ChebyshevPair::on(ScalarFunction::sin(), ScalarFunction::cos(), Interval::new(-half_pi, half_pi).unwrap())
            .unwrap();
        let (t, _) = trig.normalize(&VerificationGrid::for_domain(&trig.domain())).unwrap();
        assert_eq!(t, PairTransform::IDENTITY);
    }

    #[test]
    fn non_chebyshev_pair_is_rejected() {
        // x^2 and 1 on the real line: D(-1, 1) = 0
        let r = ChebyshevPair::on(
            ScalarFunction::new(Interval::real_line(), "x^2", |x| x * x),
            ScalarFunction::constant(1.0),
            Interval::new(-2.0, 2.0).unwrap(),
        );
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_gini(2.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(delta_gini(2.0, 1.0, 2.0).unwrap(), 2.0);
        assert!(delta_gini(1.0, 1.0, 0.0).unwrap_err().is_input());
        assert_relative_eq!(capital_delta_gini(2.0, 1.0, 1.0, 2.0).unwrap(), -2.0);
        assert_eq!(capital_delta_gini(0.3, -1.2, 4.0, 4.0).unwrap(), 0.0);
        assert_relative_eq!(
            capital_delta_gini(0.0, 0.0, std::f64::consts::E, 1.0).unwrap(),
            1.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn delta_derivative_anchors() {
        let grid = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];
        for &p in &grid {
            for &q in &grid {
                let h1 = 1e-6;
                let d1 = (delta_gini(p, q, 1.0 + h1).unwrap() - delta_gini(p, q, 1.0 - h1).unwrap()) / (2.0 * h1);
                assert!((d1 - 1.0).abs() < 1e-6, "δ'({p},{q}) = {d1}");
                let h2 = 1e-4;
                let d2 = (delta_gini(p, q, 1.0 + h2).unwrap() - 2.0 * delta_gini(p, q, 1.0).unwrap()
                    + delta_gini(p, q, 1.0 - h2).unwrap())
                    / (h2 * h2);
                assert!((d2 - (p + q - 1.0)).abs() < 1e-4, "δ''({p},{q}) = {d2}");
            }
        }
    }

    #[test]
    fn gini_pair_matches_capital_delta() {
        for &(p, q) in &[(2.0, 1.0), (-1.5, 0.5), (0.0, 0.0), (1.3, 1.3), (3.0, -3.0)] {
            let pair = ChebyshevPair::gini(p, q);
            for &(x, y) in &[(0.7, 1.9), (2.0, 0.5), (1.0, 1.01)] {
                let d = pair.determinant(x, y).unwrap();
                let cd = capital_delta_gini(p, q, x, y).unwrap();
                assert_relative_eq!(d, cd, max_relative = 1e-12);
            }
            // (p+q-1) x^(p+q-2) / x^(p+q-1)
            assert_relative_eq!(pair.diag_d2_over_d1(1.7).unwrap(), (p + q - 1.0) / 1.7, max_relative = 1e-12, epsilon = 1e-14);
            let verified = ChebyshevPair::new(pair.f().clone(), pair.g().clone()).unwrap();
            assert_eq!(verified.orientation(), pair.orientation());
        }
    }

    #[test]
    fn derivative_callables_match_finite_differences() {
        let fns = [
            ScalarFunction::power(2.5),
            ScalarFunction::power(-1.5),
            ScalarFunction::log_power(1.5),
            ScalarFunction::log(),
            ScalarFunction::exp(),
            ScalarFunction::compose(&ScalarFunction::exp(), &ScalarFunction::log_power(0.5)),
        ];
        for f in &fns {
            for &x in &[0.4, 1.0, 2.3] {
                let h = 1e-5 * x;
                let fd1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                let d1 = f.deriv1(x).unwrap();
                assert!((fd1 - d1).abs() <= 1e-5 * d1.abs().max(1.0), "{}: {fd1} vs {d1}", f.label());
                let fd2 = (f.deriv1(x + h).unwrap() - f.deriv1(x - h).unwrap()) / (2.0 * h);
                let d2 = f.deriv2(x).unwrap();
                assert!((fd2 - d2).abs() <= 1e-5 * d2.abs().max(1.0), "{}: {fd2} vs {d2}", f.label());
            }
        }
    }
}
