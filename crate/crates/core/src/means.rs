//! Generalized Bajraktarević means and their named special cases.
//!
//! `M(x)` is the unique `y` with `∫ D(m(x, t), y) dμ(t) = 0`, where `D` is the
//! determinant of a Chebyshev pair. [`GeneralizedMean::eval_implicit`] solves
//! that equation directly; [`GeneralizedMean::eval_explicit`] inverts `f/g`
//! at the ratio of the integrals of `f∘m` and `g∘m`.

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::families::{range, MeanFamily};
use crate::measures::ProbabilityMeasure;
use crate::roots::{invert_monotone, solve_bracketed, RootOptions};
use crate::scalarfn::{ChebyshevPair, ScalarFunction};

/// Relative width below which `x` is treated as a diagonal point.
pub const DIAGONAL_TOL: f64 = 1e-14;

/// A pair, a family and a measure on the family's carrier.
#[derive(Debug, Clone)]
pub struct GeneralizedMean {
    pair: ChebyshevPair,
    family: MeanFamily,
    measure: ProbabilityMeasure,
    domain: Interval,
    roots: RootOptions,
}

fn is_diagonal(lo: f64, hi: f64) -> bool {
    hi - lo <= DIAGONAL_TOL * lo.abs().max(hi.abs()).max(1.0)
}

impl GeneralizedMean {
    pub fn new(pair: ChebyshevPair, family: MeanFamily, measure: ProbabilityMeasure) -> Result<Self> {
        measure.check_carrier(family.carrier())?;
        let domain = pair.domain().intersect(&family.domain())?;
        Ok(GeneralizedMean {
            pair,
            family,
            measure,
            domain,
            roots: RootOptions::default(),
        })
    }

    /// The Gini mean `G_{p,q,m;μ}` as a generalized mean.
    pub fn gini(p: f64, q: f64, family: MeanFamily, measure: ProbabilityMeasure) -> Result<Self> {
        Self::new(ChebyshevPair::gini(p, q), family, measure)
    }

    pub fn with_root_options(mut self, roots: RootOptions) -> Self {
        self.roots = roots;
        self
    }

    pub fn pair(&self) -> &ChebyshevPair {
        &self.pair
    }

    pub fn family(&self) -> &MeanFamily {
        &self.family
    }

    pub fn measure(&self) -> &ProbabilityMeasure {
        &self.measure
    }

    /// Common domain of the pair and the family.
    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.family.arity()
    }

    /// Same mean with the pair replaced by an equivalent one.
    pub fn with_pair(&self, pair: ChebyshevPair) -> Result<Self> {
        Ok(GeneralizedMean::new(pair, self.family.clone(), self.measure.clone())?.with_root_options(self.roots))
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        self.family.check_point(x)?;
        for (i, &xi) in x.iter().enumerate() {
            self.domain.check(xi, &format!("x_{}", i + 1))?;
        }
        Ok(())
    }

    /// `m(x, t_k)` for every node `t_k` of the measure.
    pub fn family_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.measure
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let v = self.family.eval(x, t)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::evaluation(format!("node {k} (t = {t:?})"), format!("m(x, t) = {v}")))
                }
            })
            .collect()
    }

    /// `h(u) = ∫ D(m(x, t), u) dμ(t)` for precomputed family values.
    fn residual_from(&self, values: &[f64], u: f64) -> f64 {
        values
            .iter()
            .zip(self.measure.weights())
            .map(|(&v, w)| w * self.pair.det_unchecked(v, u))
            .sum()
    }

    /// `h(u) = ∫ D(m(x, t), u) dμ(t)`; its unique zero is `M(x)`.
    pub fn residual(&self, x: &[f64], u: f64) -> Result<f64> {
        self.check_point(x)?;
        self.domain.check(u, "u")?;
        let values = self.family_values(x)?;
        Ok(self.residual_from(&values, u))
    }

    /// Root of the defining equation, bracketed by the range of `m(x, ·)` over
    /// the measure nodes (a subset of `[min x, max x]`).
    pub fn eval_implicit(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let (xlo, xhi) = range(x);
        if is_diagonal(xlo, xhi) {
            return Ok(x[0]);
        }
        let values = self.family_values(x)?;
        let (lo, hi) = range(&values);
        if is_diagonal(lo, hi) {
            return Ok(values[0]);
        }
        solve_bracketed(|u| Ok(self.residual_from(&values, u)), lo, hi, self.roots).map_err(|e| match e {
            Error::Numeric(msg) => Error::numeric(format!(
                "{msg} on [{lo}, {hi}] for {}: the pair may not be a Chebyshev system there",
                self.pair.label()
            )),
            other => other,
        })
    }

    /// `(f/g)⁻¹(∫ f∘m dμ / ∫ g∘m dμ)`.
    ///
    /// Needs `g > 0` and `f/g` strictly monotone on the bracket; both are
    /// checked on a 33-point grid (positivity also at the node values), and a
    /// capability error asks for a normalized pair otherwise.
    pub fn eval_explicit(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let (xlo, xhi) = range(x);
        if is_diagonal(xlo, xhi) {
            return Ok(x[0]);
        }
        let values = self.family_values(x)?;
        let (lo, hi) = range(&values);
        if is_diagonal(lo, hi) {
            return Ok(values[0]);
        }
        let (f, g) = (self.pair.f(), self.pair.g());
        // monotonicity on the grid; positivity of g at the nodes as well
        let probe: Vec<f64> = (0..=32).map(|k| lo + (hi - lo) * k as f64 / 32.0).collect();
        if !self.pair.is_normalized_on(&probe) || values.iter().any(|&v| !(g.value(v) > 0.0)) {
            return Err(Error::capability(format!(
                "{} is not normalized on [{lo}, {hi}]; normalize the pair first",
                self.pair.label()
            )));
        }
        let num = self.measure.integrate(|t| f.value(self.family.eval(x, t).unwrap_or(f64::NAN)))?;
        let den = self.measure.integrate(|t| g.value(self.family.eval(x, t).unwrap_or(f64::NAN)))?;
        invert_monotone(|u| f.value(u) / g.value(u), num / den, lo, hi, self.roots)
    }
}

/// Log-sum-exp of `ln w_k + a_k`.
fn log_weighted_sum(weights: &[f64], logs: &[f64]) -> f64 {
    let terms: Vec<f64> = weights.iter().zip(logs).map(|(w, a)| w.ln() + a).collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

fn check_positive(x: &[f64]) -> Result<()> {
    match x.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        None => Ok(()),
        Some(i) => Err(Error::input(format!("x_{} = {} must be positive", i + 1, x[i]))),
    }
}

/// Closed-form weighted Gini mean of positive values.
///
/// `((Σ w v^p) / (Σ w v^q))^{1/(p-q)}`, or `exp(Σ w v^p ln v / Σ w v^p)` when
/// `p = q`, evaluated in log space.
pub fn gini_of_values(p: f64, q: f64, values: &[f64], weights: &[f64]) -> Result<f64> {
    check_positive(values)?;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    if p == q {
        let scaled: Vec<f64> = logs.iter().map(|l| p * l).collect();
        let norm = log_weighted_sum(weights, &scaled);
        let mean_log: f64 = weights
            .iter()
            .zip(&scaled)
            .zip(&logs)
            .map(|((w, s), l)| w * (s - norm).exp() * l)
            .sum();
        return Ok(mean_log.exp());
    }
    let lp: Vec<f64> = logs.iter().map(|l| p * l).collect();
    let lq: Vec<f64> = logs.iter().map(|l| q * l).collect();
    Ok(((log_weighted_sum(weights, &lp) - log_weighted_sum(weights, &lq)) / (p - q)).exp())
}

/// `G_{p,q,m;μ}(x)` by its closed form.
pub fn gini_mean(p: f64, q: f64, family: &MeanFamily, mu: &ProbabilityMeasure, x: &[f64]) -> Result<f64> {
    check_positive(x)?;
    family.check_point(x)?;
    mu.check_carrier(family.carrier())?;
    let values = mu.nodes().iter().map(|t| family.eval(x, t)).collect::<Result<Vec<_>>>()?;
    let (lo, hi) = range(x);
    if is_diagonal(lo, hi) {
        return Ok(x[0]);
    }
    let g = gini_of_values(p, q, &values, mu.weights())?;
    Ok(g.clamp(lo, hi))
}

/// Unweighted power mean `H_p(x)`; `p = 0` is the geometric mean.
pub fn holder_mean(p: f64, x: &[f64]) -> Result<f64> {
    check_positive(x)?;
    if x.is_empty() {
        return Err(Error::input("power mean of no values"));
    }
    let (lo, hi) = range(x);
    if is_diagonal(lo, hi) {
        return Ok(x[0]);
    }
    let n = x.len() as f64;
    let h = if p == 0.0 {
        (x.iter().map(|v| v.ln()).sum::<f64>() / n).exp()
    } else {
        let logs: Vec<f64> = x.iter().map(|v| p * v.ln()).collect();
        let w = vec![1.0 / n; x.len()];
        (log_weighted_sum(&w, &logs) / p).exp()
    };
    Ok(h.clamp(lo, hi))
}

/// Weighted quasi-arithmetic mean `φ⁻¹(Σ w_i φ(x_i))`.
pub fn quasi_arithmetic_mean(phi: &ScalarFunction, x: &[f64], weights: &[f64]) -> Result<f64> {
    if x.len() != weights.len() || x.is_empty() {
        return Err(Error::input("values and weights differ in length"));
    }
    for (i, &xi) in x.iter().enumerate() {
        phi.domain().check(xi, &format!("x_{}", i + 1))?;
    }
    let (lo, hi) = range(x);
    if is_diagonal(lo, hi) {
        return Ok(x[0]);
    }
    let target: f64 = weights.iter().zip(x).map(|(w, &v)| w * phi.value(v)).sum();
    invert_monotone(|u| phi.value(u), target, lo, hi, RootOptions::default())
}

/// Bajraktarević mean `(f/g)⁻¹(Σ w f(x_i) / Σ w g(x_i))`.
pub fn bajraktarevic_mean(f: &ScalarFunction, g: &ScalarFunction, x: &[f64], weights: &[f64]) -> Result<f64> {
    if x.len() != weights.len() || x.is_empty() {
        return Err(Error::input("values and weights differ in length"));
    }
    let (lo, hi) = range(x);
    if is_diagonal(lo, hi) {
        return Ok(x[0]);
    }
    let num: f64 = weights.iter().zip(x).map(|(w, &v)| w * f.value(v)).sum();
    let den: f64 = weights.iter().zip(x).map(|(w, &v)| w * g.value(v)).sum();
    invert_monotone(|u| f.value(u) / g.value(u), num / den, lo, hi, RootOptions::default())
}

/// Cauchy (difference) mean `(f'/g')⁻¹((f(x₂) - f(x₁)) / (g(x₂) - g(x₁)))`.
pub fn cauchy_mean(f: &ScalarFunction, g: &ScalarFunction, x1: f64, x2: f64) -> Result<f64> {
    let domain = f.domain().intersect(&g.domain())?;
    domain.check(x1, "x1")?;
    domain.check(x2, "x2")?;
    let (lo, hi) = (x1.min(x2), x1.max(x2));
    if is_diagonal(lo, hi) {
        return Ok(x1);
    }
    let dg = g.value(x2) - g.value(x1);
    if dg == 0.0 || !dg.is_finite() {
        return Err(Error::numeric(format!("g({x2}) - g({x1}) = {dg}")));
    }
    let target = (f.value(x2) - f.value(x1)) / dg;
    let ratio = |u: f64| -> Result<f64> { Ok(f.deriv1(u)? / g.deriv1(u)?) };
    ratio(lo)?;
    invert_monotone(|u| ratio(u).unwrap_or(f64::NAN), target, lo, hi, RootOptions::default())
}

/// Two-variable Stolarsky mean, the Cauchy mean of `x^p` and `x^q` (with the
/// logarithmic forms when an exponent vanishes or `p = q`).
pub fn stolarsky_mean(p: f64, q: f64, x1: f64, x2: f64) -> Result<f64> {
    check_positive(&[x1, x2])?;
    let (lo, hi) = (x1.min(x2), x1.max(x2));
    if is_diagonal(lo, hi) {
        return Ok(x1);
    }
    // Written around x2 with expm1 so that nearly equal exponents and
    // nearly equal arguments do not cancel.
    let l = x1.ln() - x2.ln();
    let s = if p == q && p == 0.0 {
        (x1 * x2).sqrt()
    } else if p == q {
        let z = p * l;
        x2 * (-l / (-z).exp_m1() - 1.0 / p).exp()
    } else if q == 0.0 {
        let z = p * l;
        x2 * (z.exp_m1() / z).powf(1.0 / p)
    } else if p == 0.0 {
        let z = q * l;
        x2 * (z.exp_m1() / z).powf(1.0 / q)
    } else {
        let ratio = (q * (p * l).exp_m1()) / (p * (q * l).exp_m1());
        x2 * (ratio.ln() / (p - q)).exp()
    };
    Ok(s.clamp(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coordinates(d: usize) -> (MeanFamily, ProbabilityMeasure) {
        (
            MeanFamily::coordinates(d).unwrap(),
            ProbabilityMeasure::uniform_indices(d).unwrap(),
        )
    }

    #[test]
    fn implicit_examples() {
        let (fam, mu) = coordinates(2);
        let sq = ChebyshevPair::new(ScalarFunction::power(2.0), ScalarFunction::constant(1.0)).unwrap();
        let m = GeneralizedMean::new(sq, fam, mu).unwrap();
        assert_relative_eq!(m.eval_implicit(&[1.0, 3.0]).unwrap(), 5f64.sqrt(), epsilon = 1e-12);
        assert_eq!(m.eval_implicit(&[2.5, 2.5]).unwrap(), 2.5);

        let lin = ChebyshevPair::new(ScalarFunction::identity(), ScalarFunction::constant(1.0)).unwrap();
        let seg = GeneralizedMean::new(lin, MeanFamily::segment(), ProbabilityMeasure::uniform01(64).unwrap()).unwrap();
        assert_relative_eq!(seg.eval_implicit(&[0.0, 1.0]).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn explicit_examples() {
        let (fam, mu) = coordinates(2);
        let lg = ChebyshevPair::new(ScalarFunction::log(), ScalarFunction::constant(1.0)).unwrap();
        let m = GeneralizedMean::new(lg, fam, mu).unwrap();
        assert_relative_eq!(m.eval_explicit(&[1.0, 4.0]).unwrap(), 2.0, max_relative = 1e-13);
        assert_eq!(m.eval_explicit(&[7.0, 7.0]).unwrap(), 7.0);

        let (fam, mu) = coordinates(3);
        let bj = ChebyshevPair::new(ScalarFunction::power(2.0), ScalarFunction::power(1.0)).unwrap();
        let m = GeneralizedMean::new(bj, fam, mu).unwrap();
        assert_relative_eq!(m.eval_explicit(&[1.0, 2.0, 3.0]).unwrap(), 14.0 / 6.0, max_relative = 1e-13);
        assert_relative_eq!(m.eval_implicit(&[1.0, 2.0, 3.0]).unwrap(), 14.0 / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn explicit_needs_normalized_pair() {
        let (fam, mu) = coordinates(2);
        let neg = ChebyshevPair::new(ScalarFunction::constant(1.0), ScalarFunction::affine(-1.0, 0.0))
            .unwrap();
        let m = GeneralizedMean::new(neg, fam, mu).unwrap();
        assert!(matches!(m.eval_explicit(&[1.0, 3.0]), Err(Error::Capability(_))));
        assert_relative_eq!(m.eval_implicit(&[1.0, 3.0]).unwrap(), 2.0, max_relative = 1e-13);
    }

    #[test]
    fn gini_examples() {
        let (fam, mu) = coordinates(3);
        assert_relative_eq!(gini_mean(2.0, 1.0, &fam, &mu, &[1.0, 2.0, 3.0]).unwrap(), 14.0 / 6.0, max_relative = 1e-14);
        let (fam, mu) = coordinates(2);
        assert_relative_eq!(gini_mean(0.0, 0.0, &fam, &mu, &[1.0, 4.0]).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(gini_mean(2.0, 0.0, &fam, &mu, &[3.0, 4.0]).unwrap(), 12.5f64.sqrt(), max_relative = 1e-14);
        assert!(gini_mean(2.0, 0.0, &fam, &mu, &[-3.0, 4.0]).unwrap_err().is_input());
        for (p, q) in [(2.0, 1.0), (-1.5, 0.5), (0.7, 0.7), (0.0, 0.0), (3.0, -3.0)] {
            let m = GeneralizedMean::gini(p, q, fam.clone(), mu.clone()).unwrap();
            let x = [0.6, 2.9];
            assert_relative_eq!(
                m.eval_implicit(&x).unwrap(),
                gini_mean(p, q, &fam, &mu, &x).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn holder_examples() {
        assert_eq!(holder_mean(1.0, &[1.0, 3.0]).unwrap(), 2.0);
        assert_relative_eq!(holder_mean(0.0, &[2.0, 8.0]).unwrap(), 4.0, max_relative = 1e-15);
        assert_eq!(holder_mean(-1.0, &[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert!(holder_mean(2.0, &[0.0, 1.0]).unwrap_err().is_input());
    }

    #[test]
    fn cauchy_examples() {
        let c = cauchy_mean(&ScalarFunction::power(2.0), &ScalarFunction::power(1.0), 1.0, 3.0).unwrap();
        assert_relative_eq!(c, 2.0, max_relative = 1e-13);
        assert_eq!(cauchy_mean(&ScalarFunction::power(2.0), &ScalarFunction::power(1.0), 5.0, 5.0).unwrap(), 5.0);
        let e = std::f64::consts::E;
        let l = cauchy_mean(&ScalarFunction::log(), &ScalarFunction::power(1.0), 1.0, e).unwrap();
        assert_relative_eq!(l, e - 1.0, max_relative = 1e-13);
    }

    #[test]
    fn stolarsky_examples() {
        assert_relative_eq!(stolarsky_mean(2.0, 1.0, 1.0, 3.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(stolarsky_mean(-0.3, 4.0, 7.0, 7.0).unwrap(), 7.0);
        let e2 = std::f64::consts::E.powi(2);
        let expected = (2.0 * e2 / (e2 - 1.0) - 1.0).exp();
        assert_relative_eq!(stolarsky_mean(1.0, 1.0, 1.0, e2).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn stolarsky_branches_are_continuous() {
        let (x1, x2) = (0.8, 3.1);
        for (p, q) in [(1.0, 1.0), (0.0, 0.0), (2.0, 0.0), (0.0, -1.5), (-1.0, -1.0)] {
            let exact = stolarsky_mean(p, q, x1, x2).unwrap();
            let near = stolarsky_mean(p + 1e-6, q - 1e-6, x1, x2).unwrap();
            assert!((exact - near).abs() < 1e-5, "({p},{q}): {exact} vs {near}");
        }
    }

    #[test]
    fn stolarsky_is_cauchy_of_powers() {
        let pairs = [(2.0, 1.0), (3.0, -1.0), (0.5, 2.0)];
        for (p, q) in pairs {
            let c = cauchy_mean(&ScalarFunction::power(p), &ScalarFunction::power(q), 0.7, 2.6).unwrap();
            assert_relative_eq!(c, stolarsky_mean(p, q, 0.7, 2.6).unwrap(), max_relative = 1e-11);
        }
    }
}
