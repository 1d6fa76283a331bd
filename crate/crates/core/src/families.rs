//! Parametrized families of `d`-variable means `m(x, t)`.
//!
//! Coordinates are 0-based in the Rust API (`partial1(x, t, 0)` is the
//! derivative in `x_1`). Index carriers keep the 1-based labels
//! `{1, .., d}` of the parameter space itself, so the coordinate family
//! returns `x_t` for `t = [1.0]` .. `[d as f64]`.

use std::fmt;
use std::sync::Arc;

use crate::domain::{Interval, WindowOptions};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::means::holder_mean;
use crate::measures::{Carrier, Parameter};
use crate::roots::{invert_monotone, RootOptions};
use crate::scalarfn::ScalarFunction;

type EvalFn = Arc<dyn Fn(&[f64], &[f64]) -> Result<f64> + Send + Sync>;
type Partial1Fn = Arc<dyn Fn(&[f64], &[f64], usize) -> Result<f64> + Send + Sync>;
type Partial2Fn = Arc<dyn Fn(&[f64], &[f64], usize, usize) -> Result<f64> + Send + Sync>;
pub type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Structural class of a family; selects closed-form shortcuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Coordinates,
    /// `λ_1(t) x_1 + .. + λ_d(t) x_d`; second partials vanish.
    WeightedArithmetic,
    QuasiArithmetic,
    HolderPath,
}

/// A family of means indexed by a carrier.
#[derive(Clone)]
pub struct MeanFamily {
    arity: usize,
    carrier: Carrier,
    domain: Interval,
    kind: FamilyKind,
    /// Envelope equals `[min x, max x]` for every `x`.
    full_range: bool,
    eval: EvalFn,
    partial1: Option<Partial1Fn>,
    partial2: Option<Partial2Fn>,
    label: String,
}

impl fmt::Debug for MeanFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeanFamily")
            .field("label", &self.label)
            .field("arity", &self.arity)
            .field("carrier", &self.carrier)
            .field("kind", &self.kind)
            .finish()
    }
}

fn check_arity(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::input(format!("a family of means needs d >= 2, got {d}")))
    } else {
        Ok(())
    }
}

fn index_of(t: &[f64]) -> usize {
    t[0] as usize - 1
}

/// `[min x, max x]`.
pub fn range(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

impl MeanFamily {
    /// `m(x, t) = x_t` on `{1, .., d}`.
    pub fn coordinates(d: usize) -> Result<Self> {
        check_arity(d)?;
        Ok(MeanFamily {
            arity: d,
            carrier: Carrier::Indices { n: d },
            domain: Interval::real_line(),
            kind: FamilyKind::Coordinates,
            full_range: true,
            eval: Arc::new(|x, t| Ok(x[index_of(t)])),
            partial1: Some(Arc::new(|_, t, i| Ok(if index_of(t) == i { 1.0 } else { 0.0 }))),
            partial2: Some(Arc::new(|_, _, _, _| Ok(0.0))),
            label: format!("coordinates(d={d})"),
        })
    }

    /// `m(x, t) = λ_1(t) x_1 + .. + λ_d(t) x_d` on `[0, 1]`.
    ///
    /// The weights are checked on a 1025-point grid of `[0, 1]`: each must lie
    /// in `[0, 1]` and they must sum to one within 1e-12.
    pub fn weighted_arithmetic(lambdas: Vec<WeightFn>) -> Result<Self> {
        let d = lambdas.len();
        check_arity(d)?;
        for k in 0..=1024 {
            let s = k as f64 / 1024.0;
            let mut sum = 0.0;
            for (i, l) in lambdas.iter().enumerate() {
                let v = l(s);
                if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                    return Err(Error::input(format!("weight λ_{} (t = {s}) = {v} outside [0, 1]", i + 1)));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::input(format!("weights sum to {sum} at t = {s}")));
            }
        }
        let lam = Arc::new(lambdas);
        let (le, lp) = (lam.clone(), lam.clone());
        let full_range = d == 2 && {
            let ends = [lam[0](0.0), lam[0](1.0)];
            ends.contains(&0.0) && ends.contains(&1.0)
        };
        Ok(MeanFamily {
            arity: d,
            carrier: Carrier::UnitInterval,
            domain: Interval::real_line(),
            kind: FamilyKind::WeightedArithmetic,
            full_range,
            eval: Arc::new(move |x, t| Ok(le.iter().zip(x).map(|(l, xi)| l(t[0]) * xi).sum())),
            partial1: Some(Arc::new(move |_, t, i| Ok(lp[i](t[0])))),
            partial2: Some(Arc::new(|_, _, _, _| Ok(0.0))),
            label: format!("weighted_arithmetic(d={d})"),
        })
    }

    /// The segment family `t x_1 + (1 - t) x_2`.
    pub fn segment() -> Self {
        let mut fam = Self::weighted_arithmetic(vec![Arc::new(|s| s), Arc::new(|s| 1.0 - s)])
            .expect("segment weights are valid");
        fam.label = "segment".into();
        fam
    }

    /// `(x_1 + .. + x_d) / d` for every `t ∈ [0, 1]`.
    pub fn constant_arithmetic(d: usize) -> Result<Self> {
        check_arity(d)?;
        let w = 1.0 / d as f64;
        let mut fam = Self::weighted_arithmetic((0..d).map(|_| Arc::new(move |_| w) as WeightFn).collect())?;
        fam.label = format!("arithmetic(d={d})");
        Ok(fam)
    }

    /// `A_φ(x, t) = φ⁻¹(t_1 φ(x_1) + .. + t_d φ(x_d))` on the simplex `S_d`.
    ///
    /// `φ⁻¹` is computed by bisection on `[min x, max x]`, which needs only
    /// strict monotonicity of `φ`.
    pub fn quasi_arithmetic(phi: ScalarFunction, d: usize) -> Result<Self> {
        check_arity(d)?;
        let domain = phi.domain();
        let probe = domain.grid(33, false, &WindowOptions::default());
        let vals: Vec<f64> = probe.iter().map(|&x| phi.value(x)).collect();
        let increasing = vals.windows(2).all(|w| w[1] > w[0]);
        let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::input(format!("{} is not strictly monotone", phi.label())));
        }
        let phi = Arc::new(phi);
        let label = format!("quasi_arithmetic({}, d={d})", phi.label());

        let pe = phi.clone();
        let eval: EvalFn = Arc::new(move |x, t| quasi_arithmetic_value(&pe, x, t));

        let partial1: Option<Partial1Fn> = phi.has_deriv1().then(|| {
            let p = phi.clone();
            Arc::new(move |x: &[f64], t: &[f64], i: usize| {
                let a = quasi_arithmetic_value(&p, x, t)?;
                Ok(t[i] * p.deriv1(x[i])? / p.deriv1(a)?)
            }) as Partial1Fn
        });

        let partial2: Option<Partial2Fn> = (phi.has_deriv1() && phi.has_deriv2()).then(|| {
            let p = phi.clone();
            Arc::new(move |x: &[f64], t: &[f64], i: usize, j: usize| {
                let a = quasi_arithmetic_value(&p, x, t)?;
                let da = p.deriv1(a)?;
                let dj = t[j] * p.deriv1(x[j])? / da;
                let diag = if i == j { t[i] * p.deriv2(x[i])? / da } else { 0.0 };
                Ok(diag - t[i] * p.deriv1(x[i])? * p.deriv2(a)? * dj / (da * da))
            }) as Partial2Fn
        });

        Ok(MeanFamily {
            arity: d,
            carrier: Carrier::Simplex { d },
            domain,
            kind: FamilyKind::QuasiArithmetic,
            full_range: true,
            eval,
            partial1,
            partial2,
            label,
        })
    }

    /// `m(x, p) = H_p(x)`, the unweighted power mean, for `p` in `exponents`.
    pub fn holder_path(d: usize, exponents: &[f64]) -> Result<Self> {
        check_arity(d)?;
        if exponents.is_empty() || exponents.iter().any(|p| !p.is_finite()) {
            return Err(Error::input("holder path needs finite exponents"));
        }
        let n = d as f64;
        let partial1: Partial1Fn = Arc::new(move |x, t, i| {
            let p = t[0];
            let h = holder_mean(p, x)?;
            Ok(x[i].powf(p - 1.0) * h.powf(1.0 - p) / n)
        });
        let partial2: Partial2Fn = Arc::new(move |x, t, i, j| {
            let p = t[0];
            let h = holder_mean(p, x)?;
            let dj = x[j].powf(p - 1.0) * h.powf(1.0 - p) / n;
            let diag = if i == j { (p - 1.0) * x[i].powf(p - 2.0) * h.powf(1.0 - p) } else { 0.0 };
            Ok((diag + x[i].powf(p - 1.0) * (1.0 - p) * h.powf(-p) * dj) / n)
        });
        Ok(MeanFamily {
            arity: d,
            carrier: Carrier::Points {
                points: exponents.to_vec(),
            },
            domain: Interval::positive(),
            kind: FamilyKind::HolderPath,
            full_range: false,
            eval: Arc::new(|x, t| holder_mean(t[0], x)),
            partial1: Some(partial1),
            partial2: Some(partial2),
            label: format!("holder_path(d={d}, {exponents:?})"),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_partial1(&self) -> bool {
        self.partial1.is_some()
    }

    pub fn has_partial2(&self) -> bool {
        self.partial2.is_some()
    }

    /// Whether the envelope is `[min x, max x]` for every `x`.
    pub fn spans_range(&self) -> bool {
        self.full_range
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.arity {
            return Err(Error::input(format!("expected {} coordinates, got {}", self.arity, x.len())));
        }
        for (i, &xi) in x.iter().enumerate() {
            self.domain.check(xi, &format!("x_{}", i + 1))?;
        }
        Ok(())
    }

    /// `m(x, t)`; the caller guarantees `x` and `t` are admissible.
    #[inline]
    pub fn eval(&self, x: &[f64], t: &[f64]) -> Result<f64> {
        (self.eval)(x, t)
    }

    /// `∂_i m(x, t)` with 0-based `i`.
    pub fn partial1(&self, x: &[f64], t: &[f64], i: usize) -> Result<f64> {
        match &self.partial1 {
            Some(p) => p(x, t, i),
            None => Err(Error::capability(format!("{} has no first partials", self.label))),
        }
    }

    /// `∂_i ∂_j m(x, t)` with 0-based `i, j`.
    pub fn partial2(&self, x: &[f64], t: &[f64], i: usize, j: usize) -> Result<f64> {
        match &self.partial2 {
            Some(p) => p(x, t, i, j),
            None => Err(Error::capability(format!("{} has no second partials", self.label))),
        }
    }

    /// Lower and upper envelope at `x`: the extremes of `m(x, t)` over the
    /// carrier sample of the given resolution.
    pub fn envelope(&self, x: &[f64], resolution: usize) -> Result<Envelope> {
        self.check_point(x)?;
        if self.full_range {
            let (lower, upper) = range(x);
            return Ok(Envelope { lower, upper });
        }
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for t in self.carrier.sample(resolution) {
            let v = self.eval(x, &t)?;
            lower = lower.min(v);
            upper = upper.max(v);
        }
        Ok(Envelope { lower, upper })
    }

    /// `m* = sup_x upper(x) / lower(x)` over `domain^d`.
    ///
    /// Families whose envelope is the full range give `hi / lo` (infinite on
    /// unbounded or zero-touching domains). Others are sampled on a 9-point
    /// grid per axis including the closure endpoints; a ratio above
    /// `opts.cap` is reported as `+inf`.
    pub fn m_star(&self, domain: &Interval, opts: &MStarOptions) -> Result<ExtReal> {
        if !(domain.lo >= 0.0) {
            return Err(Error::input(format!("m* needs a positive domain, got ({}, {})", domain.lo, domain.hi)));
        }
        let domain = domain.intersect(&self.domain)?;
        if self.full_range {
            if domain.lo == 0.0 || domain.hi.is_infinite() {
                return Ok(ExtReal(f64::INFINITY));
            }
            return Ok(ExtReal(domain.hi / domain.lo));
        }
        let window = WindowOptions {
            positive_span: 1e4,
            ..WindowOptions::default()
        };
        let axis = domain.grid(opts.grid, true, &window);
        let d = self.arity;
        let total = axis.len().pow(d as u32);
        let mut best: f64 = 1.0;
        let mut x = vec![0.0; d];
        for k in 0..total {
            let mut r = k;
            for xi in x.iter_mut() {
                *xi = axis[r % axis.len()];
                r /= axis.len();
            }
            let mut lower = f64::INFINITY;
            let mut upper = f64::NEG_INFINITY;
            for t in self.carrier.sample(opts.resolution) {
                let v = self.eval(&x, &t)?;
                lower = lower.min(v);
                upper = upper.max(v);
            }
            best = best.max(upper / lower);
        }
        Ok(ExtReal(if best > opts.cap { f64::INFINITY } else { best }))
    }
}

/// Sampling knobs for [`MeanFamily::m_star`].
#[derive(Debug, Clone, Copy)]
pub struct MStarOptions {
    pub grid: usize,
    pub resolution: usize,
    pub cap: f64,
}

impl Default for MStarOptions {
    fn default() -> Self {
        MStarOptions {
            grid: 9,
            resolution: 64,
            cap: 1e6,
        }
    }
}

/// `[lower(x), upper(x)]`, the range of `t ↦ m(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
}

fn quasi_arithmetic_value(phi: &ScalarFunction, x: &[f64], t: &[f64]) -> Result<f64> {
    let (lo, hi) = range(x);
    if hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(1.0) {
        return Ok(x[0]);
    }
    let target: f64 = t.iter().zip(x).map(|(ti, &xi)| ti * phi.value(xi)).sum();
    invert_monotone(|u| phi.value(u), target, lo, hi, RootOptions::default()).map_err(|e| match e {
        Error::Numeric(msg) => Error::numeric(format!(
            "inverting {} at {target} on [{lo}, {hi}]: {msg}",
            phi.label()
        )),
        other => other,
    })
}

/// Whether `t` is admissible for `fam`, as a typed error.
pub fn check_parameter(fam: &MeanFamily, t: &Parameter) -> Result<()> {
    if fam.carrier().contains(t) {
        Ok(())
    } else {
        Err(Error::input(format!("parameter {t:?} outside {:?}", fam.carrier())))
    }
}
