//! JSON descriptors for functions, pairs, families, measures and means.
//!
//! Descriptors are plain data; `build` validates them and produces the
//! library objects. Serializing a descriptor and building it again gives
//! the same object.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::families::{MeanFamily, WeightFn};
use crate::means::GeneralizedMean;
use crate::measures::{Parameter, ProbabilityMeasure};
use crate::scalarfn::{ChebyshevPair, ScalarFunction, VerificationGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Power { p: f64 },
    LogPower { p: f64 },
    Log,
    Exp,
    Identity,
    Affine { a: f64, b: f64 },
    Const { c: f64 },
    Sin,
    Cos,
}

impl FunctionSpec {
    pub fn build(&self) -> Result<ScalarFunction> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::input(format!("function parameter {name} must be finite")))
            }
        };
        Ok(match *self {
            FunctionSpec::Power { p } => ScalarFunction::power(finite(p, "p")?),
            FunctionSpec::LogPower { p } => ScalarFunction::log_power(finite(p, "p")?),
            FunctionSpec::Log => ScalarFunction::log(),
            FunctionSpec::Exp => ScalarFunction::exp(),
            FunctionSpec::Identity => ScalarFunction::identity(),
            FunctionSpec::Affine { a, b } => ScalarFunction::affine(finite(a, "a")?, finite(b, "b")?),
            FunctionSpec::Const { c } => ScalarFunction::constant(finite(c, "c")?),
            FunctionSpec::Sin => ScalarFunction::sin(),
            FunctionSpec::Cos => ScalarFunction::cos(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    /// The Gini pair of exponents `(p, q)` on `(0, inf)`.
    Gini { p: f64, q: f64 },
    /// `(phi, 1)`.
    QuasiArithmetic { phi: FunctionSpec },
    /// An arbitrary pair, verified to be a Chebyshev system on `interval`.
    Custom {
        f: FunctionSpec,
        g: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<Interval>,
    },
}

impl PairSpec {
    pub fn build(&self) -> Result<ChebyshevPair> {
        match self {
            PairSpec::Gini { p, q } => {
                if !(p.is_finite() && q.is_finite()) {
                    return Err(Error::input("Gini exponents must be finite"));
                }
                Ok(ChebyshevPair::gini(*p, *q))
            }
            PairSpec::QuasiArithmetic { phi } => ChebyshevPair::quasi_arithmetic(phi.build()?),
            PairSpec::Custom { f, g, interval } => {
                let (f, g) = (f.build()?, g.build()?);
                let domain = match interval {
                    Some(i) => *i,
                    None => f.domain().intersect(&g.domain())?,
                };
                ChebyshevPair::verified(f, g, domain, &VerificationGrid::for_domain(&domain))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Coordinates { d: usize },
    /// `s x_1 + (1 - s) x_2`, `s` in `[0, 1]`.
    Segment,
    /// `λ_1(s) x_1 + .. + λ_d(s) x_d`, `s` in `[0, 1]`.
    WeightedArithmetic { weights: Vec<FunctionSpec> },
    ConstantArithmetic { d: usize },
    QuasiArithmetic { phi: FunctionSpec, d: usize },
    HolderPath { d: usize, exponents: Vec<f64> },
}

impl FamilySpec {
    pub fn build(&self) -> Result<MeanFamily> {
        match self {
            FamilySpec::Coordinates { d } => MeanFamily::coordinates(*d),
            FamilySpec::Segment => Ok(MeanFamily::segment()),
            FamilySpec::WeightedArithmetic { weights } => {
                let lambdas = weights
                    .iter()
                    .map(|w| {
                        let f = w.build()?;
                        Ok(Arc::new(move |s: f64| f.value(s)) as WeightFn)
                    })
                    .collect::<Result<Vec<_>>>()?;
                MeanFamily::weighted_arithmetic(lambdas)
            }
            FamilySpec::ConstantArithmetic { d } => MeanFamily::constant_arithmetic(*d),
            FamilySpec::QuasiArithmetic { phi, d } => MeanFamily::quasi_arithmetic(phi.build()?, *d),
            FamilySpec::HolderPath { d, exponents } => MeanFamily::holder_path(*d, exponents),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// Weighted atoms `(t, w)`.
    Atoms { atoms: Vec<(Parameter, f64)> },
    /// Uniform weights on `{1, .., n}`.
    UniformIndices { n: usize },
    /// Lebesgue measure on `[0, 1]`, `n` Gauss-Legendre nodes.
    Uniform01 {
        #[serde(default = "default_nodes")]
        n: usize,
    },
    /// Normalized density on `[0, 1]`.
    Density01 {
        density: FunctionSpec,
        #[serde(default = "default_nodes")]
        n: usize,
    },
    /// Normalized Lebesgue measure on the simplex of `R^d`.
    Simplex {
        d: usize,
        #[serde(default = "default_simplex_resolution")]
        resolution: usize,
    },
    Dirac { t: Parameter },
    /// `(1 - γ) δ_{t0} + γ ν`.
    DiracMixture { t0: Parameter, gamma: f64, nu: Box<MeasureSpec> },
}

fn default_nodes() -> usize {
    64
}

fn default_simplex_resolution() -> usize {
    24
}

impl MeasureSpec {
    pub fn build(&self) -> Result<ProbabilityMeasure> {
        match self {
            MeasureSpec::Atoms { atoms } => ProbabilityMeasure::atoms(atoms.clone()),
            MeasureSpec::UniformIndices { n } => ProbabilityMeasure::uniform_indices(*n),
            MeasureSpec::Uniform01 { n } => ProbabilityMeasure::uniform01(*n),
            MeasureSpec::Density01 { density, n } => {
                let f = density.build()?;
                ProbabilityMeasure::density01(|s| f.value(s), *n)
            }
            MeasureSpec::Simplex { d, resolution } => ProbabilityMeasure::simplex_uniform(*d, *resolution),
            MeasureSpec::Dirac { t } => Ok(ProbabilityMeasure::dirac(t.clone())),
            MeasureSpec::DiracMixture { t0, gamma, nu } => {
                ProbabilityMeasure::dirac_mixture(t0.clone(), *gamma, &nu.build()?)
            }
        }
    }
}

/// A generalized mean: pair, family and measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanSpec {
    pub pair: PairSpec,
    pub family: FamilySpec,
    pub measure: MeasureSpec,
}

impl MeanSpec {
    pub fn build(&self) -> Result<GeneralizedMean> {
        GeneralizedMean::new(self.pair.build()?, self.family.build()?, self.measure.build()?)
    }

    pub fn gini(p: f64, q: f64, family: FamilySpec, measure: MeasureSpec) -> Self {
        MeanSpec {
            pair: PairSpec::Gini { p, q },
            family,
            measure,
        }
    }
}
