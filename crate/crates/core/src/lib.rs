//! Generalized Bajraktarević means `M(x)`, defined as the root `y` of
//! `∫ D(m(x, t), y) dμ(t) = 0` with `D(x, y) = f(x) g(y) - f(y) g(x)`, together
//! with their diagonal derivatives and local and global comparison criteria.

pub mod calculus;
pub mod compare;
pub mod descriptor;
pub mod domain;
pub mod error;
pub mod exec;
pub mod extreal;
pub mod families;
pub mod harness;
pub mod means;
pub mod measures;
pub mod quadrature;
pub mod roots;
pub mod scalarfn;

pub use compare::{ComparisonVerdict, Status, Tolerances, Witness};
pub use descriptor::{FamilySpec, FunctionSpec, MeanSpec, MeasureSpec, PairSpec};
pub use domain::Interval;
pub use error::{Error, Result};
pub use exec::Execution;
pub use extreal::ExtReal;
pub use families::MeanFamily;
pub use means::GeneralizedMean;
pub use measures::ProbabilityMeasure;
pub use scalarfn::{ChebyshevPair, PairTransform, ScalarFunction};
