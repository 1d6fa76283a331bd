//! Probability measures on the supported parameter spaces.
//!
//! Every measure is stored as a finite list of weighted nodes: exact atoms
//! for discrete measures, a quadrature rule for densities on `[0, 1]` and for
//! the normalized Lebesgue measure on the simplex. A parameter is a slice of
//! reals (`[i]` for an index, `[s]` for a point of `[0, 1]`, `[t1, .., td]`
//! for a point of the simplex).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{simplex_rule, unit_interval_rule};

pub type Parameter = Vec<f64>;

/// Parameter spaces a family can be indexed by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Carrier {
    /// `{1, .., n}`.
    Indices { n: usize },
    /// `[0, 1]`.
    UnitInterval,
    /// `{t in [0,1]^d : t1 + .. + td = 1}`.
    Simplex { d: usize },
    /// A finite set of reals.
    Points { points: Vec<f64> },
}

impl Carrier {
    pub fn contains(&self, t: &[f64]) -> bool {
        match self {
            Carrier::Indices { n } => {
                t.len() == 1 && t[0].fract() == 0.0 && t[0] >= 1.0 && t[0] <= *n as f64
            }
            Carrier::UnitInterval => t.len() == 1 && (0.0..=1.0).contains(&t[0]),
            Carrier::Simplex { d } => {
                t.len() == *d
                    && t.iter().all(|&v| v >= -1e-12 && v <= 1.0 + 1e-12)
                    && (t.iter().sum::<f64>() - 1.0).abs() <= 1e-9
            }
            Carrier::Points { points } => t.len() == 1 && points.contains(&t[0]),
        }
    }

    /// Parameters used when an infimum or supremum over the carrier is needed.
    ///
    /// Finite carriers are enumerated. `[0, 1]` is sampled at `resolution + 1`
    /// equispaced points, the simplex on a barycentric lattice that includes
    /// its vertices.
    pub fn sample(&self, resolution: usize) -> Vec<Parameter> {
        match self {
            Carrier::Indices { n } => (1..=*n).map(|i| vec![i as f64]).collect(),
            Carrier::Points { points } => points.iter().map(|&p| vec![p]).collect(),
            Carrier::UnitInterval => {
                let k = resolution.max(1);
                (0..=k).map(|i| vec![i as f64 / k as f64]).collect()
            }
            Carrier::Simplex { d } => {
                let k = match d {
                    2 => resolution.max(1),
                    3 => resolution.clamp(1, 16),
                    4 => resolution.clamp(1, 8),
                    _ => resolution.clamp(1, 4),
                };
                let mut out = Vec::new();
                let mut counts = vec![0usize; *d];
                lattice(&mut counts, 0, k, &mut out);
                out
            }
        }
    }
}

fn lattice(counts: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<Parameter>) {
    let d = counts.len();
    if pos + 1 == d {
        counts[pos] = left;
        let k: usize = counts.iter().sum();
        out.push(counts.iter().map(|&c| c as f64 / k as f64).collect());
        return;
    }
    for c in 0..=left {
        counts[pos] = c;
        lattice(counts, pos + 1, left - c, out);
    }
}

/// A probability measure given by weighted nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    nodes: Vec<Parameter>,
    weights: Vec<f64>,
    label: String,
}

impl ProbabilityMeasure {
    /// Discrete measure; weights must be nonnegative and sum to one within 1e-9.
    /// The weights are rescaled to an exact unit sum.
    pub fn atoms(atoms: Vec<(Parameter, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::input("a discrete measure needs at least one atom"));
        }
        if let Some((t, w)) = atoms.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::input(format!("atom at {t:?} has invalid weight {w}")));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("atom weights sum to {total}, expected 1")));
        }
        let (nodes, weights): (Vec<_>, Vec<_>) = atoms
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(t, w)| (t, w / total))
            .unzip();
        let label = format!("atoms({})", nodes.len());
        Ok(ProbabilityMeasure { nodes, weights, label })
    }

    /// Discrete measure on scalar parameters.
    pub fn scalar_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::atoms(atoms.iter().map(|&(t, w)| (vec![t], w)).collect())
    }

    /// `(δ_1 + .. + δ_n) / n` on `{1, .., n}`.
    pub fn uniform_indices(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("uniform measure on an empty index set"));
        }
        let w = 1.0 / n as f64;
        let mut m = Self::atoms((1..=n).map(|i| (vec![i as f64], w)).collect())?;
        m.label = format!("uniform{{1..{n}}}");
        Ok(m)
    }

    pub fn dirac(t: Parameter) -> Self {
        ProbabilityMeasure {
            label: format!("dirac({t:?})"),
            nodes: vec![t],
            weights: vec![1.0],
        }
    }

    /// Lebesgue measure on `[0, 1]` with an `n`-node Gauss–Legendre rule.
    pub fn uniform01(n: usize) -> Result<Self> {
        let rule = unit_interval_rule(n)?;
        Ok(ProbabilityMeasure {
            nodes: rule.nodes,
            weights: rule.weights,
            label: format!("uniform01({n})"),
        })
    }

    /// Measure with density proportional to `density` on `[0, 1]`, integrated
    /// with an `n`-node Gauss–Legendre rule and normalized by the same rule.
    pub fn density01<F: Fn(f64) -> f64>(density: F, n: usize) -> Result<Self> {
        let rule = unit_interval_rule(n)?;
        let mut weights = Vec::with_capacity(rule.len());
        for (node, w) in rule.nodes.iter().zip(&rule.weights) {
            let rho = density(node[0]);
            if !(rho.is_finite() && rho >= 0.0) {
                return Err(Error::evaluation(format!("t = {}", node[0]), format!("density value {rho}")));
            }
            weights.push(w * rho);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::input("density integrates to zero"));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(ProbabilityMeasure {
            nodes: rule.nodes,
            weights,
            label: format!("density01({n})"),
        })
    }

    /// Normalized Lebesgue measure on the simplex `S_d`.
    pub fn simplex_uniform(d: usize, resolution: usize) -> Result<Self> {
        let rule = simplex_rule(d, resolution)?;
        Ok(ProbabilityMeasure {
            nodes: rule.nodes,
            weights: rule.weights,
            label: format!("simplex({d},{resolution})"),
        })
    }

    /// `(1 - γ) δ_{t0} + γ ν`. Zero-weight parts are dropped.
    pub fn dirac_mixture(t0: Parameter, gamma: f64, nu: &ProbabilityMeasure) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::input(format!("mixture weight {gamma} outside [0, 1]")));
        }
        let mut nodes = Vec::with_capacity(nu.len() + 1);
        let mut weights = Vec::with_capacity(nu.len() + 1);
        if gamma < 1.0 {
            nodes.push(t0.clone());
            weights.push(1.0 - gamma);
        }
        if gamma > 0.0 {
            for (t, w) in nu.nodes.iter().zip(&nu.weights) {
                nodes.push(t.clone());
                weights.push(gamma * w);
            }
        }
        Ok(ProbabilityMeasure {
            nodes,
            weights,
            label: format!("(1-{gamma})·dirac({t0:?}) + {gamma}·{}", nu.label),
        })
    }

    pub fn nodes(&self) -> &[Parameter] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `∫ φ dμ`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, phi: F) -> Result<f64> {
        self.try_integrate(|t| Ok(phi(t)))
    }

    /// `∫ φ dμ` for a fallible integrand; the first failing node is reported.
    pub fn try_integrate<F: Fn(&[f64]) -> Result<f64>>(&self, phi: F) -> Result<f64> {
        let mut acc = 0.0;
        for (k, (t, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = phi(t)?;
            if !v.is_finite() {
                return Err(Error::evaluation(format!("node {k} (t = {t:?})"), format!("integrand value {v}")));
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// `⟨φ, ψ⟩_μ = ∫ φ ψ dμ`.
    pub fn bracket<F, G>(&self, phi: F, psi: G) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64,
        G: Fn(&[f64]) -> f64,
    {
        self.integrate(|t| phi(t) * psi(t))
    }

    /// Whether every node lies in `carrier`.
    pub fn check_carrier(&self, carrier: &Carrier) -> Result<()> {
        match self.nodes.iter().find(|t| !carrier.contains(t)) {
            None => Ok(()),
            Some(t) => Err(Error::input(format!("measure node {t:?} is outside the carrier {carrier:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrate_examples() {
        let two = ProbabilityMeasure::scalar_atoms(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(two.integrate(|t| t[0]).unwrap(), 0.5);
        let u = ProbabilityMeasure::uniform01(32).unwrap();
        assert_relative_eq!(u.integrate(|t| t[0] * t[0]).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        let d = ProbabilityMeasure::dirac(vec![0.3]);
        assert_eq!(d.integrate(|t| (t[0] * 7.0).sin()).unwrap(), (2.1f64).sin());
    }

    #[test]
    fn integrate_reports_node() {
        let u = ProbabilityMeasure::scalar_atoms(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let err = u.integrate(|t| 1.0 / t[0]).unwrap_err();
        match err {
            Error::Evaluation { location, .. } => assert!(location.contains("node 0")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bracket_examples() {
        let u = ProbabilityMeasure::uniform01(64).unwrap();
        assert_relative_eq!(u.bracket(|t| t[0], |t| 1.0 - t[0]).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(u.bracket(|_| 1.0, |_| 1.0).unwrap(), 1.0, epsilon = 1e-12);
        let second = u.bracket(|t| t[0], |t| t[0]).unwrap();
        let first = u.bracket(|t| t[0], |_| 1.0).unwrap();
        assert_relative_eq!(second - first * first, 1.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn mixture_examples() {
        let nu = ProbabilityMeasure::dirac(vec![1.0]);
        let m0 = ProbabilityMeasure::dirac_mixture(vec![0.0], 0.0, &nu).unwrap();
        assert_eq!(m0.nodes(), &[vec![0.0]]);
        let m1 = ProbabilityMeasure::dirac_mixture(vec![0.0], 1.0, &nu).unwrap();
        assert_eq!(m1.nodes(), nu.nodes());
        let m = ProbabilityMeasure::dirac_mixture(vec![0.0], 0.25, &nu).unwrap();
        assert_eq!(m.nodes(), &[vec![0.0], vec![1.0]]);
        assert_eq!(m.weights(), &[0.75, 0.25]);
        assert!(ProbabilityMeasure::dirac_mixture(vec![0.0], 1.5, &nu).unwrap_err().is_input());
    }

    #[test]
    fn simplex_examples() {
        let s2 = ProbabilityMeasure::simplex_uniform(2, 128).unwrap();
        assert_relative_eq!(s2.integrate(|t| t[0]).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(s2.integrate(|t| t[0] * t[0]).unwrap(), 1.0 / 3.0, epsilon = 1e-6);
        let s3 = ProbabilityMeasure::simplex_uniform(3, 16).unwrap();
        assert_relative_eq!(s3.integrate(|t| t[0]).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(s3.integrate(|t| t[2]).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        assert!(s3.nodes().iter().all(|t| Carrier::Simplex { d: 3 }.contains(t)));
        assert!(ProbabilityMeasure::simplex_uniform(1, 8).unwrap_err().is_input());
    }

    #[test]
    fn atoms_validate() {
        assert!(ProbabilityMeasure::scalar_atoms(&[(0.0, 0.5)]).unwrap_err().is_input());
        assert!(ProbabilityMeasure::scalar_atoms(&[(0.0, 1.5), (1.0, -0.5)]).unwrap_err().is_input());
    }

    #[test]
    fn density_is_normalized() {
        let m = ProbabilityMeasure::density01(|t| 2.0 * t, 64).unwrap();
        assert_relative_eq!(m.total_mass(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(m.integrate(|t| t[0]).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn carrier_samples() {
        assert_eq!(Carrier::Indices { n: 3 }.sample(10).len(), 3);
        assert_eq!(Carrier::UnitInterval.sample(4), vec![vec![0.0], vec![0.25], vec![0.5], vec![0.75], vec![1.0]]);
        let s = Carrier::Simplex { d: 3 }.sample(2);
        assert_eq!(s.len(), 6);
        assert!(s.contains(&vec![1.0, 0.0, 0.0]));
    }
}
