//! Derivatives of generalized means on the diagonal and the mixture limit.
//!
//! At a diagonal point `(x, .., x)` the partials of `M_{f,g,m;μ}` depend on
//! the pair only through `∂₁²D(x,x) / ∂₁D(x,x)`:
//!
//! ```text
//! ∂_i M     = ⟨∂_i m, 1⟩
//! ∂_i ∂_j M = (⟨∂_i m, ∂_j m⟩ - ⟨∂_i m, 1⟩⟨∂_j m, 1⟩) · ratio + ⟨∂_i ∂_j m, 1⟩
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::MeanFamily;
use crate::means::GeneralizedMean;
use crate::measures::{Parameter, ProbabilityMeasure};
use crate::roots::RootOptions;
use crate::scalarfn::{ChebyshevPair, Regularity, ScalarFunction};

pub type Matrix = Vec<Vec<f64>>;

/// Gradient and Hessian of a mean at `(x, .., x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalDerivatives {
    pub point: f64,
    pub gradient: Vec<f64>,
    pub hessian: Matrix,
}

/// Brackets of the family partials at a diagonal point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMoments {
    /// `⟨∂_i m, 1⟩`.
    pub first: Vec<f64>,
    /// `⟨∂_i m - ⟨∂_i m, 1⟩, ∂_j m - ⟨∂_j m, 1⟩⟩`, the Gram matrix of the
    /// centered partials.
    pub gram: Matrix,
    /// `⟨∂_i ∂_j m, 1⟩`.
    pub second: Matrix,
}

fn zeros(d: usize) -> Matrix {
    vec![vec![0.0; d]; d]
}

/// `∫ φ(m(x, t)) dμ(t)`.
pub fn phi_integral(phi: &ScalarFunction, fam: &MeanFamily, mu: &ProbabilityMeasure, x: &[f64]) -> Result<f64> {
    fam.check_point(x)?;
    mu.try_integrate(|t| Ok(phi.value(fam.eval(x, t)?)))
}

/// `∂_i Φ(x) = ∫ φ'(m(x, t)) ∂_i m(x, t) dμ(t)`.
pub fn phi_gradient(phi: &ScalarFunction, fam: &MeanFamily, mu: &ProbabilityMeasure, x: &[f64]) -> Result<Vec<f64>> {
    fam.check_point(x)?;
    (0..fam.arity())
        .map(|i| mu.try_integrate(|t| Ok(phi.deriv1(fam.eval(x, t)?)? * fam.partial1(x, t, i)?)))
        .collect()
}

/// `∂_i ∂_j Φ(x) = ∫ [φ''(m) ∂_i m ∂_j m + φ'(m) ∂_i ∂_j m] dμ`.
pub fn phi_hessian(phi: &ScalarFunction, fam: &MeanFamily, mu: &ProbabilityMeasure, x: &[f64]) -> Result<Matrix> {
    fam.check_point(x)?;
    let d = fam.arity();
    let mut h = zeros(d);
    for i in 0..d {
        for j in i..d {
            let v = mu.try_integrate(|t| {
                let m = fam.eval(x, t)?;
                Ok(phi.deriv2(m)? * fam.partial1(x, t, i)? * fam.partial1(x, t, j)?
                    + phi.deriv1(m)? * fam.partial2(x, t, i, j)?)
            })?;
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    Ok(h)
}

/// First moments of the partials at `(x, .., x)`.
pub fn diagonal_first_moments(fam: &MeanFamily, mu: &ProbabilityMeasure, x: f64) -> Result<Vec<f64>> {
    let diag = vec![x; fam.arity()];
    fam.check_point(&diag)?;
    (0..fam.arity())
        .map(|i| mu.try_integrate(|t| fam.partial1(&diag, t, i)))
        .collect()
}

/// All brackets entering the diagonal second derivatives.
pub fn diagonal_moments(fam: &MeanFamily, mu: &ProbabilityMeasure, x: f64) -> Result<DiagonalMoments> {
    let d = fam.arity();
    let diag = vec![x; d];
    let first = diagonal_first_moments(fam, mu, x)?;
    let mut gram = zeros(d);
    let mut second = zeros(d);
    for i in 0..d {
        for j in i..d {
            let g = mu.try_integrate(|t| {
                Ok((fam.partial1(&diag, t, i)? - first[i]) * (fam.partial1(&diag, t, j)? - first[j]))
            })?;
            let s = mu.try_integrate(|t| fam.partial2(&diag, t, i, j))?;
            gram[i][j] = g;
            gram[j][i] = g;
            second[i][j] = s;
            second[j][i] = s;
        }
    }
    Ok(DiagonalMoments { first, gram, second })
}

/// `∂_i M(x, .., x) = ⟨∂_i m, 1⟩`; valid for every pair of class C1.
pub fn mean_diag_gradient(mean: &GeneralizedMean, x: f64) -> Result<Vec<f64>> {
    if mean.pair().regularity() < Regularity::C1 {
        return Err(Error::capability(format!("{} is not of class C1", mean.pair().label())));
    }
    mean.domain().check(x, "x")?;
    diagonal_first_moments(mean.family(), mean.measure(), x)
}

/// Gradient and Hessian at `(x, .., x)` from the bracket formulas.
pub fn mean_diag_derivatives(mean: &GeneralizedMean, x: f64) -> Result<DiagonalDerivatives> {
    if mean.pair().regularity() < Regularity::C2 {
        return Err(Error::capability(format!("{} is not of class C2", mean.pair().label())));
    }
    mean.domain().check(x, "x")?;
    let ratio = mean.pair().diag_d2_over_d1(x)?;
    let mom = diagonal_moments(mean.family(), mean.measure(), x)?;
    let d = mom.first.len();
    let mut hessian = zeros(d);
    for i in 0..d {
        for j in 0..d {
            hessian[i][j] = mom.gram[i][j] * ratio + mom.second[i][j];
        }
    }
    Ok(DiagonalDerivatives {
        point: x,
        gradient: mom.first,
        hessian,
    })
}

/// Central-difference gradient of the implicitly evaluated mean at
/// `(x, .., x)`, step `1e-5 · max(1, |x|)`.
pub fn fd_diag_gradient(mean: &GeneralizedMean, x: f64) -> Result<Vec<f64>> {
    let d = mean.arity();
    let h = 1e-5 * x.abs().max(1.0);
    (0..d)
        .map(|i| {
            let mut xp = vec![x; d];
            let mut xm = vec![x; d];
            xp[i] += h;
            xm[i] -= h;
            Ok((mean.eval_implicit(&xp)? - mean.eval_implicit(&xm)?) / (2.0 * h))
        })
        .collect()
}

/// Central second differences at `(x, .., x)`, step `1e-3 · max(1, |x|)`.
pub fn fd_diag_hessian(mean: &GeneralizedMean, x: f64) -> Result<Matrix> {
    let d = mean.arity();
    let h = 1e-3 * x.abs().max(1.0);
    let at = |shifts: &[(usize, f64)]| -> Result<f64> {
        let mut p = vec![x; d];
        for &(i, s) in shifts {
            p[i] += s;
        }
        mean.eval_implicit(&p)
    };
    let centre = at(&[])?;
    let mut out = zeros(d);
    for i in 0..d {
        out[i][i] = (at(&[(i, h)])? - 2.0 * centre + at(&[(i, -h)])?) / (h * h);
        for j in i + 1..d {
            let v = (at(&[(i, h), (j, h)])? - at(&[(i, h), (j, -h)])? - at(&[(i, -h), (j, h)])?
                + at(&[(i, -h), (j, -h)])?)
                / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Difference quotients of the mixture means against their predicted limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureLimit {
    /// `m(x, t0)`.
    pub base: f64,
    pub gammas: Vec<f64>,
    /// `(M_{μ_γ}(x) - m(x, t0)) / γ` with `μ_γ = (1 - γ) δ_{t0} + γ ν`.
    pub quotients: Vec<f64>,
    /// `∫ D(m(x, t), m(x, t0)) dν(t) / ∂₁D(m(x, t0), m(x, t0))`.
    pub prediction: f64,
    /// `|quotient - prediction|` per γ.
    pub deviations: Vec<f64>,
}

/// `γ_k = 2^{-k}`, `k = 1..=20`.
pub fn default_gammas() -> Vec<f64> {
    (1..=20).map(|k| 0.5f64.powi(k)).collect()
}

/// Evaluates the mixture quotients for each `γ` and the predicted limit.
pub fn lemma2_limit(
    pair: &ChebyshevPair,
    fam: &MeanFamily,
    t0: &Parameter,
    nu: &ProbabilityMeasure,
    x: &[f64],
    gammas: &[f64],
) -> Result<MixtureLimit> {
    if pair.regularity() < Regularity::C1 {
        return Err(Error::capability(format!("{} is not of class C1", pair.label())));
    }
    if gammas.is_empty() {
        return Err(Error::input("empty γ sequence"));
    }
    if gammas.iter().any(|g| !(*g > 0.0 && *g <= 1.0)) || gammas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::input("γ values must be strictly decreasing in (0, 1]"));
    }
    crate::families::check_parameter(fam, t0)?;
    nu.check_carrier(fam.carrier())?;
    fam.check_point(x)?;
    let base = fam.eval(x, t0)?;
    pair.domain().check(base, "m(x, t0)")?;

    let w = pair.wronskian(base)?;
    if w == 0.0 || !w.is_finite() {
        return Err(Error::Degenerate(format!("Wronskian vanishes at m(x, t0) = {base}")));
    }
    let num = nu.try_integrate(|t| Ok(pair.determinant(fam.eval(x, t)?, base)?))?;
    let prediction = num / w;

    let mut quotients = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let mu = ProbabilityMeasure::dirac_mixture(t0.clone(), g, nu)?;
        let mean = GeneralizedMean::new(pair.clone(), fam.clone(), mu)?.with_root_options(RootOptions::full_precision());
        quotients.push((mean.eval_implicit(x)? - base) / g);
    }
    let deviations = quotients.iter().map(|q| (q - prediction).abs()).collect();
    Ok(MixtureLimit {
        base,
        gammas: gammas.to_vec(),
        quotients,
        prediction,
        deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform() -> ProbabilityMeasure {
        ProbabilityMeasure::uniform01(64).unwrap()
    }

    fn coords2() -> (MeanFamily, ProbabilityMeasure) {
        (MeanFamily::coordinates(2).unwrap(), ProbabilityMeasure::uniform_indices(2).unwrap())
    }

    #[test]
    fn phi_integral_examples() {
        let (c, u2) = coords2();
        assert_relative_eq!(phi_integral(&ScalarFunction::identity(), &c, &u2, &[1.0, 3.0]).unwrap(), 2.0);
        let sq = ScalarFunction::new(crate::domain::Interval::real_line(), "x^2", |x| x * x)
            .with_deriv1(|x| 2.0 * x)
            .with_deriv2(|_| 2.0);
        let seg = MeanFamily::segment();
        assert_relative_eq!(phi_integral(&sq, &seg, &uniform(), &[0.0, 1.0]).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(phi_integral(&ScalarFunction::constant(1.0), &seg, &uniform(), &[4.0, -2.0]).unwrap(), 1.0, epsilon = 1e-14);

        let g = phi_gradient(&ScalarFunction::identity(), &seg, &uniform(), &[3.0, 7.0]).unwrap();
        assert_relative_eq!(g[0], 0.5, epsilon = 1e-14);
        assert_eq!(phi_gradient(&ScalarFunction::constant(2.0), &c, &u2, &[1.0, 3.0]).unwrap(), vec![0.0, 0.0]);
        assert_relative_eq!(phi_gradient(&sq, &c, &u2, &[1.0, 3.0]).unwrap()[1], 3.0);

        let h = phi_hessian(&ScalarFunction::affine(3.0, 1.0), &seg, &uniform(), &[1.0, 2.0]).unwrap();
        assert!(h.iter().flatten().all(|&v| v == 0.0));
        assert_relative_eq!(phi_hessian(&sq, &seg, &uniform(), &[1.0, 2.0]).unwrap()[0][0], 2.0 / 3.0, epsilon = 1e-14);
        assert_eq!(phi_hessian(&sq, &c, &u2, &[1.0, 3.0]).unwrap()[0][1], 0.0);
    }

    #[test]
    fn phi_derivatives_match_finite_differences() {
        let fam = MeanFamily::quasi_arithmetic(ScalarFunction::log(), 3).unwrap();
        let mu = ProbabilityMeasure::simplex_uniform(3, 8).unwrap();
        let phi = ScalarFunction::power(1.7);
        let x = [0.8, 1.4, 2.1];
        let g = phi_gradient(&phi, &fam, &mu, &x).unwrap();
        let h = phi_hessian(&phi, &fam, &mu, &x).unwrap();
        for i in 0..3 {
            let s = 1e-5;
            let mut xp = x;
            let mut xm = x;
            xp[i] += s;
            xm[i] -= s;
            let fd = (phi_integral(&phi, &fam, &mu, &xp).unwrap() - phi_integral(&phi, &fam, &mu, &xm).unwrap()) / (2.0 * s);
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0));
            let gp = phi_gradient(&phi, &fam, &mu, &xp).unwrap();
            let gm = phi_gradient(&phi, &fam, &mu, &xm).unwrap();
            for j in 0..3 {
                let fd2 = (gp[j] - gm[j]) / (2.0 * s);
                assert!((fd2 - h[j][i]).abs() <= 1e-4 * h[j][i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn diagonal_examples() {
        let seg = GeneralizedMean::gini(2.0, 0.0, MeanFamily::segment(), uniform()).unwrap();
        let dd = mean_diag_derivatives(&seg, 1.0).unwrap();
        assert_relative_eq!(dd.gradient[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(dd.gradient[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(dd.hessian[0][0], 1.0 / 12.0, epsilon = 1e-14);
        for row in &dd.hessian {
            assert!(row.iter().sum::<f64>().abs() < 1e-14);
        }

        let c3 = GeneralizedMean::gini(
            1.0,
            -1.0,
            MeanFamily::coordinates(3).unwrap(),
            ProbabilityMeasure::uniform_indices(3).unwrap(),
        )
        .unwrap();
        for g in mean_diag_gradient(&c3, 2.0).unwrap() {
            assert_relative_eq!(g, 1.0 / 3.0, epsilon = 1e-15);
        }

        // H_2 at (1, 1): ∂₁∂₁ = 1/4
        let (c, u2) = coords2();
        let h2 = GeneralizedMean::gini(2.0, 0.0, c, u2).unwrap();
        assert_relative_eq!(mean_diag_derivatives(&h2, 1.0).unwrap().hessian[0][0], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn formulas_match_finite_differences() {
        let means = [
            GeneralizedMean::gini(2.0, -0.5, MeanFamily::segment(), uniform()).unwrap(),
            GeneralizedMean::gini(
                0.5,
                0.5,
                MeanFamily::quasi_arithmetic(ScalarFunction::log(), 3).unwrap(),
                ProbabilityMeasure::simplex_uniform(3, 8).unwrap(),
            )
            .unwrap(),
            GeneralizedMean::gini(
                -1.0,
                1.5,
                MeanFamily::holder_path(2, &[-1.0, 0.0, 2.0]).unwrap(),
                ProbabilityMeasure::scalar_atoms(&[(-1.0, 0.2), (0.0, 0.3), (2.0, 0.5)]).unwrap(),
            )
            .unwrap(),
        ];
        for m in &means {
            let x = 1.7;
            let dd = mean_diag_derivatives(m, x).unwrap();
            let fg = fd_diag_gradient(m, x).unwrap();
            let fh = fd_diag_hessian(m, x).unwrap();
            assert!((dd.gradient.iter().sum::<f64>() - 1.0).abs() < 1e-8);
            for i in 0..m.arity() {
                assert!((dd.gradient[i] - fg[i]).abs() <= 1e-5 * dd.gradient[i].abs().max(1.0));
                for j in 0..m.arity() {
                    assert!((dd.hessian[i][j] - fh[i][j]).abs() <= 1e-3, "{:?} vs {:?}", dd.hessian, fh);
                }
            }
        }
    }

    #[test]
    fn lemma2_examples() {
        let lin = ChebyshevPair::new(ScalarFunction::identity(), ScalarFunction::constant(1.0)).unwrap();
        let seg = MeanFamily::segment();
        let nu = ProbabilityMeasure::scalar_atoms(&[(0.3, 0.5), (0.9, 0.5)]).unwrap();
        let r = lemma2_limit(&lin, &seg, &vec![0.0], &nu, &[1.0, 3.0], &default_gammas()).unwrap();
        // ∫ m dν - m(x, 0) = (0.3·1 + 0.7·3 + 0.9·1 + 0.1·3)/2 - 3 = -1.2
        assert_relative_eq!(r.prediction, -1.2, epsilon = 1e-14);
        for q in &r.quotients {
            assert_relative_eq!(*q, -1.2, epsilon = 1e-9);
        }

        let same = ProbabilityMeasure::dirac(vec![0.0]);
        let r = lemma2_limit(&lin, &seg, &vec![0.0], &same, &[1.0, 3.0], &default_gammas()).unwrap();
        assert_eq!(r.prediction, 0.0);

        let bj = ChebyshevPair::new(ScalarFunction::power(2.0), ScalarFunction::power(1.0)).unwrap();
        let one = ProbabilityMeasure::dirac(vec![1.0]);
        let r = lemma2_limit(&bj, &seg, &vec![0.0], &one, &[1.0, 3.0], &default_gammas()).unwrap();
        assert_relative_eq!(r.prediction, -2.0 / 3.0, epsilon = 1e-15);
        // M_γ = (9 - 8γ)/(3 - 2γ), so the quotient is -2/(3 - 2γ)
        for (g, q) in r.gammas.iter().zip(&r.quotients) {
            assert_relative_eq!(*q, -2.0 / (3.0 - 2.0 * g), epsilon = 1e-9);
        }
        assert!(*r.deviations.last().unwrap() < 1e-4);
    }
}
