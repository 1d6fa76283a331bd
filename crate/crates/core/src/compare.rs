//! Local and global comparison of generalized means.
//!
//! Every engine returns a [`ComparisonVerdict`]. `Fails` always carries a
//! witness at which the tested condition is violated; `Inconclusive` is used
//! where the criteria leave a genuine gap (a singular semidefinite second
//! order matrix, equal Gini exponent sums) or where two equivalent routes
//! disagree near a boundary.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::calculus::{diagonal_moments, mean_diag_derivatives, Matrix};
use crate::domain::{Interval, WindowOptions};
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Execution};
use crate::extreal::serialize_f64;
use crate::families::MeanFamily;
use crate::means::GeneralizedMean;
use crate::measures::ProbabilityMeasure;
use crate::scalarfn::{delta_gini_unchecked, ChebyshevPair, ScalarFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

/// Where a condition was found violated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A point of `I^d`, with the offending coordinate when relevant (1-based).
    Point { x: Vec<f64>, coordinate: Option<usize> },
    /// A pair `(u, v)`, with the `x` whose envelope contains it.
    Pair { u: f64, v: f64, x: Option<Vec<f64>> },
    /// A ratio `t = u / v`.
    Ratio { t: f64 },
    /// A single point of `I`.
    Scalar { x: f64 },
    /// A second-order matrix at the diagonal point `(x0, .., x0)`.
    Matrix { x0: f64, entries: Matrix },
    /// Two scalar quantities that should satisfy `left <= right`.
    Inequality { left: f64, right: f64 },
}

/// Outcome of a comparison engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    pub status: Status,
    /// Smallest normalized slack observed (negative when violated).
    #[serde(serialize_with = "serialize_f64")]
    pub margin: f64,
    pub witness: Option<Witness>,
    pub detail: String,
}

impl ComparisonVerdict {
    pub fn holds(margin: f64, detail: impl Into<String>) -> Self {
        ComparisonVerdict {
            status: Status::Holds,
            margin,
            witness: None,
            detail: detail.into(),
        }
    }

    pub fn fails(margin: f64, witness: Witness, detail: impl Into<String>) -> Self {
        ComparisonVerdict {
            status: Status::Fails,
            margin,
            witness: Some(witness),
            detail: detail.into(),
        }
    }

    pub fn inconclusive(margin: f64, detail: impl Into<String>) -> Self {
        ComparisonVerdict {
            status: Status::Inconclusive,
            margin,
            witness: None,
            detail: detail.into(),
        }
    }
}

/// Comparison tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative slack tolerance for inequality conditions.
    pub cmp: f64,
    /// Absolute tolerance for first-order (gradient) equality.
    pub grad: f64,
    /// Tolerance of the semidefiniteness test.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cmp: 1e-10,
            grad: 1e-9,
            psd: 1e-10,
        }
    }
}

/// Slack normalized by the magnitude of the compared quantities.
fn normalized(left: f64, right: f64) -> f64 {
    (right - left) / (1.0 + left.abs().max(right.abs()))
}

// ---------------------------------------------------------------------------
// semidefiniteness

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

fn to_dmatrix(a: &Matrix) -> Result<DMatrix<f64>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::input("matrix is not square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| a[i][j]))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Matrix) -> Result<f64> {
    let m = to_dmatrix(a)?;
    if m.nrows() == 0 {
        return Err(Error::input("empty matrix"));
    }
    Ok(SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Sylvester's criterion for definiteness, the smallest eigenvalue for
/// semidefiniteness.
pub fn semidefinite_status(a: &Matrix, tol: f64) -> Result<Definiteness> {
    let m = to_dmatrix(a)?;
    let n = m.nrows();
    if n == 0 {
        return Err(Error::input("empty matrix"));
    }
    let scale = m.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > tol * scale {
                return Err(Error::input(format!(
                    "matrix is not symmetric: a[{i}][{j}] = {}, a[{j}][{i}] = {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }
    let sym = (&m + m.transpose()) * 0.5;
    if (1..=n).all(|k| sym.view((0, 0), (k, k)).determinant() > tol) {
        return Ok(Definiteness::PositiveDefinite);
    }
    let lmin = SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if lmin >= -tol {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    })
}

// ---------------------------------------------------------------------------
// local comparison

/// Segment of the diagonal `[x0 - radius, x0 + radius]` sampled for the
/// first-order condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighborhood {
    pub radius: f64,
    pub samples: usize,
}

impl Default for Neighborhood {
    fn default() -> Self {
        Neighborhood { radius: 0.5, samples: 9 }
    }
}

fn neighborhood_points(domain: &Interval, x0: f64, nb: &Neighborhood) -> Vec<f64> {
    let n = nb.samples.max(1);
    let mut pts = vec![x0];
    for k in 0..n {
        let s = if n == 1 { 0.0 } else { -1.0 + 2.0 * k as f64 / (n - 1) as f64 };
        let x = x0 + s * nb.radius;
        if domain.contains(x) && x != x0 {
            pts.push(x);
        }
    }
    pts
}

fn check_comparable(m: &GeneralizedMean, n: &GeneralizedMean) -> Result<Interval> {
    if m.arity() != n.arity() {
        return Err(Error::input(format!("arity mismatch: {} vs {}", m.arity(), n.arity())));
    }
    m.domain().intersect(&n.domain())
}

/// `⟨∂_i m, 1⟩_μ = ⟨∂_i n, 1⟩_ν` along the sampled diagonal segment.
pub fn local_first_order(
    m: &GeneralizedMean,
    n: &GeneralizedMean,
    x0: f64,
    nb: &Neighborhood,
    tol: &Tolerances,
) -> Result<ComparisonVerdict> {
    let domain = check_comparable(m, n)?;
    domain.check(x0, "x0")?;
    let mut worst = (0.0f64, x0, 0usize);
    for x in neighborhood_points(&domain, x0, nb) {
        let gm = crate::calculus::diagonal_first_moments(m.family(), m.measure(), x)?;
        let gn = crate::calculus::diagonal_first_moments(n.family(), n.measure(), x)?;
        for (i, (a, b)) in gm.iter().zip(&gn).enumerate() {
            let dev = (a - b).abs();
            // near-ties keep the lowest coordinate
            if dev > worst.0 + 1e-12 * worst.0.max(1.0) {
                worst = (dev, x, i);
            }
        }
    }
    let (dev, x, i) = worst;
    let d = m.arity();
    if dev <= tol.grad {
        Ok(ComparisonVerdict::holds(
            -dev,
            format!("first-order partials agree on [{}, {}] (max deviation {dev:e})", x0 - nb.radius, x0 + nb.radius),
        ))
    } else {
        Ok(ComparisonVerdict::fails(
            -dev,
            Witness::Point {
                x: vec![x; d],
                coordinate: Some(i + 1),
            },
            format!("∂_{} differs by {dev:e} on the diagonal at x = {x}", i + 1),
        ))
    }
}

/// First-order agreement and the second-order difference matrix at `x0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalReport {
    pub x0: f64,
    pub gradient_match: bool,
    pub gradient_deviation: f64,
    /// `(∂_i ∂_j N - ∂_i ∂_j M)(x0, .., x0)` for `i, j < d`.
    pub matrix: Matrix,
    pub definiteness: Definiteness,
}

/// Builds the `(d-1) × (d-1)` second-order matrix from the bracket formulas.
pub fn local_second_order_matrix(
    m: &GeneralizedMean,
    n: &GeneralizedMean,
    x0: f64,
    tol: &Tolerances,
) -> Result<LocalReport> {
    let domain = check_comparable(m, n)?;
    domain.check(x0, "x0")?;
    let dm = mean_diag_derivatives(m, x0)?;
    let dn = mean_diag_derivatives(n, x0)?;
    let d = m.arity();
    let gradient_deviation = dm
        .gradient
        .iter()
        .zip(&dn.gradient)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let matrix: Matrix = (0..d - 1)
        .map(|i| (0..d - 1).map(|j| dn.hessian[i][j] - dm.hessian[i][j]).collect())
        .collect();
    let scale = matrix.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
    let definiteness = semidefinite_status(&matrix, tol.psd * scale)?;
    Ok(LocalReport {
        x0,
        gradient_match: gradient_deviation <= tol.grad,
        gradient_deviation,
        matrix,
        definiteness,
    })
}

/// Local verdict plus the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalVerdict {
    pub verdict: ComparisonVerdict,
    pub report: LocalReport,
    /// Half-width `r` of a cube `[x0 - r, x0 + r]^d` on which the sampled
    /// second-order matrix stayed positive definite.
    pub radius: Option<f64>,
}

/// Sampled points of the cube `[x0 - r, x0 + r]^d`: a 5-point grid per axis
/// for `d <= 3`, otherwise 64 points of a Kronecker sequence plus the corners
/// of the cube's diagonal.
fn cube_points(x0: f64, r: f64, d: usize) -> Vec<Vec<f64>> {
    if d <= 3 {
        let axis: Vec<f64> = (0..5).map(|k| x0 - r + 0.5 * r * k as f64).collect();
        let total = 5usize.pow(d as u32);
        (0..total)
            .map(|mut k| {
                (0..d)
                    .map(|_| {
                        let v = axis[k % 5];
                        k /= 5;
                        v
                    })
                    .collect()
            })
            .collect()
    } else {
        let alphas = crate::harness::kronecker_alphas(d);
        let mut pts: Vec<Vec<f64>> = (1..=64)
            .map(|k| {
                alphas
                    .iter()
                    .map(|a| x0 - r + 2.0 * r * (0.5 + a * k as f64).fract())
                    .collect()
            })
            .collect();
        pts.push(vec![x0 - r; d]);
        pts.push(vec![x0 + r; d]);
        pts
    }
}

/// Second-order matrix of `N - M` at an arbitrary point by central
/// differences of the implicit evaluator.
fn fd_difference_matrix(m: &GeneralizedMean, n: &GeneralizedMean, x: &[f64]) -> Result<Matrix> {
    let d = x.len();
    let scale = x.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let h = 1e-3 * scale;
    let diff = |p: &[f64]| -> Result<f64> { Ok(n.eval_implicit(p)? - m.eval_implicit(p)?) };
    let shifted = |shifts: &[(usize, f64)]| -> Result<f64> {
        let mut p = x.to_vec();
        for &(i, s) in shifts {
            p[i] += s;
        }
        diff(&p)
    };
    let centre = diff(x)?;
    let mut out = vec![vec![0.0; d - 1]; d - 1];
    for i in 0..d - 1 {
        out[i][i] = (shifted(&[(i, h)])? - 2.0 * centre + shifted(&[(i, -h)])?) / (h * h);
        for j in i + 1..d - 1 {
            let v = (shifted(&[(i, h), (j, h)])? - shifted(&[(i, h), (j, -h)])? - shifted(&[(i, -h), (j, h)])?
                + shifted(&[(i, -h), (j, -h)])?)
                / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Largest `r = r0 · 2^{-k}` (`k <= 10`) such that the sampled matrix is
/// positive definite throughout `[x0 - r, x0 + r]^d`.
pub fn certified_radius(m: &GeneralizedMean, n: &GeneralizedMean, x0: f64, r0: f64, exec: Execution) -> Result<Option<f64>> {
    let domain = check_comparable(m, n)?;
    let d = m.arity();
    let h = 1e-3 * x0.abs().max(1.0);
    for k in 0..=10 {
        let r = r0 * 0.5f64.powi(k);
        if !(domain.contains(x0 - r - 2.0 * h) && domain.contains(x0 + r + 2.0 * h)) {
            continue;
        }
        let pts = cube_points(x0, r, d);
        let ok = try_map_indexed(exec, pts.len(), |idx| -> Result<bool> {
            let a = fd_difference_matrix(m, n, &pts[idx])?;
            // second differences carry ~1e-7 relative noise
            Ok(semidefinite_status(&a, 1e-6)? == Definiteness::PositiveDefinite)
        })?;
        if ok.iter().all(|&b| b) {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Necessary and sufficient local conditions combined.
///
/// `Fails` when the first-order partials differ at `x0` or the second-order
/// matrix is indefinite; `Holds` when the partials agree on the sampled
/// neighborhood and the matrix is positive definite; `Inconclusive` otherwise.
pub fn local_verdict(
    m: &GeneralizedMean,
    n: &GeneralizedMean,
    x0: f64,
    nb: &Neighborhood,
    tol: &Tolerances,
    exec: Execution,
) -> Result<LocalVerdict> {
    let report = local_second_order_matrix(m, n, x0, tol)?;
    let first = local_first_order(m, n, x0, nb, tol)?;
    let d = m.arity();
    let min_eig = min_eigenvalue(&report.matrix)?;
    let witness_matrix = Witness::Matrix {
        x0,
        entries: report.matrix.clone(),
    };

    let (verdict, radius) = if !report.gradient_match {
        let mut v = first.clone();
        if v.status != Status::Fails {
            v = ComparisonVerdict::fails(
                -report.gradient_deviation,
                Witness::Point {
                    x: vec![x0; d],
                    coordinate: None,
                },
                "first-order partials differ at x0",
            );
        }
        v.detail = format!("necessary first-order condition violated: {}", v.detail);
        (v, None)
    } else if report.definiteness == Definiteness::Indefinite {
        (
            ComparisonVerdict::fails(
                min_eig,
                witness_matrix,
                format!("second-order matrix is not positive semidefinite (smallest eigenvalue {min_eig:e})"),
            ),
            None,
        )
    } else if first.status != Status::Holds {
        (
            ComparisonVerdict::inconclusive(
                first.margin,
                format!("partials agree at x0 but not on the whole neighborhood: {}", first.detail),
            ),
            None,
        )
    } else if report.definiteness == Definiteness::PositiveSemidefinite {
        (
            ComparisonVerdict::inconclusive(
                min_eig,
                "second-order matrix is positive semidefinite but singular; the criteria do not decide",
            ),
            None,
        )
    } else {
        let radius = certified_radius(m, n, x0, nb.radius, exec)?;
        let detail = match radius {
            Some(r) => format!("first-order partials agree and the second-order matrix is positive definite; cube radius {r}"),
            None => "first-order partials agree and the second-order matrix is positive definite; no sampled radius certified".into(),
        };
        (ComparisonVerdict::holds(min_eig, detail), radius)
    };
    Ok(LocalVerdict { verdict, report, radius })
}

/// Sign-only local test for Gini means with a common family and measure.
pub fn gini_local(p: f64, q: f64, r: f64, s: f64, nondegenerate: bool) -> ComparisonVerdict {
    let (left, right) = (p + q, r + s);
    let margin = right - left;
    if !nondegenerate {
        return ComparisonVerdict::inconclusive(
            margin,
            "the partials of the family are μ-almost everywhere constant; the exponent test does not apply",
        );
    }
    if left > right {
        ComparisonVerdict::fails(
            margin,
            Witness::Inequality { left, right },
            format!("necessary condition p + q <= r + s violated: {left} > {right}"),
        )
    } else if left < right {
        ComparisonVerdict::holds(margin, format!("p + q = {left} < r + s = {right}"))
    } else {
        ComparisonVerdict::inconclusive(0.0, format!("p + q = r + s = {left}: second-order terms vanish"))
    }
}

/// Numerical checks of the non-constancy and independence hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nondegeneracy {
    /// Largest `⟨∂_i m, ∂_i m⟩ - ⟨∂_i m, 1⟩²` over `i < d`.
    pub max_variance: f64,
    /// Smallest eigenvalue of the `(d-1) × (d-1)` Gram matrix.
    pub gram_min_eigenvalue: f64,
    /// `max_variance > 1e-12`.
    pub not_constant: bool,
    /// `gram_min_eigenvalue > 1e-10`.
    pub independent: bool,
}

pub fn nondegeneracy(fam: &MeanFamily, mu: &ProbabilityMeasure, x0: f64) -> Result<Nondegeneracy> {
    let mom = diagonal_moments(fam, mu, x0)?;
    let d = fam.arity();
    let gram: Matrix = (0..d - 1).map(|i| mom.gram[i][..d - 1].to_vec()).collect();
    let max_variance = (0..d - 1).map(|i| gram[i][i]).fold(f64::NEG_INFINITY, f64::max);
    let gram_min_eigenvalue = min_eigenvalue(&gram)?;
    Ok(Nondegeneracy {
        max_variance,
        gram_min_eigenvalue,
        not_constant: max_variance > 1e-12,
        independent: gram_min_eigenvalue > 1e-10,
    })
}

// ---------------------------------------------------------------------------
// global comparison

/// Sampling of the two-variable condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalOptions {
    /// Points per axis of the `x` grid (two free coordinates, the rest pinned).
    pub x_grid: usize,
    /// Points per axis of the `(u, v)` grid over each envelope square.
    pub uv_grid: usize,
    /// Carrier resolution for envelopes of continuous families.
    pub envelope_resolution: usize,
    pub window: WindowOptions,
    pub exec: Execution,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        GlobalOptions {
            x_grid: 17,
            uv_grid: 33,
            envelope_resolution: 64,
            window: WindowOptions::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Worst {
    slack: f64,
    u: f64,
    v: f64,
    left: f64,
    right: f64,
}

fn envelope_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let geometric = lo > 0.0 && hi / lo > 100.0;
    (0..n)
        .map(|k| {
            let s = k as f64 / (n - 1) as f64;
            if geometric {
                (lo.ln() + s * (hi.ln() - lo.ln())).exp()
            } else {
                lo + s * (hi - lo)
            }
        })
        .collect()
}

/// `D_M(u,v) / ∂₁D_M(v,v) <= D_N(u,v) / ∂₁D_N(v,v)` over the sampled set
/// `U_m = ∪_x [lower(x), upper(x)]²`.
///
/// Sampled `x` use two free coordinates on an `x_grid²` grid with every
/// further coordinate pinned to the first. Slacks are normalized by
/// `1 + max(|left|, |right|)` and compared with `-tol.cmp`.
pub fn global_condition_iii(
    pair_m: &ChebyshevPair,
    pair_n: &ChebyshevPair,
    fam: &MeanFamily,
    domain: &Interval,
    opts: &GlobalOptions,
    tol: &Tolerances,
) -> Result<ComparisonVerdict> {
    let domain = domain
        .intersect(&fam.domain())?
        .intersect(&pair_m.domain())?
        .intersect(&pair_n.domain())?;
    if opts.x_grid < 2 || opts.uv_grid < 2 {
        return Err(Error::input("global sampling needs at least two points per axis"));
    }
    let axis = domain.grid(opts.x_grid, false, &opts.window);
    let d = fam.arity();
    let nx = axis.len() * axis.len();

    let per_x = try_map_indexed(opts.exec, nx, |k| -> Result<Option<Worst>> {
        let (a, b) = (axis[k % axis.len()], axis[k / axis.len()]);
        let mut x = vec![a; d];
        x[1] = b;
        let env = fam.envelope(&x, opts.envelope_resolution)?;
        if env.upper <= env.lower {
            return Ok(None);
        }
        let grid = envelope_axis(env.lower, env.upper, opts.uv_grid);
        let mut worst: Option<Worst> = None;
        for &v in &grid {
            for &u in &grid {
                if u == v {
                    continue;
                }
                let left = pair_m.normalized_determinant(u, v)?;
                let right = pair_n.normalized_determinant(u, v)?;
                if !(left.is_finite() && right.is_finite()) {
                    return Err(Error::evaluation(format!("(u, v) = ({u}, {v})"), "non-finite normalized determinant"));
                }
                let slack = normalized(left, right);
                if worst.is_none_or(|w| slack < w.slack) {
                    worst = Some(Worst { slack, u, v, left, right });
                }
            }
        }
        Ok(worst)
    })?;

    let mut best: Option<(usize, Worst)> = None;
    for (k, w) in per_x.into_iter().enumerate() {
        if let Some(w) = w {
            if best.is_none_or(|(_, b)| w.slack < b.slack) {
                best = Some((k, w));
            }
        }
    }
    let Some((k, w)) = best else {
        return Ok(ComparisonVerdict::holds(0.0, "every sampled envelope is a single point"));
    };
    if w.slack >= -tol.cmp {
        Ok(ComparisonVerdict::holds(
            w.slack,
            format!("normalized determinant inequality holds on {nx} envelope squares"),
        ))
    } else {
        let mut x = vec![axis[k % axis.len()]; d];
        x[1] = axis[k / axis.len()];
        Ok(ComparisonVerdict::fails(
            w.slack,
            Witness::Pair { u: w.u, v: w.v, x: Some(x) },
            format!("{} > {} at (u, v) = ({}, {})", w.left, w.right, w.u, w.v),
        ))
    }
}

/// Options of [`gini_global`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiniGlobalOptions {
    /// Number of geometric sample points of `t` in `(1/m*, m*)`.
    pub samples: usize,
    /// Smallest range `(1/span, span)` used in place of `(0, inf)` when
    /// `m* = inf`; the range is widened as far as `t^p` stays finite for the
    /// given exponents, capped at `e^230`.
    pub unbounded_span: f64,
}

impl Default for GiniGlobalOptions {
    fn default() -> Self {
        GiniGlobalOptions {
            samples: 2001,
            unbounded_span: 1e6,
        }
    }
}

/// Closed-form test of the Gini comparison for every measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiniGlobalReport {
    pub verdict: ComparisonVerdict,
    /// Status of the closed-form condition (min/max test, or endpoint test).
    pub closed_form: Status,
    /// Status of the sampled `δ_{p,q}(t) <= δ_{r,s}(t)` test.
    pub sampled: Status,
}

/// Closed-form condition: for `m* = inf`, `min(p,q) <= min(r,s)` and
/// `max(p,q) <= max(r,s)`; for finite `m*`, the `δ` inequality at `1/m*` and
/// `m*` together with `p + q <= r + s`.
pub fn gini_closed_form(p: f64, q: f64, r: f64, s: f64, m_star: f64, tol: f64) -> Status {
    if m_star.is_infinite() {
        if p.min(q) <= r.min(s) && p.max(q) <= r.max(s) {
            Status::Holds
        } else {
            Status::Fails
        }
    } else {
        let ok = |t: f64| normalized(delta_gini_unchecked(p, q, t), delta_gini_unchecked(r, s, t)) >= -tol;
        if ok(1.0 / m_star) && ok(m_star) && p + q <= r + s {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

/// Dense sampling of `δ_{p,q}(t) <= δ_{r,s}(t)`; returns the smallest
/// normalized slack and where it occurs.
pub fn gini_sampled(p: f64, q: f64, r: f64, s: f64, m_star: f64, opts: &GiniGlobalOptions) -> (f64, f64) {
    let l = if m_star.is_infinite() {
        let largest = [p, q, r, s].iter().fold(1.0f64, |a, e| a.max(e.abs()));
        (650.0 / largest).min(230.0).max(opts.unbounded_span.ln())
    } else {
        m_star.ln()
    };
    let n = opts.samples.max(3);
    let mut worst = (f64::INFINITY, 1.0);
    for k in 1..n - 1 {
        let t = (l * (2.0 * k as f64 / (n - 1) as f64 - 1.0)).exp();
        if t == 1.0 {
            continue;
        }
        let slack = normalized(delta_gini_unchecked(p, q, t), delta_gini_unchecked(r, s, t));
        if slack < worst.0 {
            worst = (slack, t);
        }
    }
    if worst.0.is_infinite() {
        worst.0 = 0.0;
    }
    worst
}

/// Gini comparison for all measures: closed form cross-checked by sampling.
pub fn gini_global(
    p: f64,
    q: f64,
    r: f64,
    s: f64,
    m_star: f64,
    opts: &GiniGlobalOptions,
    tol: &Tolerances,
) -> Result<GiniGlobalReport> {
    if !(m_star >= 1.0) {
        return Err(Error::input(format!("m* must be at least 1, got {m_star}")));
    }
    if [p, q, r, s].iter().any(|v| !v.is_finite()) {
        return Err(Error::input("Gini exponents must be finite"));
    }
    if m_star == 1.0 {
        let v = ComparisonVerdict::holds(0.0, "m* = 1: the envelope is a single point and all means coincide");
        return Ok(GiniGlobalReport {
            verdict: v,
            closed_form: Status::Holds,
            sampled: Status::Holds,
        });
    }
    let closed = gini_closed_form(p, q, r, s, m_star, tol.cmp);
    let (slack, t) = gini_sampled(p, q, r, s, m_star, opts);
    let sampled = if slack >= -tol.cmp { Status::Holds } else { Status::Fails };
    let branch = if m_star.is_infinite() {
        "min/max exponent test (m* = inf)".to_string()
    } else {
        format!("endpoint test at 1/m* and m* = {m_star} with p + q <= r + s")
    };
    let verdict = match (closed, sampled) {
        (Status::Holds, Status::Holds) => ComparisonVerdict::holds(slack, format!("{branch} and sampled δ inequality hold")),
        (Status::Fails, Status::Fails) => ComparisonVerdict::fails(
            slack,
            Witness::Ratio { t },
            format!(
                "{branch} fails; δ_({p},{q})({t}) = {} > δ_({r},{s})({t}) = {}",
                delta_gini_unchecked(p, q, t),
                delta_gini_unchecked(r, s, t)
            ),
        ),
        _ => ComparisonVerdict::inconclusive(
            slack,
            format!("{branch} gives {closed:?} but the sampled δ inequality gives {sampled:?} (boundary band)"),
        ),
    };
    Ok(GiniGlobalReport {
        verdict,
        closed_form: closed,
        sampled,
    })
}

// ---------------------------------------------------------------------------
// quasi-arithmetic means

/// `x^p`, or `ln x` for `p = 0`: the generator of the power mean `H_p`.
pub fn power_generator(p: f64) -> ScalarFunction {
    if p == 0.0 {
        ScalarFunction::log()
    } else {
        ScalarFunction::power(p)
    }
}

/// Per-condition results for two quasi-arithmetic generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiArithmeticReport {
    pub verdict: ComparisonVerdict,
    /// `f''/f' <= h''/h'` on an `x` grid.
    pub curvature: ComparisonVerdict,
    /// Convexity of `h∘f⁻¹`, oriented so that `h` is increasing.
    pub convexity: ComparisonVerdict,
    /// `(f(u) - f(v))/f'(v) <= (h(u) - h(v))/h'(v)` on a `(u, v)` grid.
    pub tangent: ComparisonVerdict,
}

/// Sampling of [`quasiarith_compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiArithmeticOptions {
    pub x_grid: usize,
    pub uv_grid: usize,
    pub window: WindowOptions,
}

impl Default for QuasiArithmeticOptions {
    fn default() -> Self {
        QuasiArithmeticOptions {
            x_grid: 257,
            uv_grid: 65,
            window: WindowOptions::default(),
        }
    }
}

fn nonvanishing(f: &ScalarFunction, x: f64) -> Result<f64> {
    let d = f.deriv1(x)?;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Degenerate(format!("{}' vanishes at x = {x}", f.label())));
    }
    Ok(d)
}

fn verdict_from(slack: f64, witness: Witness, tol: f64, holds: String, fails: String) -> ComparisonVerdict {
    if slack >= -tol {
        ComparisonVerdict::holds(slack, holds)
    } else {
        ComparisonVerdict::fails(slack, witness, fails)
    }
}

/// Whether the quasi-arithmetic mean of `f` is below that of `h` for every
/// family and measure, through the curvature, convexity and tangent
/// conditions.
///
/// The curvature and tangent conditions decide the verdict; they are
/// equivalent, so a disagreement is reported as inconclusive.
pub fn quasiarith_compare(
    f: &ScalarFunction,
    h: &ScalarFunction,
    domain: &Interval,
    opts: &QuasiArithmeticOptions,
    tol: &Tolerances,
) -> Result<QuasiArithmeticReport> {
    let domain = domain.intersect(&f.domain())?.intersect(&h.domain())?;
    let xs = domain.grid(opts.x_grid, false, &opts.window);

    // curvature
    let mut worst = (f64::INFINITY, xs[0], 0.0, 0.0);
    for &x in &xs {
        let left = f.deriv2(x)? / nonvanishing(f, x)?;
        let right = h.deriv2(x)? / nonvanishing(h, x)?;
        let slack = normalized(left, right);
        if slack < worst.0 {
            worst = (slack, x, left, right);
        }
    }
    let curvature = verdict_from(
        worst.0,
        Witness::Scalar { x: worst.1 },
        tol.cmp,
        format!("f''/f' <= h''/h' on {} points", xs.len()),
        format!("f''/f' = {} > h''/h' = {} at x = {}", worst.2, worst.3, worst.1),
    );

    // convexity of ĥ∘f⁻¹ with ĥ = sign(h')·h
    let sign = nonvanishing(h, xs[0])?.signum();
    let mut pts: Vec<(f64, f64, f64)> = xs.iter().map(|&x| (f.value(x), sign * h.value(x), x)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let slopes: Vec<(f64, f64)> = pts
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0), w[1].2))
        .collect();
    let mut cworst = (f64::INFINITY, xs[0]);
    for w in slopes.windows(2) {
        let slack = normalized(w[0].0, w[1].0);
        if slack < cworst.0 {
            cworst = (slack, w[0].1);
        }
    }
    if cworst.0.is_infinite() {
        cworst.0 = 0.0;
    }
    let convexity = verdict_from(
        cworst.0,
        Witness::Scalar { x: cworst.1 },
        tol.cmp,
        "h∘f⁻¹ is convex (concave when h decreases) on the sampled range".into(),
        format!("h∘f⁻¹ bends the wrong way near x = {}", cworst.1),
    );

    // tangent inequality
    let uvs = domain.grid(opts.uv_grid, false, &opts.window);
    let mut tworst = (f64::INFINITY, uvs[0], uvs[0], 0.0, 0.0);
    for &v in &uvs {
        let (fv, hv) = (f.value(v), h.value(v));
        let (df, dh) = (nonvanishing(f, v)?, nonvanishing(h, v)?);
        for &u in &uvs {
            if u == v {
                continue;
            }
            let left = (f.value(u) - fv) / df;
            let right = (h.value(u) - hv) / dh;
            let slack = normalized(left, right);
            if slack < tworst.0 {
                tworst = (slack, u, v, left, right);
            }
        }
    }
    let tangent = verdict_from(
        tworst.0,
        Witness::Pair {
            u: tworst.1,
            v: tworst.2,
            x: None,
        },
        tol.cmp,
        format!("tangent inequality holds on {}² points", uvs.len()),
        format!("{} > {} at (u, v) = ({}, {})", tworst.3, tworst.4, tworst.1, tworst.2),
    );

    let verdict = match (curvature.status, tangent.status) {
        (Status::Holds, Status::Holds) => ComparisonVerdict::holds(
            curvature.margin.min(tangent.margin),
            "curvature and tangent conditions hold",
        ),
        (Status::Fails, Status::Fails) => ComparisonVerdict {
            status: Status::Fails,
            margin: curvature.margin,
            witness: curvature.witness.clone(),
            detail: format!("curvature condition fails: {}", curvature.detail),
        },
        _ => ComparisonVerdict::inconclusive(
            curvature.margin.min(tangent.margin),
            format!(
                "equivalent conditions disagree (curvature {:?}, tangent {:?}); check the inputs",
                curvature.status, tangent.status
            ),
        ),
    };
    Ok(QuasiArithmeticReport {
        verdict,
        curvature,
        convexity,
        tangent,
    })
}

/// Power means: `H_p <= H_q` for every family and measure iff `p <= q`.
pub fn holder_compare(p: f64, q: f64) -> ComparisonVerdict {
    if p <= q {
        ComparisonVerdict::holds(q - p, format!("{p} <= {q}"))
    } else {
        ComparisonVerdict::fails(q - p, Witness::Inequality { left: p, right: q }, format!("{p} > {q}"))
    }
}
