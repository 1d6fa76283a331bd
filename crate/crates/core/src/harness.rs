//! Brute-force oracle and the scenario suites that tie the comparison
//! engines back to direct evaluation of the means.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::calculus::{default_gammas, lemma2_limit};
use crate::compare::{
    gini_global, global_condition_iii, holder_compare, local_first_order, power_generator, quasiarith_compare,
    GiniGlobalOptions, GlobalOptions, Neighborhood, QuasiArithmeticOptions, Status, Tolerances, Witness,
};
use crate::descriptor::{FamilySpec, FunctionSpec, MeanSpec, MeasureSpec, PairSpec};
use crate::domain::{Interval, WindowOptions};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::extreal::serialize_f64;
use crate::families::{MStarOptions, MeanFamily};
use crate::means::GeneralizedMean;
use crate::measures::{Carrier, Parameter, ProbabilityMeasure};
use crate::scalarfn::ChebyshevPair;

// ---------------------------------------------------------------------------
// sampling

/// Generator of the `R_d` Kronecker sequence: `α_i = φ_d^{-i}` where `φ_d` is
/// the positive root of `x^{d+1} = x + 1`.
pub fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|i| phi.powi(-(i as i32))).collect()
}

/// Where the oracle samples `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleRegion {
    /// `I^d`, truncated to its sampling window when unbounded.
    Domain(Interval),
    /// `[center - radius, center + radius]^d`.
    Cube { center: f64, radius: f64 },
}

impl SampleRegion {
    fn map(&self, s: f64, window: &WindowOptions) -> f64 {
        match *self {
            SampleRegion::Domain(i) => i.map_unit(s, window),
            SampleRegion::Cube { center, radius } => center - radius + 2.0 * radius * s,
        }
    }

    fn contains(&self, x: f64, window: &WindowOptions) -> bool {
        match *self {
            SampleRegion::Domain(i) => {
                let (a, b, _) = i.window(window);
                i.contains(x) && x >= a && x <= b
            }
            SampleRegion::Cube { center, radius } => (x - center).abs() <= radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Quasi-random points per comparison (structured probes come on top).
    pub samples: usize,
    pub seed: u64,
    /// Relative tolerance: a slack `N - M` is a violation below
    /// `-tol · (1 + |N|)`.
    pub tol: f64,
    pub window: WindowOptions,
    pub exec: Execution,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            samples: 256,
            seed: 0,
            tol: 1e-9,
            window: WindowOptions::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleVerdict {
    Dominates,
    Violated,
    Borderline,
}

impl OracleVerdict {
    pub fn as_status(self) -> Status {
        match self {
            OracleVerdict::Dominates => Status::Holds,
            OracleVerdict::Violated => Status::Fails,
            OracleVerdict::Borderline => Status::Inconclusive,
        }
    }
}

/// Result of sampling `M(x) <= N(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    /// Points evaluated successfully.
    pub samples: usize,
    /// Points at which either mean failed to evaluate (excluded).
    pub failures: usize,
    /// `N(x) - M(x)` at `argmin`.
    #[serde(serialize_with = "serialize_f64")]
    pub min_slack: f64,
    /// The point minimizing `(N(x) - M(x)) / (1 + |N(x)|)`.
    pub argmin: Vec<f64>,
    pub verdict: OracleVerdict,
}

impl OracleReport {
    fn classify(min_normalized: f64, tol: f64) -> OracleVerdict {
        if min_normalized < -tol {
            OracleVerdict::Violated
        } else if min_normalized < -tol * 1e-3 {
            OracleVerdict::Borderline
        } else {
            OracleVerdict::Dominates
        }
    }
}

fn oracle_points(d: usize, region: &SampleRegion, opts: &OracleOptions) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let alphas = kronecker_alphas(d);
    let w = &opts.window;
    let mut pts: Vec<Vec<f64>> = (1..=opts.samples)
        .map(|k| {
            (0..d)
                .map(|i| region.map((shift[i] + alphas[i] * k as f64).fract(), w))
                .collect()
        })
        .collect();
    for k in 0..5 {
        let c = region.map((k as f64 + 0.5) / 5.0, w);
        pts.push(vec![c; d]);
        for i in 0..d {
            for h in [1e-3, 1e-1] {
                for sign in [-1.0, 1.0] {
                    let step = if c == 0.0 { h } else { h * c.abs() };
                    let mut x = vec![c; d];
                    x[i] = c + sign * step;
                    if region.contains(x[i], w) {
                        pts.push(x);
                    }
                }
            }
        }
    }
    pts
}

/// Samples `N(x) - M(x)` at quasi-random points of the region plus diagonal
/// points and one-coordinate perturbations of them.
pub fn brute_force_compare(
    m: &GeneralizedMean,
    n: &GeneralizedMean,
    region: &SampleRegion,
    opts: &OracleOptions,
) -> Result<OracleReport> {
    if m.arity() != n.arity() {
        return Err(Error::input(format!("arity mismatch: {} vs {}", m.arity(), n.arity())));
    }
    let pts = oracle_points(m.arity(), region, opts);
    let evals = map_indexed(opts.exec, pts.len(), |k| -> Option<(f64, f64)> {
        let a = m.eval_implicit(&pts[k]).ok()?;
        let b = n.eval_implicit(&pts[k]).ok()?;
        let slack = b - a;
        slack.is_finite().then(|| (slack, slack / (1.0 + b.abs())))
    });
    let mut samples = 0;
    let mut failures = 0;
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, e) in evals.into_iter().enumerate() {
        match e {
            None => failures += 1,
            Some((slack, norm)) => {
                samples += 1;
                if best.is_none_or(|(_, _, b)| norm < b) {
                    best = Some((k, slack, norm));
                }
            }
        }
    }
    let Some((k, slack, norm)) = best else {
        return Err(Error::numeric(format!("all {failures} oracle evaluations failed")));
    };
    Ok(OracleReport {
        samples,
        failures,
        min_slack: slack,
        argmin: pts[k].clone(),
        verdict: OracleReport::classify(norm, opts.tol),
    })
}

fn random_parameter(carrier: &Carrier, rng: &mut ChaCha8Rng) -> Result<Parameter> {
    Ok(match carrier {
        Carrier::Indices { n } => vec![rng.random_range(1..=*n) as f64],
        Carrier::UnitInterval => vec![rng.random::<f64>()],
        Carrier::Simplex { d } => {
            let e: Vec<f64> = (0..*d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let s: f64 = e.iter().sum();
            let mut t: Vec<f64> = e.iter().map(|v| v / s).collect();
            let head: f64 = t[..d - 1].iter().sum();
            t[d - 1] = (1.0 - head).max(0.0);
            t
        }
        Carrier::Points { points } => {
            if points.is_empty() {
                return Err(Error::input("empty point carrier"));
            }
            vec![points[rng.random_range(0..points.len())]]
        }
    })
}

/// `count` discrete measures with 1 to 8 atoms at random carrier points and
/// flat-Dirichlet weights.
pub fn random_battery(carrier: &Carrier, count: usize, seed: u64) -> Result<Vec<ProbabilityMeasure>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.random_range(1..=8usize);
            let mut atoms = Vec::with_capacity(k);
            for _ in 0..k {
                atoms.push((random_parameter(carrier, &mut rng)?, rng.sample::<f64, _>(Exp1)));
            }
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            for a in atoms.iter_mut() {
                a.1 /= total;
            }
            ProbabilityMeasure::atoms(atoms)
        })
        .collect()
}

/// Worst oracle result over a battery of measures shared by both means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub measures: usize,
    pub violated: usize,
    /// Index of the measure with the smallest normalized slack.
    pub worst_measure: usize,
    pub worst: OracleReport,
}

pub fn battery_compare(
    pair_m: &ChebyshevPair,
    pair_n: &ChebyshevPair,
    fam: &MeanFamily,
    battery: &[ProbabilityMeasure],
    region: &SampleRegion,
    opts: &OracleOptions,
) -> Result<BatteryReport> {
    if battery.is_empty() {
        return Err(Error::input("empty measure battery"));
    }
    let mut violated = 0;
    let mut worst: Option<(usize, OracleReport, f64)> = None;
    for (k, mu) in battery.iter().enumerate() {
        let m = GeneralizedMean::new(pair_m.clone(), fam.clone(), mu.clone())?;
        let n = GeneralizedMean::new(pair_n.clone(), fam.clone(), mu.clone())?;
        let o = OracleOptions {
            seed: opts.seed.wrapping_add(k as u64),
            ..*opts
        };
        let r = brute_force_compare(&m, &n, region, &o)?;
        if r.verdict == OracleVerdict::Violated {
            violated += 1;
        }
        let nval = n.eval_implicit(&r.argmin)?;
        let norm = r.min_slack / (1.0 + nval.abs());
        if worst.as_ref().is_none_or(|w| norm < w.2) {
            worst = Some((k, r, norm));
        }
    }
    let (worst_measure, worst, _) = worst.expect("battery is not empty");
    Ok(BatteryReport {
        measures: battery.len(),
        violated,
        worst_measure,
        worst,
    })
}

/// Mixture-measure probe built from a witness `(u, v)` of a failed global
/// condition, for coordinate families: at `x = (v, u, v, .., v)` with
/// `μ_γ = (1 - γ) δ_1 + γ δ_2`, the slack `N - M` behaves like `γ` times the
/// (negative) difference of the normalized determinants.
///
/// The linear regime needs `γ |R| << v`, so the weights run over
/// `γ_0 · 2^{-k}` with `γ_0 = min(1/4, v / (1 + |R_M| + |R_N|))`.
pub fn witness_mixture_probe(
    pair_m: &ChebyshevPair,
    pair_n: &ChebyshevPair,
    d: usize,
    u: f64,
    v: f64,
    tol: f64,
) -> Result<OracleReport> {
    let fam = MeanFamily::coordinates(d)?;
    let mut x = vec![v; d];
    x[1] = u;
    let mut best: Option<(f64, f64)> = None;
    let mut samples = 0;
    let scale = 1.0 + pair_m.normalized_determinant(u, v)?.abs() + pair_n.normalized_determinant(u, v)?.abs();
    let gamma0 = (v.abs() / scale).min(0.25);
    for k in 0..=20 {
        let gamma = gamma0 * 0.5f64.powi(k);
        let mu = ProbabilityMeasure::atoms(vec![(vec![1.0], 1.0 - gamma), (vec![2.0], gamma)])?;
        let m = GeneralizedMean::new(pair_m.clone(), fam.clone(), mu.clone())?;
        let n = GeneralizedMean::new(pair_n.clone(), fam.clone(), mu)?;
        let b = n.eval_implicit(&x)?;
        let slack = b - m.eval_implicit(&x)?;
        let norm = slack / (1.0 + b.abs());
        samples += 1;
        if best.is_none_or(|(_, bn)| norm < bn) {
            best = Some((slack, norm));
        }
    }
    let (slack, norm) = best.expect("at least one mixture weight");
    Ok(OracleReport {
        samples,
        failures: 0,
        min_slack: slack,
        argmin: x,
        verdict: OracleReport::classify(norm, tol),
    })
}

// ---------------------------------------------------------------------------
// scenario suites

/// Scenario names of the bundled catalog, in run order.
pub const SCENARIOS: [&str; 6] = [
    "identity",
    "holder_grid",
    "gini_unbounded",
    "gini_bounded",
    "quasi_arithmetic",
    "lemma2_mixtures",
];

const CATALOG_JSON: &str = include_str!("../data/scenarios.json");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Catalog {
    identity: IdentityScenario,
    holder_grid: HolderScenario,
    gini_unbounded: GiniScenario,
    gini_bounded: GiniScenario,
    quasi_arithmetic: QuasiScenario,
    lemma2_mixtures: Lemma2Scenario,
}

#[derive(Debug, Clone, Deserialize)]
struct IdentityScenario {
    means: Vec<MeanSpec>,
    domain: Interval,
}

#[derive(Debug, Clone, Deserialize)]
struct HolderScenario {
    exponents: Vec<f64>,
    d: usize,
    domain: Interval,
    battery: usize,
}

#[derive(Debug, Clone, Deserialize)]
struct GiniScenario {
    cases: usize,
    /// Exponents are drawn from `lo + step · k` within `[lo, hi]`.
    exponents: (f64, f64, f64),
    domain: Interval,
    battery: usize,
}

#[derive(Debug, Clone, Deserialize)]
struct QuasiCase {
    f: FunctionSpec,
    h: FunctionSpec,
    domain: Interval,
}

#[derive(Debug, Clone, Deserialize)]
struct QuasiScenario {
    cases: Vec<QuasiCase>,
    d: usize,
    battery: usize,
}

#[derive(Debug, Clone, Deserialize)]
struct Lemma2Case {
    pair: PairSpec,
    family: FamilySpec,
    t0: Parameter,
    nu: MeasureSpec,
    x: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
struct Lemma2Scenario {
    cases: Vec<Lemma2Case>,
}

fn catalog() -> Result<Catalog> {
    serde_json::from_str(CATALOG_JSON).map_err(|e| Error::input(format!("scenario catalog: {e}")))
}

/// Settings shared by every scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Quasi-random oracle points per comparison.
    pub samples: usize,
    pub tol: Tolerances,
    pub exec: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            samples: 64,
            tol: Tolerances::default(),
            exec: Execution::default(),
        }
    }
}

impl SuiteOptions {
    fn oracle(&self, salt: u64) -> OracleOptions {
        OracleOptions {
            samples: self.samples,
            seed: self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt),
            exec: self.exec,
            ..OracleOptions::default()
        }
    }
}

/// One case of a scenario: the status of each equivalent condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub label: String,
    pub conditions: BTreeMap<String, Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    /// Some condition landed in the boundary band.
    pub inconclusive: bool,
    /// All decided conditions agree.
    pub pass: bool,
}

impl CaseReport {
    fn new(label: String, conditions: BTreeMap<String, Status>, oracle: Option<OracleReport>) -> Self {
        let decided: Vec<Status> = conditions.values().copied().filter(|s| *s != Status::Inconclusive).collect();
        let pass = decided.windows(2).all(|w| w[0] == w[1]);
        let inconclusive = decided.len() < conditions.len();
        CaseReport {
            label,
            conditions,
            oracle,
            inconclusive,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub cases: Vec<CaseReport>,
    pub passed: usize,
    pub inconclusive: usize,
    pub pass: bool,
}

impl ScenarioReport {
    fn new(scenario: &str, cases: Vec<CaseReport>) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        let inconclusive = cases.iter().filter(|c| c.inconclusive).count();
        ScenarioReport {
            scenario: scenario.to_string(),
            pass: passed == cases.len(),
            cases,
            passed,
            inconclusive,
        }
    }
}

/// Runs one scenario of the bundled catalog.
pub fn equivalence_suite(scenario: &str, opts: &SuiteOptions) -> Result<ScenarioReport> {
    let cat = catalog()?;
    let cases = match scenario {
        "identity" => identity_cases(&cat.identity, opts)?,
        "holder_grid" => holder_cases(&cat.holder_grid, opts)?,
        "gini_unbounded" => gini_cases(&cat.gini_unbounded, opts, 1)?,
        "gini_bounded" => gini_cases(&cat.gini_bounded, opts, 2)?,
        "quasi_arithmetic" => quasi_cases(&cat.quasi_arithmetic, opts)?,
        "lemma2_mixtures" => lemma2_cases(&cat.lemma2_mixtures)?,
        other => {
            return Err(Error::input(format!(
                "unknown scenario {other:?}; expected one of {}",
                SCENARIOS.join(", ")
            )))
        }
    };
    Ok(ScenarioReport::new(scenario, cases))
}

fn identity_cases(sc: &IdentityScenario, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    sc.means
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let m = spec.build()?;
            let mut cond = BTreeMap::new();
            let x0 = sc.domain.grid(1, false, &WindowOptions::default())[0];
            cond.insert(
                "first_order".into(),
                local_first_order(&m, &m, x0, &Neighborhood::default(), &opts.tol)?.status,
            );
            let g = GlobalOptions {
                exec: opts.exec,
                x_grid: 9,
                uv_grid: 17,
                ..Default::default()
            };
            cond.insert(
                "global_iii".into(),
                global_condition_iii(m.pair(), m.pair(), m.family(), &sc.domain, &g, &opts.tol)?.status,
            );
            if let PairSpec::Gini { p, q } = spec.pair {
                let r = gini_global(p, q, p, q, f64::INFINITY, &GiniGlobalOptions::default(), &opts.tol)?;
                cond.insert("gini_global".into(), r.verdict.status);
            }
            let o = brute_force_compare(&m, &m, &SampleRegion::Domain(sc.domain), &opts.oracle(k as u64))?;
            cond.insert("oracle".into(), o.verdict.as_status());
            // every condition must hold, not merely agree
            let mut case = CaseReport::new(format!("{} vs itself", m.pair().label()), cond, Some(o));
            case.pass &= case.conditions.values().all(|s| *s == Status::Holds);
            Ok(case)
        })
        .collect()
}

fn holder_cases(sc: &HolderScenario, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let fam = MeanFamily::coordinates(sc.d)?;
    let battery = random_battery(fam.carrier(), sc.battery, opts.seed)?;
    let qa = QuasiArithmeticOptions::default();
    let mut out = Vec::new();
    for (i, &p) in sc.exponents.iter().enumerate() {
        for (j, &q) in sc.exponents.iter().enumerate() {
            let mut cond = BTreeMap::new();
            cond.insert("exponent_order".into(), holder_compare(p, q).status);
            let r = quasiarith_compare(&power_generator(p), &power_generator(q), &sc.domain, &qa, &opts.tol)?;
            cond.insert("curvature".into(), r.curvature.status);
            cond.insert("tangent".into(), r.tangent.status);
            cond.insert("convexity".into(), r.convexity.status);
            let b = battery_compare(
                &ChebyshevPair::gini(p, 0.0),
                &ChebyshevPair::gini(q, 0.0),
                &fam,
                &battery,
                &SampleRegion::Domain(sc.domain),
                &opts.oracle((i * sc.exponents.len() + j) as u64),
            )?;
            cond.insert("oracle".into(), b.worst.verdict.as_status());
            out.push(CaseReport::new(format!("H_{p} <= H_{q}"), cond, Some(b.worst)));
        }
    }
    Ok(out)
}

/// Seeded exponents `(p, q, r, s)` on the lattice `lo + step · k`; odd
/// cases shift `(p, q)` upwards so that both outcomes occur.
pub fn gini_quadruples(count: usize, lattice: (f64, f64, f64), seed: u64) -> Vec<[f64; 4]> {
    let (lo, hi, step) = lattice;
    let n = ((hi - lo) / step).round() as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| lo + step * rng.random_range(0..n) as f64;
    (0..count)
        .map(|k| {
            let (p, q) = (draw(&mut rng), draw(&mut rng));
            if k % 2 == 1 {
                let up = |v: f64, rng: &mut ChaCha8Rng| (v + step * rng.random_range(0..4) as f64).min(hi);
                [p, q, up(p, &mut rng), up(q, &mut rng)]
            } else {
                [p, q, draw(&mut rng), draw(&mut rng)]
            }
        })
        .collect()
}

/// Global verdicts for one Gini quadruple on a coordinate family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiniGlobalCase {
    pub exponents: [f64; 4],
    #[serde(serialize_with = "serialize_f64")]
    pub m_star: f64,
    pub closed_form: Status,
    pub sampled: Status,
    pub gini_global: Status,
    pub global_iii: Status,
    pub witness: Option<Witness>,
}

pub fn gini_global_case(
    e: [f64; 4],
    fam: &MeanFamily,
    domain: &Interval,
    tol: &Tolerances,
    exec: Execution,
) -> Result<GiniGlobalCase> {
    let [p, q, r, s] = e;
    let m_star = fam.m_star(domain, &MStarOptions::default())?.0;
    let gg = gini_global(p, q, r, s, m_star, &GiniGlobalOptions::default(), tol)?;
    let g3 = global_condition_iii(
        &ChebyshevPair::gini(p, q),
        &ChebyshevPair::gini(r, s),
        fam,
        domain,
        &GlobalOptions {
            exec,
            ..Default::default()
        },
        tol,
    )?;
    Ok(GiniGlobalCase {
        exponents: e,
        m_star,
        closed_form: gg.closed_form,
        sampled: gg.sampled,
        gini_global: gg.verdict.status,
        global_iii: g3.status,
        witness: g3.witness,
    })
}

fn gini_cases(sc: &GiniScenario, opts: &SuiteOptions, salt: u64) -> Result<Vec<CaseReport>> {
    let fam = MeanFamily::coordinates(2)?;
    let battery = random_battery(fam.carrier(), sc.battery, opts.seed.wrapping_add(salt))?;
    let quads = gini_quadruples(sc.cases, sc.exponents, opts.seed.wrapping_add(salt));
    let mut out = Vec::new();
    for (k, e) in quads.into_iter().enumerate() {
        let [p, q, r, s] = e;
        let c = gini_global_case(e, &fam, &sc.domain, &opts.tol, opts.exec)?;
        let (pm, pn) = (ChebyshevPair::gini(p, q), ChebyshevPair::gini(r, s));
        let mut oracle = battery_compare(
            &pm,
            &pn,
            &fam,
            &battery,
            &SampleRegion::Domain(sc.domain),
            &opts.oracle(salt << 32 | k as u64),
        )?
        .worst;
        if let Some(Witness::Pair { u, v, .. }) = c.witness {
            let probe = witness_mixture_probe(&pm, &pn, 2, u, v, 1e-9)?;
            if probe.verdict == OracleVerdict::Violated && oracle.verdict != OracleVerdict::Violated {
                oracle = probe;
            }
        }
        let mut cond = BTreeMap::new();
        cond.insert("closed_form".into(), c.closed_form);
        cond.insert("sampled_delta".into(), c.sampled);
        cond.insert("global_iii".into(), c.global_iii);
        cond.insert("oracle".into(), oracle.verdict.as_status());
        let label = format!("G({p},{q}) <= G({r},{s}), m* = {}", c.m_star);
        out.push(CaseReport::new(label, cond, Some(oracle)));
    }
    Ok(out)
}

fn quasi_cases(sc: &QuasiScenario, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let fam = MeanFamily::coordinates(sc.d)?;
    let battery = random_battery(fam.carrier(), sc.battery, opts.seed.wrapping_add(3))?;
    let qa = QuasiArithmeticOptions::default();
    sc.cases
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let f = c.f.build()?.restricted(c.domain)?;
            let h = c.h.build()?.restricted(c.domain)?;
            let r = quasiarith_compare(&f, &h, &c.domain, &qa, &opts.tol)?;
            let b = battery_compare(
                &ChebyshevPair::quasi_arithmetic(f.clone())?,
                &ChebyshevPair::quasi_arithmetic(h.clone())?,
                &fam,
                &battery,
                &SampleRegion::Domain(c.domain),
                &opts.oracle(k as u64),
            )?;
            let mut cond = BTreeMap::new();
            cond.insert("curvature".into(), r.curvature.status);
            cond.insert("convexity".into(), r.convexity.status);
            cond.insert("tangent".into(), r.tangent.status);
            cond.insert("oracle".into(), b.worst.verdict.as_status());
            Ok(CaseReport::new(format!("{} vs {}", f.label(), h.label()), cond, Some(b.worst)))
        })
        .collect()
}

fn lemma2_cases(sc: &Lemma2Scenario) -> Result<Vec<CaseReport>> {
    sc.cases
        .iter()
        .map(|c| {
            let pair = c.pair.build()?;
            let fam = c.family.build()?;
            let nu = c.nu.build()?;
            let lim = lemma2_limit(&pair, &fam, &c.t0, &nu, &c.x, &default_gammas())?;
            let last = *lim.deviations.last().expect("twenty γ values");
            let tail = &lim.deviations[7..];
            let monotone = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let status = |ok: bool| if ok { Status::Holds } else { Status::Fails };
            let mut cond = BTreeMap::new();
            cond.insert("limit".into(), status(last <= 1e-4));
            cond.insert("monotone_tail".into(), status(monotone));
            let mut case = CaseReport::new(format!("{} on {}", pair.label(), fam.label()), cond, None);
            case.pass &= case.conditions.values().all(|s| *s == Status::Holds);
            Ok(case)
        })
        .collect()
}

/// All scenarios, in catalog order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub scenarios: Vec<ScenarioReport>,
    pub pass: bool,
}

pub fn verify(opts: &SuiteOptions) -> Result<VerifyReport> {
    let scenarios = SCENARIOS
        .iter()
        .map(|s| equivalence_suite(s, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        seed: opts.seed,
        samples: opts.samples,
        pass: scenarios.iter().all(|s| s.pass),
        scenarios,
    })
}
