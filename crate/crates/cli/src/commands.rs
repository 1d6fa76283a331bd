//! Subcommand configurations and their execution.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use genmeans::calculus::{default_gammas, fd_diag_gradient, fd_diag_hessian, lemma2_limit, mean_diag_derivatives};
use genmeans::compare::{
    gini_global, global_condition_iii, holder_compare, local_verdict, quasiarith_compare, GiniGlobalOptions,
    GlobalOptions, Neighborhood, QuasiArithmeticOptions,
};
use genmeans::families::MStarOptions;
use genmeans::harness::{brute_force_compare, verify, OracleOptions, SampleRegion, SuiteOptions, SCENARIOS};
use genmeans::measures::Parameter;
use genmeans::{
    Error, Execution, ExtReal, FamilySpec, FunctionSpec, Interval, MeanSpec, MeasureSpec, PairSpec, Status, Tolerances,
};

use crate::format::g17;

/// What a command produced: a JSON document or CSV rows, plus the status
/// that decides the exit code.
pub struct Output {
    pub json: Value,
    pub csv: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub status: Status,
}

impl Output {
    fn json(json: Value, status: Status) -> Self {
        Output { json, csv: None, status }
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub seed: u64,
    pub samples: Option<usize>,
    pub tol: Tolerances,
    pub exec: Execution,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn parse<T: for<'de> Deserialize<'de>>(config: Option<Value>, command: &str) -> Result<T, Error> {
    let value = config.ok_or_else(|| Error::Input(format!("`{command}` needs --config <path>")))?;
    serde_json::from_value(value).map_err(|e| Error::Input(format!("invalid {command} config: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Implicit,
    Explicit,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub mean: MeanSpec,
    pub x: Vec<f64>,
    #[serde(default)]
    pub method: Method,
}

pub fn eval(config: Option<Value>) -> Result<Output, Error> {
    let cfg: EvalConfig = parse(config, "eval")?;
    let mean = cfg.mean.build()?;
    let implicit = matches!(cfg.method, Method::Implicit | Method::Both)
        .then(|| mean.eval_implicit(&cfg.x))
        .transpose()?;
    let explicit = matches!(cfg.method, Method::Explicit | Method::Both)
        .then(|| mean.eval_explicit(&cfg.x))
        .transpose()?;
    let value = implicit.or(explicit).expect("one method runs");
    let mut result = json!({ "value": value });
    if let Some(v) = implicit {
        result["implicit"] = json!(v);
    }
    if let Some(v) = explicit {
        result["explicit"] = json!(v);
    }
    Ok(Output::json(json!({ "config": cfg, "result": result }), Status::Holds))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativesConfig {
    pub mean: MeanSpec,
    pub x0: f64,
    #[serde(default)]
    pub finite_differences: bool,
}

pub fn derivatives(config: Option<Value>) -> Result<Output, Error> {
    let cfg: DerivativesConfig = parse(config, "derivatives")?;
    let mean = cfg.mean.build()?;
    let d = mean_diag_derivatives(&mean, cfg.x0)?;
    let mut result = to_value(&d);
    if cfg.finite_differences {
        result["fd_gradient"] = to_value(&fd_diag_gradient(&mean, cfg.x0)?);
        result["fd_hessian"] = to_value(&fd_diag_hessian(&mean, cfg.x0)?);
    }
    Ok(Output::json(json!({ "config": cfg, "result": result }), Status::Holds))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma2Config {
    pub pair: PairSpec,
    pub family: FamilySpec,
    pub t0: Parameter,
    pub nu: MeasureSpec,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
}

pub fn lemma2(config: Option<Value>) -> Result<Output, Error> {
    let cfg: Lemma2Config = parse(config, "lemma2")?;
    let gammas = cfg.gammas.clone().unwrap_or_else(default_gammas);
    let lim = lemma2_limit(&cfg.pair.build()?, &cfg.family.build()?, &cfg.t0, &cfg.nu.build()?, &cfg.x, &gammas)?;
    let rows = lim
        .gammas
        .iter()
        .zip(&lim.quotients)
        .zip(&lim.deviations)
        .map(|((g, q), dev)| vec![g17(*g), g17(*q), g17(lim.prediction), g17(*dev)])
        .collect();
    Ok(Output {
        json: json!({ "config": cfg, "result": lim }),
        csv: Some((vec!["gamma", "quotient", "prediction", "deviation"], rows)),
        status: Status::Holds,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalConfig {
    pub left: MeanSpec,
    pub right: MeanSpec,
    pub x0: f64,
    /// Half-width of the diagonal segment and largest cube radius tried.
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Also sample `left <= right` on the certified cube (or on radius
    /// `radius` when the verdict fails).
    #[serde(default)]
    pub oracle: bool,
}

fn default_radius() -> f64 {
    0.5
}

pub fn compare_local(config: Option<Value>, s: &Settings) -> Result<Output, Error> {
    let cfg: LocalConfig = parse(config, "compare-local")?;
    if !(cfg.radius > 0.0 && cfg.radius.is_finite()) {
        return Err(Error::Input(format!("radius must be positive, got {}", cfg.radius)));
    }
    let (m, n) = (cfg.left.build()?, cfg.right.build()?);
    let nb = Neighborhood {
        radius: cfg.radius,
        ..Neighborhood::default()
    };
    let v = local_verdict(&m, &n, cfg.x0, &nb, &s.tol, s.exec)?;
    let mut result = to_value(&v);
    if cfg.oracle {
        let radius = match (v.verdict.status, v.radius) {
            (Status::Holds, Some(r)) => r,
            _ => cfg.radius,
        };
        let opts = OracleOptions {
            samples: s.samples.unwrap_or(256),
            seed: s.seed,
            exec: s.exec,
            ..OracleOptions::default()
        };
        let o = brute_force_compare(&m, &n, &SampleRegion::Cube { center: cfg.x0, radius }, &opts)?;
        result["oracle"] = to_value(&o);
    }
    let status = v.verdict.status;
    Ok(Output::json(json!({ "config": cfg, "result": result }), status))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GlobalConfig {
    /// The two-variable condition for two pairs on a common family.
    Pairs {
        left: PairSpec,
        right: PairSpec,
        family: FamilySpec,
        domain: Interval,
    },
    /// Quasi-arithmetic generators `f` and `h`.
    QuasiArithmetic { f: FunctionSpec, h: FunctionSpec, domain: Interval },
    /// Power means `H_p` and `H_q`.
    Holder { p: f64, q: f64 },
}

pub fn compare_global(config: Option<Value>, s: &Settings) -> Result<Output, Error> {
    let cfg: GlobalConfig = parse(config, "compare-global")?;
    let (result, status) = match &cfg {
        GlobalConfig::Pairs {
            left,
            right,
            family,
            domain,
        } => {
            let fam = family.build()?;
            let opts = GlobalOptions {
                exec: s.exec,
                ..GlobalOptions::default()
            };
            let v = global_condition_iii(&left.build()?, &right.build()?, &fam, domain, &opts, &s.tol)?;
            let mut result = json!({ "verdict": v });
            if let (PairSpec::Gini { p, q }, PairSpec::Gini { p: r, q: t }) = (left, right) {
                let m_star = fam.m_star(domain, &MStarOptions::default())?;
                let mut go = GiniGlobalOptions::default();
                if let Some(n) = s.samples {
                    go.samples = n.max(3);
                }
                let g = gini_global(*p, *q, *r, *t, m_star.0, &go, &s.tol)?;
                result["m_star"] = to_value(&m_star);
                result["gini"] = to_value(&g);
            }
            (result, v.status)
        }
        GlobalConfig::QuasiArithmetic { f, h, domain } => {
            let r = quasiarith_compare(&f.build()?, &h.build()?, domain, &QuasiArithmeticOptions::default(), &s.tol)?;
            let status = r.verdict.status;
            (to_value(&r), status)
        }
        GlobalConfig::Holder { p, q } => {
            let v = holder_compare(*p, *q);
            let status = v.status;
            (json!({ "verdict": v }), status)
        }
    };
    Ok(Output::json(json!({ "config": cfg, "result": result }), status))
}

/// `[lo, hi, step]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Range(pub f64, pub f64, pub f64);

impl Range {
    fn values(&self) -> Result<Vec<f64>, Error> {
        let Range(lo, hi, step) = *self;
        if !(step > 0.0 && lo <= hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Input(format!("invalid range [{lo}, {hi}, {step}]")));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|k| lo + step * k as f64).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub p: Range,
    pub q: Range,
    pub r: f64,
    pub s: f64,
    #[serde(default = "unbounded")]
    pub m_star: ExtReal,
}

fn unbounded() -> ExtReal {
    ExtReal(f64::INFINITY)
}

impl Default for RegionConfig {
    fn default() -> Self {
        RegionConfig {
            p: Range(-2.0, 2.0, 0.25),
            q: Range(-2.0, 2.0, 0.25),
            r: 1.0,
            s: 1.0,
            m_star: unbounded(),
        }
    }
}

pub fn gini_region(config: Option<Value>, s: &Settings) -> Result<Output, Error> {
    let cfg: RegionConfig = match config {
        None => RegionConfig::default(),
        some => parse(some, "gini-region")?,
    };
    let mut go = GiniGlobalOptions::default();
    if let Some(n) = s.samples {
        go.samples = n.max(3);
    }
    let (ps, qs) = (cfg.p.values()?, cfg.q.values()?);
    let mut rows = Vec::with_capacity(ps.len() * qs.len());
    let mut json_rows = Vec::with_capacity(ps.len() * qs.len());
    for &p in &ps {
        for &q in &qs {
            let g = gini_global(p, q, cfg.r, cfg.s, cfg.m_star.0, &go, &s.tol)?;
            rows.push(vec![
                g17(p),
                g17(q),
                g17(cfg.r),
                g17(cfg.s),
                format!("{:?}", g.verdict.status),
                g17(g.verdict.margin),
            ]);
            json_rows.push(json!({
                "p": p, "q": q, "r": cfg.r, "s": cfg.s,
                "status": g.verdict.status, "margin": ExtReal(g.verdict.margin),
            }));
        }
    }
    Ok(Output {
        json: json!({ "config": cfg, "result": { "rows": json_rows } }),
        csv: Some((vec!["p", "q", "r", "s", "status", "margin"], rows)),
        status: Status::Holds,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Subset of scenarios; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<Vec<String>>,
}

pub fn verify_cmd(config: Option<Value>, s: &Settings) -> Result<Output, Error> {
    let cfg: VerifyConfig = match config {
        None => VerifyConfig::default(),
        some => parse(some, "verify")?,
    };
    let opts = SuiteOptions {
        seed: s.seed,
        samples: s.samples.unwrap_or(SuiteOptions::default().samples),
        tol: s.tol,
        exec: s.exec,
    };
    let report = match &cfg.scenarios {
        None => to_value(&verify(&opts)?),
        Some(names) => {
            let mut out = Vec::new();
            for n in names {
                out.push(genmeans::harness::equivalence_suite(n, &opts)?);
            }
            let pass = out.iter().all(|r| r.pass);
            json!({ "seed": opts.seed, "samples": opts.samples, "scenarios": out, "pass": pass })
        }
    };
    let status = if report["pass"] == json!(true) { Status::Holds } else { Status::Fails };
    let available: Vec<&str> = SCENARIOS.to_vec();
    Ok(Output::json(
        json!({ "config": cfg, "available": available, "result": report }),
        status,
    ))
}
