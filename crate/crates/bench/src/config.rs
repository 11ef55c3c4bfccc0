//! Experiment configuration.
//!
//! Configs are flat UTF-8 text with one `section.key = value` per line and
//! `#` comments:
//!
//! ```text
//! problem.family = nash
//! problem.scenario = a
//! problem.n = 50
//! problem.seeds = 1..10
//! method.names = agraal, fbf
//! stop.tol = 1e-6
//! stop.max_iters = 20000
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use graal::problems::NashScenario;
use graal::prox::DiagonalMetric;
use graal::solvers::{FbfParams, StepsizeRule, StopRule};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err<T>(field: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Field { field: field.to_string(), message: message.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Nash,
    BallsCfp,
    LinearCfp,
    Logistic,
    Nonmonotone,
    BilinearSaddle,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Nash,
        Family::BallsCfp,
        Family::LinearCfp,
        Family::Logistic,
        Family::Nonmonotone,
        Family::BilinearSaddle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Nash => "nash",
            Family::BallsCfp => "balls-cfp",
            Family::LinearCfp => "linear-cfp",
            Family::Logistic => "logistic",
            Family::Nonmonotone => "nonmonotone",
            Family::BilinearSaddle => "bilinear-saddle",
        }
    }

    /// Parameters the family reads, with a short description each.
    pub fn parameters(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Family::Nash => &[("n", "number of firms"), ("scenario", "a (gamma 1.1) or b (gamma 1.5)")],
            Family::BallsCfp => &[("n", "dimension"), ("m", "number of balls")],
            Family::LinearCfp => &[("n", "unknowns"), ("m", "equations"), ("noise_std", "noise on b (default 0)")],
            Family::Logistic => &[
                ("m", "samples (synthetic data)"),
                ("n", "features (synthetic data)"),
                ("data", "LIBSVM file, replaces synthetic data"),
                ("gamma", "l1 weight (default 0.005 |A^T b|_inf)"),
            ],
            Family::Nonmonotone => &[("n", "dimension")],
            Family::BilinearSaddle => &[("n", "columns of K (x block)"), ("m", "rows of K (y block, default n)")],
        }
    }

    pub fn is_fixed_point(self) -> bool {
        matches!(self, Family::BallsCfp | Family::LinearCfp)
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family '{s}' (expected one of {})", family_list()))
    }
}

fn family_list() -> String {
    Family::ALL.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MethodKind {
    Graal,
    Agraal,
    AgraalLinear,
    AgraalMetric,
    AgraalFixpoint,
    Fbf,
    Pgm,
    Fista,
    Km,
}

impl MethodKind {
    pub const ALL: [MethodKind; 9] = [
        MethodKind::Graal,
        MethodKind::Agraal,
        MethodKind::AgraalLinear,
        MethodKind::AgraalMetric,
        MethodKind::AgraalFixpoint,
        MethodKind::Fbf,
        MethodKind::Pgm,
        MethodKind::Fista,
        MethodKind::Km,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Graal => "graal",
            MethodKind::Agraal => "agraal",
            MethodKind::AgraalLinear => "agraal-linear",
            MethodKind::AgraalMetric => "agraal-metric",
            MethodKind::AgraalFixpoint => "agraal-fixpoint",
            MethodKind::Fbf => "fbf",
            MethodKind::Pgm => "pgm",
            MethodKind::Fista => "fista",
            MethodKind::Km => "km",
        }
    }

    /// GRAAL and its adaptive variants, the methods whose ergodic energy is recorded.
    pub fn is_golden_ratio(self) -> bool {
        !matches!(self, MethodKind::Fbf | MethodKind::Pgm | MethodKind::Fista | MethodKind::Km)
    }

    /// Whether the method can run on `family`.
    pub fn supports(self, family: Family) -> bool {
        match self {
            MethodKind::AgraalFixpoint | MethodKind::Km => family.is_fixed_point(),
            MethodKind::Pgm | MethodKind::Fista => family == Family::Logistic,
            MethodKind::Graal => matches!(family, Family::BilinearSaddle | Family::Logistic),
            MethodKind::AgraalMetric | MethodKind::Fbf => !family.is_fixed_point(),
            MethodKind::Agraal | MethodKind::AgraalLinear => true,
        }
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodKind::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = MethodKind::ALL.iter().map(|m| m.name()).collect();
            format!("unknown method '{s}' (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub family: Family,
    pub n: usize,
    pub m: Option<usize>,
    pub scenario: NashScenario,
    pub noise_std: f64,
    pub data: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub seeds: Vec<u64>,
}

/// Diagonal weights given either as one value for every coordinate or as a full list.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Uniform(f64),
    List(Vec<f64>),
}

impl Weights {
    pub fn metric(&self, n: usize, field: &str) -> Result<DiagonalMetric, ConfigError> {
        let w = match self {
            Weights::Uniform(v) => vec![*v; n],
            Weights::List(v) if v.len() == n => v.clone(),
            Weights::List(v) => return field_err(field, format!("has {} weights, problem dimension is {n}", v.len())),
        };
        DiagonalMetric::new(w).or_else(|e| field_err(field, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub kinds: Vec<MethodKind>,
    pub rule: StepsizeRule,
    /// `δ` used by `agraal-linear`.
    pub linear_delta: f64,
    /// Fixed stepsize for graal, pgm and fista; their defaults apply otherwise.
    pub lambda: Option<f64>,
    pub lambda0: Option<f64>,
    pub fbf: FbfParams,
    pub metric_m: Weights,
    pub metric_p: Weights,
}

impl MethodSpec {
    pub fn linear_rule(&self) -> StepsizeRule {
        StepsizeRule::new(self.rule.phi(), self.rule.lambda_max(), self.linear_delta).expect("validated")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub log_every: usize,
    pub energy: bool,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub methods: MethodSpec,
    pub stop: StopRule,
    /// Target gap `J(x^k) − J*` reported for composite problems.
    pub energy_tol: Option<f64>,
    pub output: OutputSpec,
    pub residual_lambda: f64,
    pub workers: Option<usize>,
}

/// `key → (value, line)` in file order of first appearance.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: format!("expected 'section.key = value', found '{content}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let valid_key = key.split_once('.').is_some_and(|(s, k)| {
                !s.is_empty() && !k.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c))
            });
            if !valid_key {
                return Err(ConfigError::Syntax { line: line_no, message: format!("invalid key '{key}'") });
            }
            if raw.entries.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
                return Err(ConfigError::Syntax { line: line_no, message: format!("duplicate key '{key}'") });
            }
        }
        Ok(raw)
    }

    /// Sets or replaces a value, as command-line overrides do.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).or_else(|e| field_err(key, format!("cannot parse '{v}': {e}"))),
        }
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => field_err(key, format!("expected true or false, found '{v}'")),
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "experiment.name",
    "problem.family",
    "problem.n",
    "problem.m",
    "problem.scenario",
    "problem.noise_std",
    "problem.data",
    "problem.gamma",
    "problem.seeds",
    "method.names",
    "method.phi",
    "method.lambda_max",
    "method.delta",
    "method.linear_delta",
    "method.lambda",
    "method.lambda0",
    "method.fbf_nu",
    "method.fbf_shrink",
    "method.fbf_grow",
    "method.fbf_lambda0",
    "method.metric_m",
    "method.metric_p",
    "stop.tol",
    "stop.max_iters",
    "stop.max_fevals",
    "stop.max_seconds",
    "stop.energy_tol",
    "output.dir",
    "output.log_every",
    "output.energy",
    "output.timing",
    "run.residual_lambda",
    "run.workers",
];

/// `"1..10"` (inclusive), `"3"` or `"1, 4, 9"`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
        if b < a {
            return Err(format!("empty seed range {a}..{b}"));
        }
        return Ok((a..=b).collect());
    }
    let seeds: Result<Vec<u64>, _> = s.split(',').map(|t| t.trim().parse::<u64>()).collect();
    let seeds = seeds.map_err(|e| format!("bad seed list: {e}"))?;
    if seeds.is_empty() {
        return Err("no seeds".into());
    }
    Ok(seeds)
}

fn parse_weights(s: &str) -> Result<Weights, String> {
    let values: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let values = values.map_err(|e| format!("bad weight: {e}"))?;
    Ok(match values.as_slice() {
        [v] => Weights::Uniform(*v),
        _ => Weights::List(values),
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        if let Some(unknown) = raw.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return field_err(unknown, "unknown key");
        }
        let family: Family = match raw.get("problem.family") {
            Some(f) => f.parse().or_else(|e| field_err("problem.family", e))?,
            None => return field_err("problem.family", format!("required (one of {})", family_list())),
        };
        let n = raw.parsed::<usize>("problem.n")?;
        let m = raw.parsed::<usize>("problem.m")?;
        let data = raw.get("problem.data").map(PathBuf::from);
        let n = match (family, n) {
            (_, Some(0)) => return field_err("problem.n", "must be at least 1"),
            (_, Some(n)) => n,
            (Family::Logistic, None) if data.is_some() => 0,
            (_, None) => return field_err("problem.n", format!("required for family {}", family.name())),
        };
        if m == Some(0) {
            return field_err("problem.m", "must be at least 1");
        }
        if matches!(family, Family::BallsCfp | Family::LinearCfp) && m.is_none() {
            return field_err("problem.m", format!("required for family {}", family.name()));
        }
        if family == Family::Logistic && data.is_none() && m.is_none() {
            return field_err("problem.m", "required for synthetic logistic data");
        }
        if data.is_some() && family != Family::Logistic {
            return field_err("problem.data", "only the logistic family reads data files");
        }
        let scenario = match raw.get("problem.scenario") {
            None if family == Family::Nash => {
                return field_err("problem.scenario", "required for family nash (a or b)")
            }
            None | Some("a") => NashScenario::A,
            Some("b") => NashScenario::B,
            Some(s) => return field_err("problem.scenario", format!("expected a or b, found '{s}'")),
        };
        let noise_std = raw.parsed::<f64>("problem.noise_std")?.unwrap_or(0.0);
        if !(noise_std >= 0.0) {
            return field_err("problem.noise_std", "must be nonnegative");
        }
        let gamma = raw.parsed::<f64>("problem.gamma")?;
        if gamma.is_some_and(|g| !(g >= 0.0)) {
            return field_err("problem.gamma", "must be nonnegative");
        }
        let seeds = match raw.get("problem.seeds") {
            Some(s) => parse_seeds(s).or_else(|e| field_err("problem.seeds", e))?,
            None => vec![0],
        };

        let kinds: Vec<MethodKind> = match raw.get("method.names") {
            Some(s) => s
                .split(',')
                .map(|t| t.trim().parse::<MethodKind>().or_else(|e| field_err("method.names", e)))
                .collect::<Result<_, _>>()?,
            None => return field_err("method.names", "required"),
        };
        if kinds.is_empty() {
            return field_err("method.names", "no methods");
        }
        for (i, k) in kinds.iter().enumerate() {
            if !k.supports(family) {
                return field_err("method.names", format!("{} cannot run on family {}", k.name(), family.name()));
            }
            if kinds[..i].contains(k) {
                return field_err("method.names", format!("{} listed twice", k.name()));
            }
        }
        let phi = raw.parsed::<f64>("method.phi")?.unwrap_or(StepsizeRule::DEFAULT_PHI);
        let lambda_max = raw.parsed::<f64>("method.lambda_max")?.unwrap_or(StepsizeRule::DEFAULT_LAMBDA_MAX);
        let delta = raw.parsed::<f64>("method.delta")?.unwrap_or(1.0);
        let rule = StepsizeRule::new(phi, lambda_max, delta).or_else(|e| {
            let field = match &e {
                graal::Error::Parameter(msg) if msg.starts_with("phi") => "method.phi",
                graal::Error::Parameter(msg) if msg.starts_with("lambda_max") => "method.lambda_max",
                _ => "method.delta",
            };
            field_err(field, e.to_string())
        })?;
        let linear_delta = raw.parsed::<f64>("method.linear_delta")?.unwrap_or(StepsizeRule::LINEAR_DELTA);
        if !(linear_delta > 0.0 && linear_delta <= 1.0) {
            return field_err("method.linear_delta", "must lie in (0, 1]");
        }
        let lambda = raw.parsed::<f64>("method.lambda")?;
        if lambda.is_some_and(|l| !(l > 0.0)) {
            return field_err("method.lambda", "must be positive");
        }
        let lambda0 = raw.parsed::<f64>("method.lambda0")?;
        if lambda0.is_some_and(|l| !(l > 0.0)) {
            return field_err("method.lambda0", "must be positive");
        }
        let defaults = FbfParams::default();
        let fbf = FbfParams {
            nu: raw.parsed("method.fbf_nu")?.unwrap_or(defaults.nu),
            shrink: raw.parsed("method.fbf_shrink")?.unwrap_or(defaults.shrink),
            grow: raw.parsed("method.fbf_grow")?.unwrap_or(defaults.grow),
            lambda0: raw.parsed("method.fbf_lambda0")?.unwrap_or(defaults.lambda0),
        };
        fbf.validate().or_else(|e| field_err("method.fbf_*", e.to_string()))?;
        let weights = |key: &str| -> Result<Weights, ConfigError> {
            match raw.get(key) {
                None => Ok(Weights::Uniform(1.0)),
                Some(s) => {
                    let w = parse_weights(s).or_else(|e| field_err(key, e))?;
                    let ok = match &w {
                        Weights::Uniform(v) => *v > 0.0 && v.is_finite(),
                        Weights::List(v) => v.iter().all(|x| *x > 0.0 && x.is_finite()),
                    };
                    if !ok {
                        return field_err(key, "weights must be positive and finite");
                    }
                    Ok(w)
                }
            }
        };
        let methods = MethodSpec {
            kinds,
            rule,
            linear_delta,
            lambda,
            lambda0,
            fbf,
            metric_m: weights("method.metric_m")?,
            metric_p: weights("method.metric_p")?,
        };

        let stop = StopRule {
            tol: raw.parsed("stop.tol")?,
            max_iters: raw.parsed("stop.max_iters")?,
            max_fevals: raw.parsed("stop.max_fevals")?,
            max_seconds: raw.parsed("stop.max_seconds")?,
        };
        stop.validate().or_else(|e| field_err("stop", e.to_string()))?;
        let energy_tol = raw.parsed::<f64>("stop.energy_tol")?;
        if energy_tol.is_some_and(|t| !(t > 0.0)) {
            return field_err("stop.energy_tol", "must be positive");
        }
        if energy_tol.is_some() && family != Family::Logistic {
            return field_err("stop.energy_tol", "only composite problems (logistic) have an energy");
        }

        let output = OutputSpec {
            dir: raw.get("output.dir").map(PathBuf::from),
            log_every: raw.parsed("output.log_every")?.unwrap_or(0),
            energy: raw.bool("output.energy", family == Family::Logistic)?,
            timing: raw.bool("output.timing", false)?,
        };
        if output.energy && family != Family::Logistic {
            return field_err("output.energy", "only composite problems (logistic) have an energy");
        }
        let residual_lambda = raw.parsed::<f64>("run.residual_lambda")?.unwrap_or(1.0);
        if !(residual_lambda > 0.0) {
            return field_err("run.residual_lambda", "must be positive");
        }
        let workers = raw.parsed::<usize>("run.workers")?;
        if workers == Some(0) {
            return field_err("run.workers", "must be at least 1");
        }
        let name = raw.get("experiment.name").map(str::to_string).unwrap_or_else(|| family.name().to_string());
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "-_".contains(c)) {
            return field_err("experiment.name", "use letters, digits, '-' and '_' only");
        }
        Ok(ExperimentConfig {
            name,
            problem: ProblemSpec { family, n, m, scenario, noise_std, data, gamma, seeds },
            methods,
            stop,
            energy_tol,
            output,
            residual_lambda,
            workers,
        })
    }
}
