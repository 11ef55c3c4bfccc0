//! Run loop shared by every method: stopping, residual bookkeeping and traces.

use std::time::Instant;

use crate::diagnostics::natural_residual_from;
use crate::error::{param, Error, Result};
use crate::linalg::{axpy, dist, Vector};
use crate::problem::{FixedPointProblem, VIProblem};
use crate::prox::DiagonalMetric;
use crate::rng::RngStream;
use crate::solvers::baselines::{
    default_gradient_step, fbf_step, fista_step, km_step, pgm_step, FbfParams, FistaState, PlainState,
};
use crate::solvers::graal::{
    agraal_metric_step, agraal_step, fixedpoint_agraal_step, fixedpoint_warm_start, graal_fixed_step, warm_start,
    SolverState, StepInfo,
};
use crate::solvers::rule::{StepsizeRule, StopRule, GOLDEN_RATIO};

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Fixed stepsize; `None` uses `φ/(2L)` with `φ` the golden ratio.
    Graal {
        lambda: Option<f64>,
    },
    Agraal(StepsizeRule),
    AgraalMetric {
        rule: StepsizeRule,
        m: DiagonalMetric,
        p: DiagonalMetric,
    },
    /// aGRAAL written directly in terms of `T` for `F = id − T`.
    AgraalFixedPoint(StepsizeRule),
    Fbf(FbfParams),
    /// `None` uses `1/L`.
    Pgm {
        lambda: Option<f64>,
    },
    Fista {
        lambda: Option<f64>,
    },
    /// Plain iteration `x⁺ = Tx`.
    Km,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Graal { .. } => "graal",
            Method::Agraal(r) if r.delta() < 1.0 => "agraal-linear",
            Method::Agraal(_) => "agraal",
            Method::AgraalMetric { .. } => "agraal-metric",
            Method::AgraalFixedPoint(_) => "agraal-fixpoint",
            Method::Fbf(_) => "fbf",
            Method::Pgm { .. } => "pgm",
            Method::Fista { .. } => "fista",
            Method::Km => "km",
        }
    }
}

/// Problem a run works on.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Vi(&'a VIProblem),
    FixedPoint(&'a FixedPointProblem),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// `λ` in the natural residual `r(z, λ)` used for stopping.
    pub residual_lambda: f64,
    /// Seed of the warm-start perturbation.
    pub seed: u64,
    /// Initial stepsize for aGRAAL; `None` uses the local inverse Lipschitz estimate.
    pub lambda0: Option<f64>,
    pub record_energy: bool,
    pub record_ergodic_energy: bool,
    pub record_time: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            residual_lambda: 1.0,
            seed: 0,
            lambda0: None,
            record_energy: false,
            record_ergodic_energy: false,
            record_time: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    MaxFevals,
    Timeout,
    NumericalFailure,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::MaxFevals => "max_fevals",
            Termination::Timeout => "timeout",
            Termination::NumericalFailure => "numerical_failure",
        }
    }
}

/// One completed iteration. Point-valued quantities refer to the iterate the step produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub lambda: Option<f64>,
    pub lambda_prev: Option<f64>,
    pub theta: Option<f64>,
    pub theta_prev: Option<f64>,
    pub residual: f64,
    pub energy: Option<f64>,
    /// `J(Z^k)` at the ergodic point.
    pub ergodic_energy: Option<f64>,
    pub dist_opt: Option<f64>,
    pub fevals: u64,
    pub proxevals: u64,
    pub elapsed_s: Option<f64>,
    pub dz_sq: Option<f64>,
    pub df_sq: Option<f64>,
    pub delta: Option<f64>,
    /// `‖z‖` of the produced iterate.
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub method: &'static str,
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
    /// Last finite iterate.
    pub final_point: Vector,
    pub lambda_sum: f64,
    /// `Σ λ_i z^i` over the points at which `F` was evaluated.
    pub weighted_sum: Vector,
    pub error: Option<Error>,
    /// Evaluations spent before the first iteration (warm start).
    pub setup_fevals: u64,
}

impl Trace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.records.last().map(|r| r.residual)
    }

    pub fn fevals(&self) -> u64 {
        self.records.last().map_or(self.setup_fevals, |r| r.fevals)
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// Smallest `λ_k` over the run.
    pub fn min_lambda(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.lambda).reduce(f64::min)
    }
}

fn vi(t: Target<'_>) -> &VIProblem {
    match t {
        Target::Vi(p) => p,
        Target::FixedPoint(_) => unreachable!("checked at setup"),
    }
}

fn fp(t: Target<'_>) -> &FixedPointProblem {
    match t {
        Target::FixedPoint(p) => p,
        Target::Vi(_) => unreachable!("checked at setup"),
    }
}

enum Runner {
    Graal { state: SolverState, lambda: f64 },
    Agraal { state: SolverState, rule: StepsizeRule },
    Metric { state: SolverState, rule: StepsizeRule, m: DiagonalMetric, p: DiagonalMetric },
    FixedPointAgraal { state: SolverState, rule: StepsizeRule },
    Fbf { state: PlainState, params: FbfParams },
    Pgm { state: PlainState, lambda: f64 },
    Fista { state: FistaState, lambda: f64 },
    Km { state: PlainState },
}

struct Outcome {
    info: Option<StepInfo>,
    lambda: Option<f64>,
    /// Point where `F` or `T` was evaluated, with its weight `λ`.
    eval_point: Vector,
}

impl Runner {
    fn point(&self) -> &[f64] {
        match self {
            Runner::Graal { state, .. }
            | Runner::Agraal { state, .. }
            | Runner::Metric { state, .. }
            | Runner::FixedPointAgraal { state, .. } => &state.z,
            Runner::Fbf { state, .. } | Runner::Pgm { state, .. } | Runner::Km { state } => &state.z,
            Runner::Fista { state, .. } => &state.x,
        }
    }

    fn counters(&self) -> (u64, u64) {
        match self {
            Runner::Graal { state, .. }
            | Runner::Agraal { state, .. }
            | Runner::Metric { state, .. }
            | Runner::FixedPointAgraal { state, .. } => (state.fevals, state.proxevals),
            Runner::Fbf { state, .. } | Runner::Pgm { state, .. } | Runner::Km { state } => {
                (state.fevals, state.proxevals)
            }
            Runner::Fista { state, .. } => (state.fevals, state.proxevals),
        }
    }

    fn step(&mut self, target: Target<'_>) -> Result<Outcome> {
        match self {
            Runner::Graal { state, lambda } => {
                let at = state.z.clone();
                let info = graal_fixed_step(state, vi(target), *lambda)?;
                Ok(Outcome { info: Some(info), lambda: Some(*lambda), eval_point: at })
            }
            Runner::Agraal { state, rule } => {
                let at = state.z.clone();
                let info = agraal_step(state, vi(target), rule)?;
                Ok(Outcome { lambda: Some(info.lambda), info: Some(info), eval_point: at })
            }
            Runner::Metric { state, rule, m, p } => {
                let at = state.z.clone();
                let info = agraal_metric_step(state, vi(target), m, p, rule)?;
                Ok(Outcome { lambda: Some(info.lambda), info: Some(info), eval_point: at })
            }
            Runner::FixedPointAgraal { state, rule } => {
                let at = state.z.clone();
                let (info, _) = fixedpoint_agraal_step(state, fp(target), rule)?;
                Ok(Outcome { lambda: Some(info.lambda), info: Some(info), eval_point: at })
            }
            Runner::Fbf { state, params } => {
                let at = state.z.clone();
                let info = fbf_step(state, vi(target), params)?;
                Ok(Outcome { info: None, lambda: Some(info.lambda), eval_point: at })
            }
            Runner::Pgm { state, lambda } => {
                let at = state.z.clone();
                pgm_step(state, vi(target), *lambda)?;
                Ok(Outcome { info: None, lambda: Some(*lambda), eval_point: at })
            }
            Runner::Fista { state, lambda } => {
                let at = state.y.clone();
                fista_step(state, vi(target), *lambda)?;
                Ok(Outcome { info: None, lambda: Some(*lambda), eval_point: at })
            }
            Runner::Km { state } => {
                let at = state.z.clone();
                km_step(state, fp(target))?;
                Ok(Outcome { info: None, lambda: None, eval_point: at })
            }
        }
    }
}

fn setup(method: &Method, target: Target<'_>, start: &[f64], opts: &RunOptions) -> Result<Runner> {
    let mut rng = RngStream::new(opts.seed);
    let wrong_target = |kind: &str| Err(Error::Capability(format!("{} cannot run on a {kind}", method.name())));
    match (method, target) {
        (Method::Graal { lambda }, Target::Vi(p)) => {
            let lambda = match lambda {
                Some(l) => *l,
                None => {
                    let l = p
                        .lipschitz()
                        .ok_or_else(|| Error::Capability("fixed-step GRAAL needs a Lipschitz constant".into()))?;
                    if !(l > 0.0) {
                        return param("default GRAAL stepsize needs L > 0");
                    }
                    GOLDEN_RATIO / (2.0 * l)
                }
            };
            Ok(Runner::Graal { state: SolverState::new(start.to_vec(), lambda), lambda })
        }
        (Method::Agraal(rule), Target::Vi(p)) => {
            Ok(Runner::Agraal { state: warm_start(p, start, &mut rng, opts.lambda0)?, rule: *rule })
        }
        (Method::AgraalMetric { rule, m, p: pm }, Target::Vi(p)) => {
            if m.dim() != p.dim() || pm.dim() != p.dim() {
                return param(format!("metrics must have dimension {}", p.dim()));
            }
            Ok(Runner::Metric {
                state: warm_start(p, start, &mut rng, opts.lambda0)?,
                rule: *rule,
                m: m.clone(),
                p: pm.clone(),
            })
        }
        (Method::AgraalFixedPoint(rule), Target::FixedPoint(t)) => Ok(Runner::FixedPointAgraal {
            state: fixedpoint_warm_start(t, start, &mut rng, opts.lambda0)?,
            rule: *rule,
        }),
        (Method::Fbf(params), Target::Vi(p)) => {
            params.validate()?;
            Ok(Runner::Fbf { state: PlainState::new(p.g().project_domain(start), params.lambda0), params: *params })
        }
        (Method::Pgm { lambda }, Target::Vi(p)) => {
            let lambda = match lambda {
                Some(l) => *l,
                None => default_gradient_step(p)?,
            };
            Ok(Runner::Pgm { state: PlainState::new(start.to_vec(), lambda), lambda })
        }
        (Method::Fista { lambda }, Target::Vi(p)) => {
            let lambda = match lambda {
                Some(l) => *l,
                None => default_gradient_step(p)?,
            };
            Ok(Runner::Fista { state: FistaState::new(start.to_vec()), lambda })
        }
        (Method::Km, Target::FixedPoint(_)) => Ok(Runner::Km { state: PlainState::new(start.to_vec(), 1.0) }),
        (Method::AgraalFixedPoint(_) | Method::Km, Target::Vi(_)) => wrong_target("variational inequality"),
        (_, Target::FixedPoint(_)) => wrong_target("fixed-point problem; use its id - T form"),
    }
}

struct Measure {
    residual: f64,
    energy: Option<f64>,
    dist_opt: Option<f64>,
}

fn measure(target: Target<'_>, z: &[f64], opts: &RunOptions) -> Result<Measure> {
    match target {
        Target::Vi(p) => {
            let fz = p.eval_untracked(z)?;
            let residual = natural_residual_from(z, &fz, opts.residual_lambda, p.g());
            let energy = if opts.record_energy { p.energy(z) } else { None };
            Ok(Measure { residual, energy, dist_opt: p.dist_to_solution(z) })
        }
        Target::FixedPoint(t) => {
            Ok(Measure { residual: t.residual(z), energy: None, dist_opt: t.fixed_point().map(|x| dist(x, z)) })
        }
    }
}

fn dim(target: Target<'_>) -> usize {
    match target {
        Target::Vi(p) => p.dim(),
        Target::FixedPoint(t) => t.dim(),
    }
}

/// Iterates `method` from `start` until `stop` fires.
///
/// The stopping residual is `r(z, residual_lambda)` for variational
/// inequalities and `‖x − Tx‖` for fixed-point problems, measured at every
/// produced iterate without touching the evaluation counters. If the start
/// already satisfies the tolerance, the trace is empty and converged.
/// Numerical trouble inside a step ends the run with
/// [`Termination::NumericalFailure`] and keeps the last finite iterate.
pub fn run(method: &Method, target: Target<'_>, start: &[f64], opts: &RunOptions, stop: &StopRule) -> Result<Trace> {
    stop.validate()?;
    if !(opts.residual_lambda > 0.0) {
        return param("residual stepsize must be positive");
    }
    let n = dim(target);
    if start.len() != n {
        return param(format!("start has dimension {}, problem has {n}", start.len()));
    }
    if opts.record_ergodic_energy && !matches!(target, Target::Vi(p) if p.has_energy()) {
        return Err(Error::Capability("ergodic energy needs a problem with an energy".into()));
    }
    let mut trace = Trace {
        method: method.name(),
        records: Vec::new(),
        termination: Termination::MaxIters,
        final_point: start.to_vec(),
        lambda_sum: 0.0,
        weighted_sum: vec![0.0; n],
        error: None,
        setup_fevals: 0,
    };
    if stop.max_iters == Some(0) {
        return Ok(trace);
    }
    if let Some(tol) = stop.tol {
        if measure(target, start, opts)?.residual <= tol {
            trace.termination = Termination::Converged;
            return Ok(trace);
        }
    }

    let mut runner = setup(method, target, start, opts)?;
    trace.setup_fevals = runner.counters().0;
    let clock = Instant::now();
    loop {
        let k = trace.records.len() + 1;
        let outcome = match runner.step(target) {
            Ok(o) => o,
            Err(e @ (Error::Numerical { .. } | Error::Domain(_) | Error::Linesearch { .. })) => {
                log::warn!("{} stopped at iteration {k}: {e}", method.name());
                trace.termination = Termination::NumericalFailure;
                trace.error = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let weight = outcome.lambda.unwrap_or(1.0);
        trace.lambda_sum += weight;
        axpy(weight, &outcome.eval_point, &mut trace.weighted_sum);

        let z = runner.point();
        let m = match measure(target, z, opts) {
            Ok(m) => m,
            Err(e) => {
                trace.termination = Termination::NumericalFailure;
                trace.error = Some(e);
                break;
            }
        };
        let ergodic_energy = match target {
            Target::Vi(p) if opts.record_ergodic_energy => {
                let zk: Vector = trace.weighted_sum.iter().map(|s| s / trace.lambda_sum).collect();
                p.energy(&zk)
            }
            _ => None,
        };
        let (fevals, proxevals) = runner.counters();
        let info = outcome.info;
        trace.records.push(TraceRecord {
            k,
            lambda: outcome.lambda,
            lambda_prev: info.map(|i| i.lambda_prev),
            theta: info.and_then(|i| i.theta),
            theta_prev: info.and_then(|i| i.theta_prev),
            residual: m.residual,
            energy: m.energy,
            ergodic_energy,
            dist_opt: m.dist_opt,
            fevals,
            proxevals,
            elapsed_s: opts.record_time.then(|| clock.elapsed().as_secs_f64()),
            dz_sq: info.and_then(|i| i.dz_sq),
            df_sq: info.and_then(|i| i.df_sq),
            delta: info.and_then(|i| i.delta),
            norm: crate::linalg::norm(z),
        });
        trace.final_point = z.to_vec();

        if !m.residual.is_finite() {
            trace.termination = Termination::NumericalFailure;
            trace.error = Some(Error::Numerical { iteration: k, message: "non-finite residual".into() });
            break;
        }
        if stop.tol.is_some_and(|tol| m.residual <= tol) {
            trace.termination = Termination::Converged;
            break;
        }
        if stop.max_iters.is_some_and(|max| k >= max) {
            trace.termination = Termination::MaxIters;
            break;
        }
        if stop.max_fevals.is_some_and(|max| fevals >= max) {
            trace.termination = Termination::MaxFevals;
            break;
        }
        if stop.max_seconds.is_some_and(|s| clock.elapsed().as_secs_f64() >= s) {
            trace.termination = Termination::Timeout;
            break;
        }
    }
    Ok(trace)
}
