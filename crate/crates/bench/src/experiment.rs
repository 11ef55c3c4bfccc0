//! Runs the seed × method grid of an [`ExperimentConfig`].

use std::fs::File;
use std::io::BufReader;
use std::sync::Arc;
use std::time::Instant;

use graal::linalg::Vector;
use graal::problems::{
    make_balls_cfp, make_bilinear_saddle, make_linear_cfp, make_logistic, make_nash, make_nonmonotone, parse_libsvm,
    random_gaussian_matrix, synthetic_logistic, GammaRule, LogisticData, NONTRIVIAL_NORM,
};
use graal::prox::ProxOp;
use graal::rng::RngStream;
use graal::solvers::{run, Method, RunOptions, Target, Termination, Trace};
use graal::{FixedPointProblem, VIProblem};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Family, MethodKind, ProblemSpec};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] graal::Error),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

pub enum Instance {
    Vi(VIProblem),
    FixedPoint(FixedPointProblem),
}

impl Instance {
    pub fn dim(&self) -> usize {
        match self {
            Instance::Vi(p) => p.dim(),
            Instance::FixedPoint(t) => t.dim(),
        }
    }
}

/// Loads the LIBSVM file named by the config, if any.
pub fn load_data(spec: &ProblemSpec) -> Result<Option<Arc<LogisticData>>, ExperimentError> {
    let Some(path) = &spec.data else { return Ok(None) };
    let file = File::open(path).map_err(|source| ExperimentError::Io { path: path.display().to_string(), source })?;
    Ok(Some(Arc::new(parse_libsvm(BufReader::new(file))?)))
}

/// Problem instance and start point of one seed.
pub fn build_instance(
    spec: &ProblemSpec,
    seed: u64,
    data: Option<&LogisticData>,
) -> Result<(Instance, Vector), graal::Error> {
    let n = spec.n;
    Ok(match spec.family {
        Family::Nash => (Instance::Vi(make_nash(spec.scenario, n, seed)?), vec![1.0; n]),
        Family::BallsCfp => {
            let t = make_balls_cfp(n, spec.m.expect("validated"), seed)?;
            let start = t.start().expect("balls instances carry a start").to_vec();
            (Instance::FixedPoint(t), start)
        }
        Family::LinearCfp => {
            let t = make_linear_cfp(n, spec.m.expect("validated"), spec.noise_std, seed)?;
            (Instance::FixedPoint(t), vec![0.0; n])
        }
        Family::Logistic => {
            let rule = spec.gamma.map_or(GammaRule::Default, GammaRule::Fixed);
            let problem = match data {
                Some(d) => make_logistic(d, rule)?,
                None => make_logistic(&synthetic_logistic(spec.m.expect("validated"), n, seed)?, rule)?,
            };
            let dim = problem.dim();
            (Instance::Vi(problem), vec![0.0; dim])
        }
        Family::Nonmonotone => (Instance::Vi(make_nonmonotone(n, seed)?), vec![1.0; n]),
        Family::BilinearSaddle => {
            let rows = spec.m.unwrap_or(n);
            let k = random_gaussian_matrix(rows, n, seed)?;
            let problem = make_bilinear_saddle(k, ProxOp::Zero, ProxOp::Zero)?;
            let start = RngStream::substream(seed, 1).normal(0.0, 1.0, rows + n)?;
            (Instance::Vi(problem), start)
        }
    })
}

/// Solver method for `kind` under the config's rule parameters.
pub fn solver_method(config: &ExperimentConfig, kind: MethodKind, dim: usize) -> Result<Method, ConfigError> {
    let spec = &config.methods;
    Ok(match kind {
        MethodKind::Graal => Method::Graal { lambda: spec.lambda },
        MethodKind::Agraal => Method::Agraal(spec.rule),
        MethodKind::AgraalLinear => Method::Agraal(spec.linear_rule()),
        MethodKind::AgraalMetric => Method::AgraalMetric {
            rule: spec.rule,
            m: spec.metric_m.metric(dim, "method.metric_m")?,
            p: spec.metric_p.metric(dim, "method.metric_p")?,
        },
        MethodKind::AgraalFixpoint => Method::AgraalFixedPoint(spec.rule),
        MethodKind::Fbf => Method::Fbf(spec.fbf),
        MethodKind::Pgm => Method::Pgm { lambda: spec.lambda },
        MethodKind::Fista => Method::Fista { lambda: spec.lambda },
        MethodKind::Km => Method::Km,
    })
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub seed: u64,
    pub method: MethodKind,
    pub trace: Option<Trace>,
    /// Failure before the first iteration.
    pub error: Option<String>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub seed: u64,
    pub method: &'static str,
    pub status: String,
    pub iterations: usize,
    pub iterations_to_tol: Option<usize>,
    pub fevals_to_tol: Option<u64>,
    pub total_fevals: u64,
    pub final_residual: Option<f64>,
    pub final_norm: Option<f64>,
    pub final_energy: Option<f64>,
    pub energy_star: Option<f64>,
    pub iterations_to_energy_tol: Option<usize>,
    pub fevals_to_energy_tol: Option<u64>,
    pub wall_seconds: Option<f64>,
    pub success: bool,
}

pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub cells: Vec<CellResult>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentOutput {
    pub fn cell(&self, seed: u64, method: MethodKind) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.seed == seed && c.method == method)
    }

    pub fn row(&self, seed: u64, method: MethodKind) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.seed == seed && r.method == method.name())
    }
}

fn failed_cell(seed: u64, kind: MethodKind, error: String) -> CellResult {
    CellResult { seed, method: kind, trace: None, error: Some(error), wall_seconds: 0.0 }
}

fn run_cell(config: &ExperimentConfig, instance: &Instance, start: &[f64], seed: u64, kind: MethodKind) -> CellResult {
    let fail = |e: String| failed_cell(seed, kind, e);
    let method = match solver_method(config, kind, instance.dim()) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    let opts = RunOptions {
        residual_lambda: config.residual_lambda,
        seed,
        lambda0: config.methods.lambda0,
        record_energy: config.output.energy,
        record_ergodic_energy: config.output.energy && kind.is_golden_ratio(),
        record_time: config.output.timing,
    };
    let id_minus_t;
    let target = match (&instance, kind) {
        (Instance::Vi(p), _) => Target::Vi(p),
        (Instance::FixedPoint(t), MethodKind::AgraalFixpoint | MethodKind::Km) => Target::FixedPoint(t),
        (Instance::FixedPoint(t), _) => {
            id_minus_t = t.to_vi();
            Target::Vi(&id_minus_t)
        }
    };
    let clock = Instant::now();
    let result = run(&method, target, start, &opts, &config.stop);
    let wall_seconds = clock.elapsed().as_secs_f64();
    match result {
        Ok(trace) => {
            if config.output.log_every > 0 {
                for r in trace.records.iter().filter(|r| r.k % config.output.log_every == 0) {
                    log::info!("{} seed {seed} k {} residual {:e}", kind.name(), r.k, r.residual);
                }
            }
            log::debug!(
                "{} seed {seed}: {} after {} iterations",
                kind.name(),
                trace.termination.as_str(),
                trace.iterations()
            );
            CellResult { seed, method: kind, trace: Some(trace), error: None, wall_seconds }
        }
        Err(e) => fail(e.to_string()),
    }
}

fn summarize(config: &ExperimentConfig, cell: &CellResult, energy_star: Option<f64>) -> SummaryRow {
    let tol = config.stop.tol;
    let mut row = SummaryRow {
        seed: cell.seed,
        method: cell.method.name(),
        status: "error".into(),
        iterations: 0,
        iterations_to_tol: None,
        fevals_to_tol: None,
        total_fevals: 0,
        final_residual: None,
        final_norm: None,
        final_energy: None,
        energy_star,
        iterations_to_energy_tol: None,
        fevals_to_energy_tol: None,
        wall_seconds: config.output.timing.then_some(cell.wall_seconds),
        success: false,
    };
    let Some(trace) = &cell.trace else { return row };
    row.status = trace.termination.as_str().into();
    row.iterations = trace.iterations();
    row.total_fevals = trace.fevals();
    row.final_residual = trace.final_residual();
    row.final_norm = Some(graal::linalg::norm(&trace.final_point));
    row.final_energy = trace.records.last().and_then(|r| r.energy);
    if let Some(tol) = tol {
        if let Some(r) = trace.records.iter().find(|r| r.residual <= tol) {
            row.iterations_to_tol = Some(r.k);
            row.fevals_to_tol = Some(r.fevals);
        }
    }
    if let (Some(etol), Some(star)) = (config.energy_tol, energy_star) {
        if let Some(r) = trace.records.iter().find(|r| r.energy.is_some_and(|e| e - star <= etol)) {
            row.iterations_to_energy_tol = Some(r.k);
            row.fevals_to_energy_tol = Some(r.fevals);
        }
    }
    let failed = trace.termination == Termination::NumericalFailure;
    let residual_ok = tol.map(|t| row.final_residual.is_some_and(|r| r <= t));
    let energy_ok = config.energy_tol.map(|_| row.iterations_to_energy_tol.is_some());
    let nontrivial =
        config.problem.family != Family::Nonmonotone || row.final_norm.is_some_and(|z| z >= NONTRIVIAL_NORM);
    let any_target = residual_ok.is_some() || energy_ok.is_some();
    row.success = !failed && any_target && residual_ok.unwrap_or(true) && energy_ok.unwrap_or(true) && nontrivial;
    row
}

/// Smallest energy recorded by any method on each seed.
fn energy_stars(config: &ExperimentConfig, cells: &[CellResult]) -> Vec<(u64, Option<f64>)> {
    config
        .problem
        .seeds
        .iter()
        .map(|&seed| {
            let best = cells
                .iter()
                .filter(|c| c.seed == seed)
                .filter_map(|c| c.trace.as_ref())
                .flat_map(|t| t.records.iter().filter_map(|r| r.energy))
                .filter(|e| e.is_finite())
                .reduce(f64::min);
            (seed, best)
        })
        .collect()
}

/// Runs every `(seed, method)` cell and joins the summary.
///
/// Seeds run in parallel up to `run.workers`; the methods of one seed share
/// its instance and run one after another.
///
/// A cell that fails is recorded with status `error` and does not stop the sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let data = load_data(&config.problem)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let kinds = &config.methods.kinds;
    let per_seed: Vec<Vec<CellResult>> = pool.install(|| {
        config
            .problem
            .seeds
            .par_iter()
            .map(|&seed| match build_instance(&config.problem, seed, data.as_deref()) {
                Ok((instance, start)) => {
                    kinds.iter().map(|&kind| run_cell(config, &instance, &start, seed, kind)).collect()
                }
                Err(e) => kinds.iter().map(|&kind| failed_cell(seed, kind, e.to_string())).collect(),
            })
            .collect()
    });
    let cells: Vec<CellResult> = per_seed.into_iter().flatten().collect();

    let stars = if config.output.energy { energy_stars(config, &cells) } else { Vec::new() };
    let summary = cells
        .iter()
        .map(|c| {
            let star = stars.iter().find(|(s, _)| *s == c.seed).and_then(|(_, e)| *e);
            summarize(config, c, star)
        })
        .collect();
    Ok(ExperimentOutput { config: config.clone(), cells, summary })
}
