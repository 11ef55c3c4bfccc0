//! Golden Ratio Algorithms.
//!
//! Every step of the family has the same shape:
//!
//! ```text
//! z̄^k     = ((φ − 1) z^k + z̄^{k−1}) / φ
//! z^{k+1} = prox_{λ_k g}(z̄^k − λ_k F(z^k))
//! ```
//!
//! with a fixed `λ` and `φ` equal to the golden ratio for GRAAL, and with
//! `λ_k` chosen from the observed local Lipschitz behaviour of `F` for aGRAAL.
//! Each step evaluates `F` once (at `z^k`) and reuses the cached `F(z^{k−1})`.

use crate::error::{param, Error, Result};
use crate::linalg::{all_finite, dist, dist_sq, Vector};
use crate::problem::{FixedPointProblem, VIProblem};
use crate::prox::DiagonalMetric;
use crate::rng::RngStream;
use crate::solvers::rule::{StepsizeRule, GOLDEN_RATIO};

/// Relative size of the warm-start perturbation `z⁰ − z¹`.
pub const WARM_START_PERTURBATION: f64 = 1e-6;
/// Fresh perturbations tried when `F(z⁰) = F(z¹)`.
pub const WARM_START_RETRIES: usize = 10;

/// Iterate state between two steps.
///
/// Before step `k`: `z = z^k`, `z_prev = z^{k−1}`, `z_bar = z̄^{k−1}`,
/// `f_prev = F(z^{k−1})`, `lambda = λ_{k−1}`, `lambda_prev = λ_{k−2}`,
/// `theta = θ_{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub z: Vector,
    pub z_prev: Vector,
    pub z_bar: Vector,
    pub f_prev: Option<Vector>,
    pub lambda: f64,
    pub lambda_prev: f64,
    pub theta: f64,
    /// Index of the next step (starts at 1).
    pub k: usize,
    pub fevals: u64,
    pub proxevals: u64,
}

impl SolverState {
    /// `z̄⁰ = z¹`, `θ₀ = 1`, no cached operator value.
    pub fn new(z1: Vector, lambda0: f64) -> Self {
        Self {
            z_prev: z1.clone(),
            z_bar: z1.clone(),
            z: z1,
            f_prev: None,
            lambda: lambda0,
            lambda_prev: lambda0,
            theta: 1.0,
            k: 1,
            fevals: 0,
            proxevals: 0,
        }
    }

    /// State for aGRAAL from a pair `z⁰, z¹` with known `F(z⁰)`.
    pub fn with_history(z1: Vector, z0: Vector, f0: Vector, lambda0: f64) -> Self {
        let mut s = Self::new(z1, lambda0);
        s.z_prev = z0;
        s.f_prev = Some(f0);
        s
    }
}

/// Quantities of one completed step, recorded by the driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub k: usize,
    pub lambda: f64,
    /// `λ_{k−1}`, the stepsize of the previous step (or `λ₀`).
    pub lambda_prev: f64,
    pub theta: Option<f64>,
    pub theta_prev: Option<f64>,
    /// `‖z^k − z^{k−1}‖²` in the metric the stepsize used.
    pub dz_sq: Option<f64>,
    /// `‖F(z^k) − F(z^{k−1})‖²` in the metric the stepsize used.
    pub df_sq: Option<f64>,
    pub delta: Option<f64>,
}

fn numerical(k: usize, what: &str) -> Error {
    Error::Numerical { iteration: k, message: format!("non-finite {what}") }
}

fn averaged(z: &[f64], z_bar: &[f64], phi: f64) -> Vector {
    z.iter().zip(z_bar).map(|(a, b)| ((phi - 1.0) * a + b) / phi).collect()
}

/// One GRAAL step with fixed `λ ∈ (0, φ/(2L)]`, `φ` the golden ratio.
pub fn graal_fixed_step(state: &mut SolverState, problem: &VIProblem, lambda: f64) -> Result<StepInfo> {
    let l =
        problem.lipschitz().ok_or_else(|| Error::Capability("fixed-step GRAAL needs a Lipschitz constant".into()))?;
    if !(lambda > 0.0) || (l > 0.0 && lambda > GOLDEN_RATIO / (2.0 * l) * (1.0 + 1e-12)) {
        return param(format!("GRAAL stepsize {lambda} outside (0, phi/(2L)] with L = {l}"));
    }
    let k = state.k;
    let fz = problem.eval(&state.z)?;
    if !all_finite(&fz) {
        return Err(numerical(k, "operator value"));
    }
    let z_bar = averaged(&state.z, &state.z_bar, GOLDEN_RATIO);
    let w: Vector = z_bar.iter().zip(&fz).map(|(b, f)| b - lambda * f).collect();
    let z_next = problem.g().prox(&w, lambda);
    if !all_finite(&z_next) {
        return Err(numerical(k, "iterate"));
    }
    state.z_prev = std::mem::replace(&mut state.z, z_next);
    state.z_bar = z_bar;
    state.f_prev = Some(fz);
    state.lambda_prev = state.lambda;
    state.lambda = lambda;
    state.k += 1;
    state.fevals += 1;
    state.proxevals += 1;
    Ok(StepInfo {
        k,
        lambda,
        lambda_prev: state.lambda_prev,
        theta: None,
        theta_prev: None,
        dz_sq: None,
        df_sq: None,
        delta: None,
    })
}

/// `(λ_k, θ_k)` from the adaptive rule; `dz_sq / df_sq` is `+∞` whenever `df_sq = 0`.
pub fn agraal_stepsize(
    lambda_prev: f64,
    theta_prev: f64,
    dz_sq: f64,
    df_sq: f64,
    rule: &StepsizeRule,
) -> Result<(f64, f64)> {
    if !(lambda_prev > 0.0) || !lambda_prev.is_finite() {
        return Err(Error::StateCorruption(format!("previous stepsize {lambda_prev} is not positive")));
    }
    if !(theta_prev > 0.0) {
        return Err(Error::StateCorruption(format!("previous ratio {theta_prev} is not positive")));
    }
    let phi = rule.phi();
    let local = if df_sq == 0.0 {
        f64::INFINITY
    } else {
        phi * rule.delta() * theta_prev / (4.0 * lambda_prev) * (dz_sq / df_sq)
    };
    let lambda = (rule.rho() * lambda_prev).min(local).min(rule.lambda_max());
    Ok((lambda, phi * lambda / lambda_prev))
}

/// `‖z¹ − z⁰‖ / ‖F(z¹) − F(z⁰)‖`, an estimate of the inverse local Lipschitz constant.
pub fn lambda0_heuristic(z0: &[f64], z1: &[f64], problem: &VIProblem) -> Result<f64> {
    let f0 = problem.eval(z0)?;
    let f1 = problem.eval(z1)?;
    inverse_lipschitz(z0, z1, &f0, &f1)
}

fn inverse_lipschitz(z0: &[f64], z1: &[f64], f0: &[f64], f1: &[f64]) -> Result<f64> {
    let df = dist(f0, f1);
    if df == 0.0 {
        return param("F(z1) = F(z0); choose another z0");
    }
    let lambda = dist(z0, z1) / df;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return param(format!("initial stepsize estimate {lambda} is not positive and finite"));
    }
    Ok(lambda)
}

/// `z⁰ = z¹ + 1e-6·ξ⊙max(|z¹|, 1)` with `ξ_i ~ U[−1, 1]`, projected onto `dom g`.
pub fn perturb(z1: &[f64], rng: &mut RngStream, project: impl Fn(&[f64]) -> Vector) -> Vector {
    let z0: Vector =
        z1.iter().map(|&v| v + WARM_START_PERTURBATION * (2.0 * rng.unit_closed() - 1.0) * v.abs().max(1.0)).collect();
    project(&z0)
}

/// aGRAAL initial state: perturbs `z¹`, evaluates `F` at both points and
/// sets `λ₀` from [`lambda0_heuristic`] unless `lambda0` is given.
pub fn warm_start(problem: &VIProblem, z1: &[f64], rng: &mut RngStream, lambda0: Option<f64>) -> Result<SolverState> {
    if z1.len() != problem.dim() {
        return param(format!("start has dimension {}, problem has {}", z1.len(), problem.dim()));
    }
    let project = |z: &[f64]| problem.g().project_domain(z);
    let mut fevals = 0;
    let mut f1: Option<Vector> = None;
    for _ in 0..=WARM_START_RETRIES {
        let z0 = perturb(z1, rng, project);
        let f0 = problem.eval(&z0)?;
        fevals += 1;
        let lambda = match lambda0 {
            Some(l) => l,
            None => {
                if f1.is_none() {
                    f1 = Some(problem.eval(z1)?);
                    fevals += 1;
                }
                match inverse_lipschitz(&z0, z1, &f0, f1.as_ref().expect("set above")) {
                    Ok(l) => l,
                    Err(_) => continue,
                }
            }
        };
        let mut s = SolverState::with_history(z1.to_vec(), z0, f0, lambda);
        s.fevals = fevals;
        return Ok(s);
    }
    param(format!("F(z1) = F(z0) for {} perturbations of the start point", WARM_START_RETRIES + 1))
}

/// One aGRAAL step.
pub fn agraal_step(state: &mut SolverState, problem: &VIProblem, rule: &StepsizeRule) -> Result<StepInfo> {
    let k = state.k;
    let f_prev = state
        .f_prev
        .as_ref()
        .ok_or_else(|| Error::StateCorruption("aGRAAL needs F(z^{k-1}); use warm_start".into()))?;
    let fz = problem.eval(&state.z)?;
    if !all_finite(&fz) {
        return Err(numerical(k, "operator value"));
    }
    let dz_sq = dist_sq(&state.z, &state.z_prev);
    let df_sq = dist_sq(&fz, f_prev);
    let (lambda, theta) = agraal_stepsize(state.lambda, state.theta, dz_sq, df_sq, rule)?;

    let z_bar = averaged(&state.z, &state.z_bar, rule.phi());
    let w: Vector = z_bar.iter().zip(&fz).map(|(b, f)| b - lambda * f).collect();
    let z_next = problem.g().prox(&w, lambda);
    if !all_finite(&z_next) {
        return Err(numerical(k, "iterate"));
    }

    let theta_prev = state.theta;
    state.z_prev = std::mem::replace(&mut state.z, z_next);
    state.z_bar = z_bar;
    state.f_prev = Some(fz);
    state.lambda_prev = state.lambda;
    state.lambda = lambda;
    state.theta = theta;
    state.k += 1;
    state.fevals += 1;
    state.proxevals += 1;
    Ok(StepInfo {
        k,
        lambda,
        lambda_prev: state.lambda_prev,
        theta: Some(theta),
        theta_prev: Some(theta_prev),
        dz_sq: Some(dz_sq),
        df_sq: Some(df_sq),
        delta: Some(rule.delta()),
    })
}

/// One aGRAAL step in the metrics induced by diagonal `M` and `P`.
///
/// The stepsize uses `‖Δz‖²_{MP}` and `‖ΔF‖²_{M⁻¹P}`, and the update is
/// `z^{k+1} = prox^{MP}_{λ_k g}(z̄^k − λ_k M⁻¹F(z^k))`.
pub fn agraal_metric_step(
    state: &mut SolverState,
    problem: &VIProblem,
    m: &DiagonalMetric,
    p: &DiagonalMetric,
    rule: &StepsizeRule,
) -> Result<StepInfo> {
    let n = problem.dim();
    if m.dim() != n || p.dim() != n {
        return param(format!("metrics must have dimension {n}"));
    }
    let k = state.k;
    let f_prev = state
        .f_prev
        .as_ref()
        .ok_or_else(|| Error::StateCorruption("aGRAAL needs F(z^{k-1}); use warm_start".into()))?;
    let mp = m.product(p);
    let p_over_m = p.ratio(m);

    let fz = problem.eval(&state.z)?;
    if !all_finite(&fz) {
        return Err(numerical(k, "operator value"));
    }
    let dz: Vector = state.z.iter().zip(&state.z_prev).map(|(a, b)| a - b).collect();
    let df: Vector = fz.iter().zip(f_prev).map(|(a, b)| a - b).collect();
    let dz_sq = mp.norm_sq(&dz);
    let df_sq = p_over_m.norm_sq(&df);
    let (lambda, theta) = agraal_stepsize(state.lambda, state.theta, dz_sq, df_sq, rule)?;

    let z_bar = averaged(&state.z, &state.z_bar, rule.phi());
    let minv_f = m.apply_inverse(&fz);
    let w: Vector = z_bar.iter().zip(&minv_f).map(|(b, f)| b - lambda * f).collect();
    let z_next = problem.g().prox_metric(&w, lambda, &mp)?;
    if !all_finite(&z_next) {
        return Err(numerical(k, "iterate"));
    }

    let theta_prev = state.theta;
    state.z_prev = std::mem::replace(&mut state.z, z_next);
    state.z_bar = z_bar;
    state.f_prev = Some(fz);
    state.lambda_prev = state.lambda;
    state.lambda = lambda;
    state.theta = theta;
    state.k += 1;
    state.fevals += 1;
    state.proxevals += 1;
    Ok(StepInfo {
        k,
        lambda,
        lambda_prev: state.lambda_prev,
        theta: Some(theta),
        theta_prev: Some(theta_prev),
        dz_sq: Some(dz_sq),
        df_sq: Some(df_sq),
        delta: Some(rule.delta()),
    })
}

/// Warm start for [`fixedpoint_agraal_step`], with `F = id − T`.
pub fn fixedpoint_warm_start(
    problem: &FixedPointProblem,
    x1: &[f64],
    rng: &mut RngStream,
    lambda0: Option<f64>,
) -> Result<SolverState> {
    if x1.len() != problem.dim() {
        return param(format!("start has dimension {}, problem has {}", x1.len(), problem.dim()));
    }
    let residual = |x: &[f64], tx: Vector| -> Vector { x.iter().zip(tx).map(|(a, b)| a - b).collect() };
    let mut tevals = 0;
    let mut f1: Option<Vector> = None;
    for _ in 0..=WARM_START_RETRIES {
        let x0 = perturb(x1, rng, |z| z.to_vec());
        let f0 = residual(&x0, problem.apply(&x0));
        tevals += 1;
        let lambda = match lambda0 {
            Some(l) => l,
            None => {
                if f1.is_none() {
                    f1 = Some(residual(x1, problem.apply(x1)));
                    tevals += 1;
                }
                match inverse_lipschitz(&x0, x1, &f0, f1.as_ref().expect("set above")) {
                    Ok(l) => l,
                    Err(_) => continue,
                }
            }
        };
        let mut s = SolverState::with_history(x1.to_vec(), x0, f0, lambda);
        s.fevals = tevals;
        return Ok(s);
    }
    param(format!("Tx1 - x1 = Tx0 - x0 for {} perturbations of the start point", WARM_START_RETRIES + 1))
}

/// One aGRAAL step for `F = id − T`, written as the affine combination
/// `x^{k+1} = ((φ−1)/φ − λ_k) x^k + (1/φ) x̄^{k−1} + λ_k T x^k`.
///
/// Returns the step info together with `T x^k`.
pub fn fixedpoint_agraal_step(
    state: &mut SolverState,
    problem: &FixedPointProblem,
    rule: &StepsizeRule,
) -> Result<(StepInfo, Vector)> {
    let k = state.k;
    let f_prev = state
        .f_prev
        .as_ref()
        .ok_or_else(|| Error::StateCorruption("aGRAAL needs F(x^{k-1}); use fixedpoint_warm_start".into()))?;
    let tx = problem.apply(&state.z);
    if !all_finite(&tx) {
        return Err(numerical(k, "operator value"));
    }
    let fx: Vector = state.z.iter().zip(&tx).map(|(a, b)| a - b).collect();
    let dz_sq = dist_sq(&state.z, &state.z_prev);
    let df_sq = dist_sq(&fx, f_prev);
    let (lambda, theta) = agraal_stepsize(state.lambda, state.theta, dz_sq, df_sq, rule)?;

    let phi = rule.phi();
    let (cx, cbar) = ((phi - 1.0) / phi - lambda, 1.0 / phi);
    let x_next: Vector =
        state.z.iter().zip(&state.z_bar).zip(&tx).map(|((x, xb), t)| cx * x + cbar * xb + lambda * t).collect();
    if !all_finite(&x_next) {
        return Err(numerical(k, "iterate"));
    }
    let z_bar = averaged(&state.z, &state.z_bar, phi);

    let theta_prev = state.theta;
    state.z_prev = std::mem::replace(&mut state.z, x_next);
    state.z_bar = z_bar;
    state.f_prev = Some(fx);
    state.lambda_prev = state.lambda;
    state.lambda = lambda;
    state.theta = theta;
    state.k += 1;
    state.fevals += 1;
    let info = StepInfo {
        k,
        lambda,
        lambda_prev: state.lambda_prev,
        theta: Some(theta),
        theta_prev: Some(theta_prev),
        dz_sq: Some(dz_sq),
        df_sq: Some(df_sq),
        delta: Some(rule.delta()),
    };
    Ok((info, tx))
}
