//! Comparison methods: Tseng's forward-backward-forward method with
//! backtracking, proximal gradient, FISTA and the plain fixed-point iteration.

use crate::error::{param, Error, Result};
use crate::linalg::{all_finite, dist, Vector};
use crate::problem::{FixedPointProblem, VIProblem};

/// Backtracking halvings allowed before FBF gives up.
pub const FBF_MAX_TRIALS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbfParams {
    pub nu: f64,
    pub shrink: f64,
    pub grow: f64,
    pub lambda0: f64,
}

impl Default for FbfParams {
    fn default() -> Self {
        Self { nu: 0.9, shrink: 0.5, grow: 1.0, lambda0: 1.0 }
    }
}

impl FbfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return param(format!("FBF nu must lie in (0, 1), got {}", self.nu));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return param(format!("FBF shrink must lie in (0, 1), got {}", self.shrink));
        }
        if !(self.grow >= 1.0) {
            return param(format!("FBF grow must be at least 1, got {}", self.grow));
        }
        if !(self.lambda0 > 0.0) {
            return param(format!("FBF initial stepsize must be positive, got {}", self.lambda0));
        }
        Ok(())
    }
}

/// State of a single-sequence method (FBF, PGM, fixed-point iteration).
#[derive(Debug, Clone, PartialEq)]
pub struct PlainState {
    pub z: Vector,
    pub lambda: f64,
    pub k: usize,
    pub fevals: u64,
    pub proxevals: u64,
}

impl PlainState {
    pub fn new(z: Vector, lambda: f64) -> Self {
        Self { z, lambda, k: 1, fevals: 0, proxevals: 0 }
    }
}

/// Accepted FBF trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbfInfo {
    pub lambda: f64,
    pub trials: usize,
    /// `λ‖F(y) − F(z)‖` and `ν‖y − z‖` at the accepted trial.
    pub lhs: f64,
    pub rhs: f64,
}

/// One FBF step: backtrack from `grow·λ` until `λ‖F(y) − F(z)‖ ≤ ν‖y − z‖`
/// for `y = prox_{λg}(z − λF(z))`, then `z⁺ = Π_dom(y − λ(F(y) − F(z)))`.
pub fn fbf_step(state: &mut PlainState, problem: &VIProblem, params: &FbfParams) -> Result<FbfInfo> {
    let k = state.k;
    let fz = problem.eval(&state.z)?;
    let mut fevals = 1;
    if !all_finite(&fz) {
        return Err(Error::Numerical { iteration: k, message: "non-finite operator value".into() });
    }
    let mut lambda = params.grow * state.lambda;
    for trial in 1..=FBF_MAX_TRIALS {
        let w: Vector = state.z.iter().zip(&fz).map(|(a, f)| a - lambda * f).collect();
        let y = problem.g().prox(&w, lambda);
        let fy = problem.eval(&y)?;
        fevals += 1;
        let df: Vector = fy.iter().zip(&fz).map(|(a, b)| a - b).collect();
        let lhs = lambda * crate::linalg::norm(&df);
        let rhs = params.nu * dist(&y, &state.z);
        if lhs <= rhs {
            let z_next: Vector = y.iter().zip(&df).map(|(a, d)| a - lambda * d).collect();
            let z_next = problem.g().project_domain(&z_next);
            if !all_finite(&z_next) {
                return Err(Error::Numerical { iteration: k, message: "non-finite iterate".into() });
            }
            state.z = z_next;
            state.lambda = lambda;
            state.k += 1;
            state.fevals += fevals;
            state.proxevals += trial as u64;
            return Ok(FbfInfo { lambda, trials: trial, lhs, rhs });
        }
        lambda *= params.shrink;
    }
    Err(Error::Linesearch { trials: FBF_MAX_TRIALS })
}

fn require_lipschitz(problem: &VIProblem, what: &str) -> Result<f64> {
    problem.lipschitz().ok_or_else(|| Error::Capability(format!("{what} needs a Lipschitz constant")))
}

/// `1/L` for PGM and FISTA.
pub fn default_gradient_step(problem: &VIProblem) -> Result<f64> {
    let l = require_lipschitz(problem, "proximal gradient")?;
    if !(l > 0.0) {
        return param("Lipschitz constant must be positive for a 1/L step");
    }
    Ok(1.0 / l)
}

/// `x⁺ = prox_{λg}(x − λ∇f(x))`.
pub fn pgm_step(state: &mut PlainState, problem: &VIProblem, lambda: f64) -> Result<()> {
    require_lipschitz(problem, "proximal gradient")?;
    if !(lambda > 0.0) {
        return param(format!("stepsize must be positive, got {lambda}"));
    }
    let grad = problem.eval(&state.z)?;
    let w: Vector = state.z.iter().zip(&grad).map(|(a, f)| a - lambda * f).collect();
    let z_next = problem.g().prox(&w, lambda);
    if !all_finite(&z_next) {
        return Err(Error::Numerical { iteration: state.k, message: "non-finite iterate".into() });
    }
    state.z = z_next;
    state.lambda = lambda;
    state.k += 1;
    state.fevals += 1;
    state.proxevals += 1;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FistaState {
    pub x: Vector,
    pub y: Vector,
    pub t: f64,
    pub k: usize,
    pub fevals: u64,
    pub proxevals: u64,
}

impl FistaState {
    pub fn new(x: Vector) -> Self {
        Self { y: x.clone(), x, t: 1.0, k: 1, fevals: 0, proxevals: 0 }
    }
}

/// `t_{k+1} = (1 + √(1 + 4t_k²)) / 2`
pub fn fista_next_t(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

/// `x⁺ = prox_{λg}(y − λ∇f(y))`, `y⁺ = x⁺ + ((t − 1)/t⁺)(x⁺ − x)`.
pub fn fista_step(state: &mut FistaState, problem: &VIProblem, lambda: f64) -> Result<()> {
    require_lipschitz(problem, "FISTA")?;
    if !(lambda > 0.0) {
        return param(format!("stepsize must be positive, got {lambda}"));
    }
    let grad = problem.eval(&state.y)?;
    let w: Vector = state.y.iter().zip(&grad).map(|(a, f)| a - lambda * f).collect();
    let x_next = problem.g().prox(&w, lambda);
    if !all_finite(&x_next) {
        return Err(Error::Numerical { iteration: state.k, message: "non-finite iterate".into() });
    }
    let t_next = fista_next_t(state.t);
    let beta = (state.t - 1.0) / t_next;
    state.y = x_next.iter().zip(&state.x).map(|(a, b)| a + beta * (a - b)).collect();
    state.x = x_next;
    state.t = t_next;
    state.k += 1;
    state.fevals += 1;
    state.proxevals += 1;
    Ok(())
}

/// `x⁺ = Tx`; returns the previous residual `‖x − Tx‖`.
pub fn km_step(state: &mut PlainState, problem: &FixedPointProblem) -> Result<f64> {
    let tx = problem.apply(&state.z);
    if !all_finite(&tx) {
        return Err(Error::Numerical { iteration: state.k, message: "non-finite iterate".into() });
    }
    let r = dist(&state.z, &tx);
    state.z = tx;
    state.k += 1;
    state.fevals += 1;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FixedPointClass;
    use crate::problems::{simultaneous_projection, ConvexSet};
    use crate::prox::ProxOp;

    fn scaled(scale: f64, n: usize) -> VIProblem {
        VIProblem::new(
            "scaled",
            n,
            move |z: &[f64]| -> Result<Vector> { Ok(z.iter().map(|v| scale * v).collect()) },
            ProxOp::Zero,
        )
        .with_lipschitz(scale)
    }

    #[test]
    fn fbf_zero_operator_accepts_first_trial() {
        let p = VIProblem::new("zero", 2, |_: &[f64]| -> Result<Vector> { Ok(vec![0.0, 0.0]) }, ProxOp::NonnegOrthant);
        let mut s = PlainState::new(vec![-1.0, 2.0], 1.0);
        let info = fbf_step(&mut s, &p, &FbfParams::default()).unwrap();
        assert_eq!(info.trials, 1);
        assert_eq!(s.z, vec![0.0, 2.0]);
        assert_eq!(s.fevals, 2);
    }

    #[test]
    fn fbf_small_step_accepted_immediately() {
        let p = scaled(4.0, 3);
        let mut s = PlainState::new(vec![1.0, -2.0, 0.5], 0.9 / 4.0);
        let info = fbf_step(&mut s, &p, &FbfParams::default()).unwrap();
        assert_eq!(info.trials, 1);
        assert!(info.lhs <= info.rhs);
    }

    #[test]
    fn fbf_backtracks_and_accepts_admissible_step() {
        let p = scaled(10.0, 2);
        let mut s = PlainState::new(vec![1.0, 1.0], 1.0);
        let info = fbf_step(&mut s, &p, &FbfParams::default()).unwrap();
        assert!(info.trials > 1);
        assert!(info.lambda * 10.0 <= 0.9 + 1e-12);
        assert_eq!(s.fevals, 1 + info.trials as u64);
    }

    #[test]
    fn fbf_rejects_bad_parameters() {
        assert!(FbfParams { nu: 1.0, ..Default::default() }.validate().is_err());
        assert!(FbfParams { shrink: 0.0, ..Default::default() }.validate().is_err());
        assert!(FbfParams { grow: 0.5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn pgm_solves_quadratic_in_one_step() {
        let p = scaled(1.0, 3);
        let mut s = PlainState::new(vec![1.0, -4.0, 2.0], 1.0);
        pgm_step(&mut s, &p, 1.0).unwrap();
        assert_eq!(s.z, vec![0.0; 3]);
    }

    #[test]
    fn zero_gradient_leaves_point() {
        let p = scaled(0.0, 2);
        let mut s = PlainState::new(vec![1.0, 2.0], 1.0);
        pgm_step(&mut s, &p, 1.0).unwrap();
        assert_eq!(s.z, vec![1.0, 2.0]);
        let mut f = FistaState::new(vec![1.0, 2.0]);
        fista_step(&mut f, &p, 1.0).unwrap();
        fista_step(&mut f, &p, 1.0).unwrap();
        assert_eq!(f.x, vec![1.0, 2.0]);
    }

    #[test]
    fn gradient_methods_need_lipschitz() {
        let p = VIProblem::new("id", 1, |z: &[f64]| -> Result<Vector> { Ok(z.to_vec()) }, ProxOp::Zero);
        let mut s = PlainState::new(vec![1.0], 1.0);
        assert!(matches!(pgm_step(&mut s, &p, 1.0), Err(Error::Capability(_))));
        assert!(matches!(fista_step(&mut FistaState::new(vec![1.0]), &p, 1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn fista_t_sequence() {
        assert!((fista_next_t(1.0) - crate::solvers::GOLDEN_RATIO).abs() < 1e-15);
    }

    #[test]
    fn km_on_two_hyperplanes() {
        let sets = vec![
            ConvexSet::Hyperplane { normal: vec![1.0, 0.0], offset: 0.0 },
            ConvexSet::Hyperplane { normal: vec![0.0, 1.0], offset: 0.0 },
        ];
        let t = FixedPointProblem::new("planes", 2, FixedPointClass::FirmlyNonexpansive, move |x: &[f64]| {
            simultaneous_projection(x, &sets).expect("valid sets")
        });
        let mut s = PlainState::new(vec![2.0, 4.0], 1.0);
        km_step(&mut s, &t).unwrap();
        assert_eq!(s.z, vec![1.0, 2.0]);
        let mut fixed = PlainState::new(vec![0.0, 0.0], 1.0);
        km_step(&mut fixed, &t).unwrap();
        assert_eq!(fixed.z, vec![0.0, 0.0]);
    }
}
