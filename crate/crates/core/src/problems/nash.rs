//! Nash–Cournot oligopoly with power-law inverse demand and costs.
//!
//! Firm `i` supplies `q_i ≥ 0` at cost
//! `f_i(q) = c_i q + β_i/(β_i+1) · L_i^{1/β_i} · q^{(β_i+1)/β_i}`
//! into a market with inverse demand `p(Q) = 5000^{1/γ} Q^{−1/γ}`. The
//! equilibrium solves the VI over `ℝⁿ₊` with
//! `F_i(q) = f_i'(q_i) − p(Q) − q_i p'(Q)`.

use crate::error::{param, Error, Result};
use crate::linalg::Vector;
use crate::problem::{MonotonicityClass, VIProblem};
use crate::prox::ProxOp;
use crate::rng::RngStream;

/// Total supply below which the inverse demand is treated as undefined.
pub const MIN_TOTAL_SUPPLY: f64 = 1e-12;

const DEMAND_SCALE: f64 = 5000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NashScenario {
    /// `γ = 1.1`, `β_i ~ U(0.5, 2)`.
    A,
    /// `γ = 1.5`, `β_i ~ U(0.3, 4)`.
    B,
}

impl NashScenario {
    pub fn gamma(self) -> f64 {
        match self {
            NashScenario::A => 1.1,
            NashScenario::B => 1.5,
        }
    }

    pub fn beta_range(self) -> (f64, f64) {
        match self {
            NashScenario::A => (0.5, 2.0),
            NashScenario::B => (0.3, 4.0),
        }
    }
}

/// Range of the linear cost coefficients `c_i`.
pub const COST_RANGE: (f64, f64) = (1.0, 100.0);
/// Range of the cost scale `L_i`.
pub const CAPACITY_RANGE: (f64, f64) = (0.5, 5.0);

#[derive(Debug, Clone, PartialEq)]
pub struct NashParams {
    pub gamma: f64,
    pub beta: Vector,
    pub c: Vector,
    pub lcap: Vector,
    pub scenario: NashScenario,
    pub seed: u64,
}

impl NashParams {
    /// Draws `β`, then `c`, then `L`, each as `n` consecutive uniforms.
    pub fn sample(scenario: NashScenario, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return param("Nash-Cournot needs at least one firm");
        }
        let mut rng = RngStream::new(seed);
        let (blo, bhi) = scenario.beta_range();
        let beta = rng.uniform(blo, bhi, n)?;
        let c = rng.uniform(COST_RANGE.0, COST_RANGE.1, n)?;
        let lcap = rng.uniform(CAPACITY_RANGE.0, CAPACITY_RANGE.1, n)?;
        Ok(Self { gamma: scenario.gamma(), beta, c, lcap, scenario, seed })
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    /// `p(Q)`
    pub fn price(&self, total: f64) -> f64 {
        DEMAND_SCALE.powf(1.0 / self.gamma) * total.powf(-1.0 / self.gamma)
    }

    /// `p'(Q)`
    pub fn price_slope(&self, total: f64) -> f64 {
        -(1.0 / self.gamma) * DEMAND_SCALE.powf(1.0 / self.gamma) * total.powf(-1.0 / self.gamma - 1.0)
    }

    /// `f_i(q)`
    pub fn cost(&self, i: usize, q: f64) -> f64 {
        let b = self.beta[i];
        self.c[i] * q + b / (b + 1.0) * self.lcap[i].powf(1.0 / b) * q.powf((b + 1.0) / b)
    }

    /// `f_i'(q)`
    pub fn marginal_cost(&self, i: usize, q: f64) -> f64 {
        let b = self.beta[i];
        self.c[i] + self.lcap[i].powf(1.0 / b) * q.powf(1.0 / b)
    }
}

/// `F(q)` for the Nash–Cournot VI. Rejects negative supplies and `Σq ≤ 1e-12`.
pub fn nash_f(q: &[f64], p: &NashParams) -> Result<Vector> {
    if q.len() != p.n() {
        return param(format!("expected {} supplies, got {}", p.n(), q.len()));
    }
    if let Some(i) = q.iter().position(|x| !(*x >= 0.0)) {
        return Err(Error::Domain(format!("supply q[{i}] = {} is outside the nonnegative orthant", q[i])));
    }
    let total: f64 = q.iter().sum();
    if total <= MIN_TOTAL_SUPPLY {
        return Err(Error::Domain(format!("total supply {total} too small; inverse demand undefined")));
    }
    let price = p.price(total);
    let slope = p.price_slope(total);
    Ok(q.iter().enumerate().map(|(i, &qi)| p.marginal_cost(i, qi) - price - qi * slope).collect())
}

/// VI instance over `ℝⁿ₊` for the given scenario; start from `(1, …, 1)`.
pub fn make_nash(scenario: NashScenario, n: usize, seed: u64) -> Result<VIProblem> {
    let params = NashParams::sample(scenario, n, seed)?;
    Ok(nash_problem(params))
}

pub fn nash_problem(params: NashParams) -> VIProblem {
    let n = params.n();
    let name = format!("nash-{:?}", params.scenario).to_lowercase();
    VIProblem::new(name, n, move |q: &[f64]| nash_f(q, &params), ProxOp::NonnegOrthant)
        .with_class(MonotonicityClass::Monotone)
}
