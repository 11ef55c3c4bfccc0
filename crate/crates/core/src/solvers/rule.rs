use crate::error::{param, Result};

/// `(1 + √5) / 2`
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Constants of the adaptive stepsize
/// `λ_k = min{ ρλ_{k−1}, φδθ_{k−1}/(4λ_{k−1}) · ‖Δz‖²/‖ΔF‖², λ̄ }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepsizeRule {
    phi: f64,
    rho: f64,
    lambda_max: f64,
    delta: f64,
}

impl StepsizeRule {
    pub const DEFAULT_PHI: f64 = 1.5;
    pub const DEFAULT_LAMBDA_MAX: f64 = 1e7;
    /// Damping used by the linearly convergent variant.
    pub const LINEAR_DELTA: f64 = 0.99;

    /// `φ ∈ (1, golden ratio]`, `λ̄ > 0`, `δ ∈ (0, 1]`; `ρ = 1/φ + 1/φ²` is derived.
    pub fn new(phi: f64, lambda_max: f64, delta: f64) -> Result<Self> {
        if !(phi > 1.0 && phi <= GOLDEN_RATIO + 1e-12) {
            return param(format!("phi must lie in (1, golden ratio = {GOLDEN_RATIO}], got {phi}"));
        }
        if !(lambda_max > 0.0) {
            return param(format!("lambda_max must be positive, got {lambda_max}"));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return param(format!("delta must lie in (0, 1], got {delta}"));
        }
        Ok(Self { phi, rho: 1.0 / phi + 1.0 / (phi * phi), lambda_max, delta })
    }

    /// Error-bound variant with `δ = 0.99`.
    pub fn linear() -> Self {
        Self::new(Self::DEFAULT_PHI, Self::DEFAULT_LAMBDA_MAX, Self::LINEAR_DELTA).expect("valid constants")
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Upper bound `1 + 1/φ` on every ratio `θ_k`.
    pub fn theta_bound(&self) -> f64 {
        1.0 + 1.0 / self.phi
    }
}

impl Default for StepsizeRule {
    fn default() -> Self {
        Self::new(Self::DEFAULT_PHI, Self::DEFAULT_LAMBDA_MAX, 1.0).expect("valid constants")
    }
}

/// When a run stops. At least one bound must be finite.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StopRule {
    /// Stop once the method's residual is at most this.
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub max_fevals: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl StopRule {
    pub fn new(tol: f64, max_iters: usize) -> Self {
        Self { tol: Some(tol), max_iters: Some(max_iters), ..Default::default() }
    }

    pub fn iterations(max_iters: usize) -> Self {
        Self { max_iters: Some(max_iters), ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_none() && self.max_iters.is_none() && self.max_fevals.is_none() && self.max_seconds.is_none() {
            return param("stop rule needs at least one finite bound");
        }
        if self.tol.is_some_and(|t| !(t >= 0.0)) {
            return param("stop tolerance must be nonnegative");
        }
        if self.max_seconds.is_some_and(|s| !(s >= 0.0)) {
            return param("time limit must be nonnegative");
        }
        Ok(())
    }
}
