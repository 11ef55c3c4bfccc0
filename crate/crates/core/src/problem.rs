//! Problem containers shared by every solver.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::Result;
use crate::linalg::{dist, Vector};
use crate::prox::ProxOp;

/// Operator `F: dom g → V` of a variational inequality.
pub trait Operator: Send + Sync {
    fn apply(&self, z: &[f64]) -> Result<Vector>;
}

impl<F> Operator for F
where
    F: Fn(&[f64]) -> Result<Vector> + Send + Sync,
{
    fn apply(&self, z: &[f64]) -> Result<Vector> {
        self(z)
    }
}

/// What is known about `F`, which determines what convergence theory applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityClass {
    Monotone,
    /// `⟨F(z), z − z̄⟩ ≥ 0` for all feasible `z` and solutions `z̄`.
    PseudoC4,
    /// Only a Minty solution is known to exist; runs can be judged by residual only.
    MintyOnly,
}

type EnergyFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Find `z*` with `⟨F(z*), z − z*⟩ + g(z) − g(z*) ≥ 0` for all `z`.
///
/// Every call to [`VIProblem::eval`] increments the evaluation counter by
/// exactly one; diagnostics that must not perturb solver accounting use
/// [`VIProblem::eval_untracked`].
pub struct VIProblem {
    pub name: String,
    dim: usize,
    operator: Arc<dyn Operator>,
    g: ProxOp,
    smooth_energy: Option<Arc<EnergyFn>>,
    lipschitz: Option<f64>,
    solution: Option<Vector>,
    class: MonotonicityClass,
    fevals: AtomicU64,
}

impl VIProblem {
    pub fn new(name: impl Into<String>, dim: usize, operator: impl Operator + 'static, g: ProxOp) -> Self {
        Self {
            name: name.into(),
            dim,
            operator: Arc::new(operator),
            g,
            smooth_energy: None,
            lipschitz: None,
            solution: None,
            class: MonotonicityClass::Monotone,
            fevals: AtomicU64::new(0),
        }
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_solution(mut self, z: Vector) -> Self {
        assert_eq!(z.len(), self.dim, "solution dimension mismatch");
        self.solution = Some(z);
        self
    }

    /// Smooth part `f` of a composite objective `J = f + g` with `F = ∇f`.
    pub fn with_smooth_energy(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.smooth_energy = Some(Arc::new(f));
        self
    }

    pub fn with_class(mut self, class: MonotonicityClass) -> Self {
        self.class = class;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn g(&self) -> &ProxOp {
        &self.g
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn solution(&self) -> Option<&[f64]> {
        self.solution.as_deref()
    }

    pub fn class(&self) -> MonotonicityClass {
        self.class
    }

    pub fn has_energy(&self) -> bool {
        self.smooth_energy.is_some() && self.g.has_value()
    }

    /// `F(z)`, counted.
    pub fn eval(&self, z: &[f64]) -> Result<Vector> {
        self.fevals.fetch_add(1, Ordering::Relaxed);
        self.operator.apply(z)
    }

    /// `F(z)` without touching the counter.
    pub fn eval_untracked(&self, z: &[f64]) -> Result<Vector> {
        self.operator.apply(z)
    }

    pub fn fevals(&self) -> u64 {
        self.fevals.load(Ordering::Relaxed)
    }

    pub fn reset_fevals(&self) {
        self.fevals.store(0, Ordering::Relaxed);
    }

    /// `J(z) = f(z) + g(z)` when both parts can be evaluated.
    pub fn energy(&self, z: &[f64]) -> Option<f64> {
        let f = self.smooth_energy.as_ref()?;
        Some(f(z) + self.g.value(z)?)
    }

    pub fn dist_to_solution(&self, z: &[f64]) -> Option<f64> {
        self.solution.as_ref().map(|s| dist(s, z))
    }
}

impl Clone for VIProblem {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            dim: self.dim,
            operator: Arc::clone(&self.operator),
            g: self.g.clone(),
            smooth_energy: self.smooth_energy.clone(),
            lipschitz: self.lipschitz,
            solution: self.solution.clone(),
            class: self.class,
            fevals: AtomicU64::new(self.fevals()),
        }
    }
}

impl fmt::Debug for VIProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VIProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("g", &self.g)
            .field("lipschitz", &self.lipschitz)
            .field("class", &self.class)
            .field("fevals", &self.fevals())
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointClass {
    FirmlyNonexpansive,
    Nonexpansive,
    DemiContractive,
}

type MapFn = dyn Fn(&[f64]) -> Vector + Send + Sync;

/// Find `x` with `Tx = x`, equivalently `F(x) = 0` for `F = id − T`.
pub struct FixedPointProblem {
    pub name: String,
    dim: usize,
    map: Arc<MapFn>,
    class: FixedPointClass,
    start: Option<Vector>,
    fixed_point: Option<Vector>,
    tevals: AtomicU64,
}

impl FixedPointProblem {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        class: FixedPointClass,
        map: impl Fn(&[f64]) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            map: Arc::new(map),
            class,
            start: None,
            fixed_point: None,
            tevals: AtomicU64::new(0),
        }
    }

    /// Recommended starting point for this instance.
    pub fn with_start(mut self, x: Vector) -> Self {
        self.start = Some(x);
        self
    }

    pub fn with_fixed_point(mut self, x: Vector) -> Self {
        self.fixed_point = Some(x);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> FixedPointClass {
        self.class
    }

    pub fn start(&self) -> Option<&[f64]> {
        self.start.as_deref()
    }

    pub fn fixed_point(&self) -> Option<&[f64]> {
        self.fixed_point.as_deref()
    }

    /// `Tx`, counted.
    pub fn apply(&self, x: &[f64]) -> Vector {
        self.tevals.fetch_add(1, Ordering::Relaxed);
        (self.map)(x)
    }

    pub fn apply_untracked(&self, x: &[f64]) -> Vector {
        (self.map)(x)
    }

    pub fn tevals(&self) -> u64 {
        self.tevals.load(Ordering::Relaxed)
    }

    /// `‖x − Tx‖`, uncounted.
    pub fn residual(&self, x: &[f64]) -> f64 {
        dist(x, &(self.map)(x))
    }

    /// The equivalent VI with `F = id − T` and `g ≡ 0`.
    pub fn to_vi(&self) -> VIProblem {
        let map = Arc::clone(&self.map);
        let class = match self.class {
            FixedPointClass::DemiContractive => MonotonicityClass::PseudoC4,
            _ => MonotonicityClass::Monotone,
        };
        let mut p = VIProblem::new(
            format!("{}:id-T", self.name),
            self.dim,
            move |x: &[f64]| -> Result<Vector> {
                let tx = map(x);
                Ok(x.iter().zip(&tx).map(|(a, b)| a - b).collect())
            },
            ProxOp::Zero,
        )
        .with_class(class);
        if let Some(fp) = &self.fixed_point {
            p = p.with_solution(fp.clone());
        }
        p
    }
}

impl fmt::Debug for FixedPointProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FixedPointProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("class", &self.class)
            .field("tevals", &self.tevals())
            .finish_non_exhaustive()
    }
}
