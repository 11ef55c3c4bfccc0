//! Sparse logistic regression `min_x Σ log(1 + exp(−b_i⟨a_i, x⟩)) + γ‖x‖₁`
//! written as the composite VI with `F = ∇f`, `f(x) = Σ softplus((Kx)_i)`
//! and `K_ij = −b_i a_ij`.

use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, spectral_norm_gram, SparseMatrix, Vector};
use crate::problem::{MonotonicityClass, VIProblem};
use crate::prox::ProxOp;
use crate::rng::RngStream;

/// Default regularization is this fraction of `‖Aᵀb‖_∞`.
pub const GAMMA_FRACTION: f64 = 0.005;
/// Probability that a synthetic label is flipped.
pub const LABEL_FLIP_RATE: f64 = 0.1;

/// `log(1 + eʸ)` without overflow.
pub fn softplus(y: f64) -> f64 {
    y.max(0.0) + (-y.abs()).exp().ln_1p()
}

/// `1 / (1 + e⁻ʸ)` without overflow.
pub fn sigmoid(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

/// Value and gradient of `x ↦ Σ softplus((Kx)_i)`.
pub fn logistic_grad(x: &[f64], k: &SparseMatrix) -> (f64, Vector) {
    let kx = k.matvec(x);
    let value = kx.iter().map(|&y| softplus(y)).sum();
    let u: Vector = kx.iter().map(|&y| sigmoid(y)).collect();
    (value, k.matvec_transpose(&u))
}

/// Labelled samples: one row of `a` per sample, labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticData {
    pub a: SparseMatrix,
    pub b: Vector,
}

impl LogisticData {
    pub fn new(a: SparseMatrix, b: Vector) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::Data(format!("{} samples but {} labels", a.rows(), b.len())));
        }
        if let Some(bad) = b.iter().find(|l| **l != 1.0 && **l != -1.0) {
            return Err(Error::Data(format!("label {bad} is not -1 or +1")));
        }
        Ok(Self { a, b })
    }

    /// `K = −diag(b)·A`
    pub fn design(&self) -> SparseMatrix {
        let neg: Vector = self.b.iter().map(|l| -l).collect();
        self.a.scale_rows(&neg)
    }

    /// `0.005·‖Aᵀb‖_∞`
    pub fn default_gamma(&self) -> f64 {
        GAMMA_FRACTION * norm_inf(&self.a.matvec_transpose(&self.b))
    }
}

/// Dense Gaussian features with a planted separator and [`LABEL_FLIP_RATE`] label noise.
pub fn synthetic_logistic(m: usize, n: usize, seed: u64) -> Result<LogisticData> {
    let mut rng = RngStream::new(seed);
    let w = rng.normal(0.0, 1.0, n)?;
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let row = rng.normal(0.0, 1.0, n)?;
        let margin: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum();
        let mut label = if margin >= 0.0 { 1.0 } else { -1.0 };
        if rng.unit_closed() < LABEL_FLIP_RATE {
            label = -label;
        }
        labels.push(label);
        rows.push(row.into_iter().enumerate().collect());
    }
    LogisticData::new(SparseMatrix::from_rows(n, rows)?, labels)
}

/// Value and gradient at the most recent gradient point.
///
/// The driver evaluates `F` at each new iterate for its residual and the
/// solver asks again at the next step, so one entry removes half the work.
#[derive(Default)]
struct LastEval(Mutex<Option<(Vector, f64, Vector)>>);

impl LastEval {
    fn lookup<T>(&self, x: &[f64], pick: impl FnOnce(&(Vector, f64, Vector)) -> T) -> Option<T> {
        let slot = self.0.lock().unwrap_or_else(|e| e.into_inner());
        slot.as_ref().filter(|(at, _, _)| same_point(at, x)).map(pick)
    }

    fn gradient(&self, x: &[f64], k: &SparseMatrix) -> Vector {
        if let Some(g) = self.lookup(x, |(_, _, g)| g.clone()) {
            return g;
        }
        let (value, grad) = logistic_grad(x, k);
        *self.0.lock().unwrap_or_else(|e| e.into_inner()) = Some((x.to_vec(), value, grad.clone()));
        grad
    }

    fn value(&self, x: &[f64], k: &SparseMatrix) -> f64 {
        self.lookup(x, |(_, v, _)| *v).unwrap_or_else(|| k.matvec(x).iter().map(|&y| softplus(y)).sum())
    }
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(u, v)| u.to_bits() == v.to_bits())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaRule {
    /// `γ = 0.005‖Aᵀb‖_∞`
    Default,
    Fixed(f64),
}

const GRAM_TOL: f64 = 1e-10;
const GRAM_MAX_ITER: usize = 10_000;

/// Composite VI for sparse logistic regression with `L = ¼‖KᵀK‖` and energy `J = f + γ‖·‖₁`.
pub fn make_logistic(data: &LogisticData, rule: GammaRule) -> Result<VIProblem> {
    let gamma = match rule {
        GammaRule::Default => data.default_gamma(),
        GammaRule::Fixed(g) => g,
    };
    let k = data.design();
    let gram = spectral_norm_gram(&k, GRAM_TOL, GRAM_MAX_ITER)?;
    if !gram.converged {
        log::warn!("power iteration for the logistic Lipschitz constant did not converge");
    }
    let n = k.cols();
    let cache = Arc::new(LastEval::default());
    let energy_cache = Arc::clone(&cache);
    let k = Arc::new(k);
    let k_energy = Arc::clone(&k);
    Ok(VIProblem::new(
        format!("logistic-{}x{}", k.rows(), n),
        n,
        move |x: &[f64]| -> Result<Vector> { Ok(cache.gradient(x, &k)) },
        ProxOp::l1(gamma)?,
    )
    .with_lipschitz(0.25 * gram.value)
    .with_smooth_energy(move |x| energy_cache.value(x, &k_energy))
    .with_class(MonotonicityClass::Monotone))
}
