//! Closed-form proximal operators and projections.
//!
//! A [`ProxOp`] represents a proper lsc convex `g` through its proximal map
//! `prox_{τg}(z) = argmin_x { g(x) + ‖x − z‖²/(2τ) }`, an optional value
//! evaluator and a description of `dom g`. Indicator functions report
//! `g(x) = 0` when `x` is feasible up to `1e-9·max(1, ‖x‖)` and `+∞`
//! otherwise.

use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::linalg::{dot, norm, norm1, norm_sq, Vector};

/// Feasibility slack used by indicator value evaluators.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Shape of `dom g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    AllSpace,
    NonnegOrthant,
    Affine,
    Ball,
    Box,
    /// Cartesian product of the block domains.
    Product,
}

type ProxFn = dyn Fn(&[f64], f64) -> Vector + Send + Sync;
type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user supplied proximal map. It has no metric prox and may lack a value evaluator.
#[derive(Clone)]
pub struct CustomProx {
    pub name: String,
    pub prox: Arc<ProxFn>,
    pub value: Option<Arc<ValueFn>>,
    pub domain: Domain,
}

impl fmt::Debug for CustomProx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProx")
            .field("name", &self.name)
            .field("has_value", &self.value.is_some())
            .field("domain", &self.domain)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum ProxOp {
    /// `g ≡ 0`
    Zero,
    /// `g = γ‖·‖₁`
    L1 {
        gamma: f64,
    },
    /// Indicator of `ℝⁿ₊`.
    NonnegOrthant,
    /// Indicator of `{x : lo ≤ x ≤ hi}`.
    Box {
        lo: Vector,
        hi: Vector,
    },
    /// Indicator of the closed ball `B(center, radius)`.
    Ball {
        center: Vector,
        radius: f64,
    },
    /// Indicator of `{x : ⟨normal, x⟩ = offset}`.
    Hyperplane {
        normal: Vector,
        offset: f64,
    },
    /// Separable sum over consecutive blocks `(length, g_i)`.
    Product(Vec<(usize, ProxOp)>),
    Custom(CustomProx),
}

impl ProxOp {
    pub fn l1(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return param(format!("l1 weight must be nonnegative, got {gamma}"));
        }
        Ok(ProxOp::L1 { gamma })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return param(format!("ball radius must be positive, got {radius}"));
        }
        Ok(ProxOp::Ball { center, radius })
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        if norm_sq(&normal) == 0.0 {
            return param("hyperplane normal must be nonzero");
        }
        Ok(ProxOp::Hyperplane { normal, offset })
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| !(l <= h)) {
            return param("box bounds must have equal length and satisfy lo <= hi");
        }
        Ok(ProxOp::Box { lo, hi })
    }

    pub fn product(blocks: Vec<(usize, ProxOp)>) -> Self {
        ProxOp::Product(blocks)
    }

    pub fn domain(&self) -> Domain {
        match self {
            ProxOp::Zero | ProxOp::L1 { .. } => Domain::AllSpace,
            ProxOp::NonnegOrthant => Domain::NonnegOrthant,
            ProxOp::Box { .. } => Domain::Box,
            ProxOp::Ball { .. } => Domain::Ball,
            ProxOp::Hyperplane { .. } => Domain::Affine,
            ProxOp::Product(_) => Domain::Product,
            ProxOp::Custom(c) => c.domain,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ProxOp::Zero => true,
            ProxOp::L1 { gamma } => *gamma == 0.0,
            ProxOp::Product(blocks) => blocks.iter().all(|(_, g)| g.is_zero()),
            _ => false,
        }
    }

    /// Dimension implied by the operator's data, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            ProxOp::Box { lo, .. } => Some(lo.len()),
            ProxOp::Ball { center, .. } => Some(center.len()),
            ProxOp::Hyperplane { normal, .. } => Some(normal.len()),
            ProxOp::Product(blocks) => Some(blocks.iter().map(|(l, _)| l).sum()),
            _ => None,
        }
    }

    /// `prox_{τg}(z)`.
    pub fn prox(&self, z: &[f64], tau: f64) -> Vector {
        debug_assert!(tau > 0.0);
        match self {
            ProxOp::Zero => z.to_vec(),
            ProxOp::L1 { gamma } => soft_threshold(z, tau * gamma),
            ProxOp::NonnegOrthant => project_nonneg(z),
            ProxOp::Box { lo, hi } => clamp(z, lo, hi),
            ProxOp::Ball { center, radius } => ball_projection(z, center, *radius),
            ProxOp::Hyperplane { normal, offset } => hyperplane_projection(z, normal, *offset),
            ProxOp::Product(blocks) => blockwise(z, blocks, |g, zb| g.prox(zb, tau)),
            ProxOp::Custom(c) => (c.prox)(z, tau),
        }
    }

    /// `g(z)`, or `None` when no value evaluator is attached.
    pub fn value(&self, z: &[f64]) -> Option<f64> {
        let indicator = |feasible: bool| if feasible { 0.0 } else { f64::INFINITY };
        let slack = FEASIBILITY_TOL * norm(z).max(1.0);
        match self {
            ProxOp::Zero => Some(0.0),
            ProxOp::L1 { gamma } => Some(gamma * norm1(z)),
            ProxOp::NonnegOrthant => Some(indicator(z.iter().all(|x| *x >= -slack))),
            ProxOp::Box { lo, hi } => {
                Some(indicator(z.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| *x >= l - slack && *x <= h + slack)))
            }
            ProxOp::Ball { center, radius } => {
                let d = z.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                Some(indicator(d <= radius + slack))
            }
            ProxOp::Hyperplane { normal, offset } => {
                let r = (dot(normal, z) - offset).abs() / norm(normal);
                Some(indicator(r <= slack))
            }
            ProxOp::Product(blocks) => {
                let mut total = 0.0;
                let mut start = 0;
                for (len, g) in blocks {
                    total += g.value(&z[start..start + len])?;
                    start += len;
                }
                Some(total)
            }
            ProxOp::Custom(c) => c.value.as_ref().map(|v| v(z)),
        }
    }

    pub fn has_value(&self) -> bool {
        match self {
            ProxOp::Custom(c) => c.value.is_some(),
            ProxOp::Product(blocks) => blocks.iter().all(|(_, g)| g.has_value()),
            _ => true,
        }
    }

    /// Euclidean projection onto `dom g` (identity when `dom g` is the whole space).
    pub fn project_domain(&self, z: &[f64]) -> Vector {
        match self {
            ProxOp::Zero | ProxOp::L1 { .. } => z.to_vec(),
            ProxOp::NonnegOrthant | ProxOp::Box { .. } | ProxOp::Ball { .. } | ProxOp::Hyperplane { .. } => {
                // proxes of indicators are projections, and τ does not matter
                self.prox(z, 1.0)
            }
            ProxOp::Product(blocks) => blockwise(z, blocks, |g, zb| g.project_domain(zb)),
            ProxOp::Custom(c) => match c.domain {
                Domain::AllSpace => z.to_vec(),
                _ => (c.prox)(z, 1.0),
            },
        }
    }

    /// `argmin_x { g(x) + ‖x − z‖²_w / (2τ) }` for a diagonal weight `w`.
    ///
    /// Available for separable `g` (zero, ℓ₁, orthant, box), hyperplanes and
    /// products of those.
    pub fn prox_metric(&self, z: &[f64], tau: f64, w: &DiagonalMetric) -> Result<Vector> {
        if !(tau > 0.0) {
            return param(format!("prox stepsize must be positive, got {tau}"));
        }
        if w.dim() != z.len() {
            return param(format!("metric has dimension {}, point has {}", w.dim(), z.len()));
        }
        let w = w.weights();
        match self {
            ProxOp::Zero => Ok(z.to_vec()),
            ProxOp::L1 { gamma } => {
                Ok(z.iter().zip(w).map(|(&zi, &wi)| soft_threshold_scalar(zi, tau * gamma / wi)).collect())
            }
            // separable indicators: the weighted projection is the coordinatewise one
            ProxOp::NonnegOrthant | ProxOp::Box { .. } => Ok(self.prox(z, tau)),
            ProxOp::Hyperplane { normal, offset } => {
                let winv_a: Vector = normal.iter().zip(w).map(|(a, wi)| a / wi).collect();
                let c = (dot(normal, z) - offset) / dot(normal, &winv_a);
                Ok(z.iter().zip(&winv_a).map(|(zi, ai)| zi - c * ai).collect())
            }
            ProxOp::Product(blocks) => {
                let mut out = Vec::with_capacity(z.len());
                let mut start = 0;
                for (len, g) in blocks {
                    let wb = DiagonalMetric { weights: w[start..start + len].to_vec() };
                    out.extend(g.prox_metric(&z[start..start + len], tau, &wb)?);
                    start += len;
                }
                Ok(out)
            }
            ProxOp::Ball { .. } => {
                Err(Error::Capability("weighted prox of a ball indicator has no closed form".into()))
            }
            ProxOp::Custom(c) => Err(Error::Capability(format!("no weighted prox for custom operator {}", c.name))),
        }
    }
}

fn blockwise(z: &[f64], blocks: &[(usize, ProxOp)], f: impl Fn(&ProxOp, &[f64]) -> Vector) -> Vector {
    let total: usize = blocks.iter().map(|(l, _)| l).sum();
    assert_eq!(total, z.len(), "product prox block sizes do not match the point");
    let mut out = Vec::with_capacity(z.len());
    let mut start = 0;
    for (len, g) in blocks {
        out.extend(f(g, &z[start..start + len]));
        start += len;
    }
    out
}

fn soft_threshold_scalar(z: f64, t: f64) -> f64 {
    z.signum() * (z.abs() - t).max(0.0)
}

fn soft_threshold(z: &[f64], t: f64) -> Vector {
    z.iter().map(|&zi| soft_threshold_scalar(zi, t)).collect()
}

fn clamp(z: &[f64], lo: &[f64], hi: &[f64]) -> Vector {
    z.iter().zip(lo.iter().zip(hi)).map(|(x, (l, h))| x.max(*l).min(*h)).collect()
}

fn ball_projection(z: &[f64], c: &[f64], r: f64) -> Vector {
    let d = z.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if d <= r {
        return z.to_vec();
    }
    let s = r / d;
    z.iter().zip(c).map(|(zi, ci)| ci + s * (zi - ci)).collect()
}

fn hyperplane_projection(z: &[f64], a: &[f64], b: f64) -> Vector {
    let c = (dot(a, z) - b) / norm_sq(a);
    z.iter().zip(a).map(|(zi, ai)| zi - c * ai).collect()
}

/// Soft-thresholding `sign(z)·max(|z| − τγ, 0)`, the prox of `τγ‖·‖₁`.
pub fn prox_l1(z: &[f64], tau: f64, gamma: f64) -> Result<Vector> {
    if !(tau > 0.0) || !(gamma >= 0.0) {
        return param(format!("prox_l1 needs tau > 0 and gamma >= 0, got tau={tau}, gamma={gamma}"));
    }
    Ok(soft_threshold(z, tau * gamma))
}

pub fn project_nonneg(z: &[f64]) -> Vector {
    z.iter().map(|x| x.max(0.0)).collect()
}

pub fn project_ball(z: &[f64], center: &[f64], radius: f64) -> Result<Vector> {
    if !(radius > 0.0) {
        return param(format!("ball radius must be positive, got {radius}"));
    }
    if center.len() != z.len() {
        return param("ball center dimension mismatch");
    }
    Ok(ball_projection(z, center, radius))
}

pub fn project_hyperplane(z: &[f64], a: &[f64], b: f64) -> Result<Vector> {
    if a.len() != z.len() {
        return param("hyperplane normal dimension mismatch");
    }
    if norm_sq(a) == 0.0 {
        return param("hyperplane normal must be nonzero");
    }
    Ok(hyperplane_projection(z, a, b))
}

/// Free-function form of [`ProxOp::prox_metric`].
pub fn prox_metric(g: &ProxOp, z: &[f64], tau: f64, w: &DiagonalMetric) -> Result<Vector> {
    g.prox_metric(z, tau, w)
}

/// Largest violation of the prox-inequality at `x̄ = prox_g(z)`:
/// `max_x g(x̄) − g(x) − ⟨x̄ − z, x − x̄⟩` over `probes`. Nonpositive for a correct prox.
pub fn check_prox_inequality(g: &ProxOp, z: &[f64], probes: &[Vector]) -> Result<f64> {
    if !g.has_value() {
        return Err(Error::Capability("prox inequality check needs a value evaluator".into()));
    }
    let xbar = g.prox(z, 1.0);
    let gbar = g.value(&xbar).expect("checked above");
    let diff: Vector = xbar.iter().zip(z).map(|(a, b)| a - b).collect();
    let mut worst = f64::NEG_INFINITY;
    for x in probes {
        let gx = g.value(x).expect("checked above");
        if gx == f64::INFINITY {
            continue;
        }
        let inner: f64 = diff.iter().zip(x.iter().zip(&xbar)).map(|(d, (xi, bi))| d * (xi - bi)).sum();
        worst = worst.max(gbar - gx - inner);
    }
    Ok(if worst == f64::NEG_INFINITY { 0.0 } else { worst })
}

/// Diagonal positive definite weight `W = diag(w)`, inducing `‖z‖²_w = Σ w_i z_i²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMetric {
    weights: Vector,
}

impl DiagonalMetric {
    pub fn new(weights: Vector) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return param(format!("metric weights must be positive and finite, found {w}"));
        }
        Ok(Self { weights })
    }

    pub fn identity(n: usize) -> Self {
        Self { weights: vec![1.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Elementwise product, i.e. the metric of `diag(self)·diag(other)`.
    pub fn product(&self, other: &DiagonalMetric) -> DiagonalMetric {
        assert_eq!(self.dim(), other.dim());
        DiagonalMetric { weights: self.weights.iter().zip(&other.weights).map(|(a, b)| a * b).collect() }
    }

    /// Elementwise `self / other`.
    pub fn ratio(&self, other: &DiagonalMetric) -> DiagonalMetric {
        assert_eq!(self.dim(), other.dim());
        DiagonalMetric { weights: self.weights.iter().zip(&other.weights).map(|(a, b)| a / b).collect() }
    }

    pub fn norm_sq(&self, z: &[f64]) -> f64 {
        z.iter().zip(&self.weights).map(|(x, w)| w * x * x).sum()
    }

    /// `W⁻¹z`
    pub fn apply_inverse(&self, z: &[f64]) -> Vector {
        z.iter().zip(&self.weights).map(|(x, w)| x / w).collect()
    }
}
