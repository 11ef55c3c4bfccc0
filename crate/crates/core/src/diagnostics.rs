//! Residuals, ergodic averages, Lyapunov monitoring and rate fitting.

use crate::error::{param, Error, Result};
use crate::linalg::{dist, dist_sq, dot, norm, Vector};
use crate::problem::{FixedPointProblem, VIProblem};
use crate::prox::ProxOp;
use crate::solvers::Trace;

/// `r(z, λ) = ‖z − prox_{λg}(z − λF(z))‖`; evaluates `F` without counting.
pub fn natural_residual(z: &[f64], lambda: f64, problem: &VIProblem) -> Result<f64> {
    if !(lambda > 0.0) {
        return param(format!("residual stepsize must be positive, got {lambda}"));
    }
    let fz = problem.eval_untracked(z)?;
    Ok(natural_residual_from(z, &fz, lambda, problem.g()))
}

/// [`natural_residual`] with a precomputed `F(z)`.
pub fn natural_residual_from(z: &[f64], fz: &[f64], lambda: f64, g: &ProxOp) -> f64 {
    let w: Vector = z.iter().zip(fz).map(|(a, f)| a - lambda * f).collect();
    dist(z, &g.prox(&w, lambda))
}

/// `Z^k = Σλ_i z^i / Σλ_i`.
pub fn ergodic_point(trace: &Trace) -> Result<Vector> {
    if trace.records.is_empty() || !(trace.lambda_sum > 0.0) {
        return param("ergodic point of an empty trace");
    }
    Ok(trace.weighted_sum.iter().map(|s| s / trace.lambda_sum).collect())
}

/// `Ψ(u, v) = ⟨F(u), v − u⟩ + g(v) − g(u)`.
pub fn psi_value(problem: &VIProblem, u: &[f64], v: &[f64]) -> Result<f64> {
    let g = problem.g();
    if !g.has_value() {
        return Err(Error::Capability("Psi needs the value of g".into()));
    }
    let fu = problem.eval_untracked(u)?;
    let inner: f64 = fu.iter().zip(v.iter().zip(u)).map(|(f, (a, b))| f * (a - b)).sum();
    let gv = g.value(v).expect("checked has_value");
    let gu = g.value(u).expect("checked has_value");
    if gu.is_infinite() {
        return Err(Error::Domain("Psi(u, v) needs u in dom g".into()));
    }
    Ok(inner + gv - gu)
}

/// `(φ/(φ−1))‖z̄ − z*‖² + (θ_prev/2)‖z − z_prev‖²`.
pub fn lyapunov_energy(z_bar: &[f64], z: &[f64], z_prev: &[f64], theta_prev: f64, phi: f64, z_star: &[f64]) -> f64 {
    phi / (phi - 1.0) * dist_sq(z_bar, z_star) + theta_prev / 2.0 * dist_sq(z, z_prev)
}

/// Least-squares line through `(k, ln r_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Inclusive 1-based iteration window `[k₀, k₁]`.
    pub window: (usize, usize),
    /// Points of the window left out because the residual was not positive.
    pub trimmed: usize,
}

impl RateFit {
    /// Per-iteration contraction factor `exp(slope)`.
    pub fn factor(&self) -> f64 {
        self.slope.exp()
    }
}

/// Fits `ln r_k ≈ intercept + slope·k`, where `residuals[i]` belongs to `k = i + 1`.
///
/// The default window is the tail half `[⌊K/2⌋ + 1, K]`. Nonpositive or
/// non-finite residuals are dropped from the fit and counted in `trimmed`.
pub fn fit_linear_rate(residuals: &[f64], window: Option<(usize, usize)>) -> Result<RateFit> {
    let total = residuals.len();
    let (k0, k1) = window.unwrap_or((total / 2 + 1, total));
    if k0 < 1 || k1 <= k0 || k1 > total {
        return param(format!("rate window [{k0}, {k1}] is invalid for {total} residuals"));
    }
    let mut pts = Vec::with_capacity(k1 - k0 + 1);
    let mut trimmed = 0;
    for k in k0..=k1 {
        let r = residuals[k - 1];
        if r > 0.0 && r.is_finite() {
            pts.push((k as f64, r.ln()));
        } else {
            trimmed += 1;
        }
    }
    if pts.len() < 2 {
        return param("rate fit needs at least two positive residuals");
    }
    let m = pts.len() as f64;
    let mean_k = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_k).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_k) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_k;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(RateFit { slope, intercept, r_squared, window: (k0, k1), trimmed })
}

/// Largest `‖Tx − x̄‖² − ‖x − x̄‖² − ‖x − Tx‖²` over the samples; `≤ 0` means
/// `T` behaves demi-contractively around `x̄` on the sample.
pub fn check_demicontractive(t: &FixedPointProblem, fixed_point: &[f64], samples: &[Vector]) -> Result<f64> {
    let tx_bar = t.apply_untracked(fixed_point);
    if dist(&tx_bar, fixed_point) > 1e-9 * norm(fixed_point).max(1.0) {
        return param("reference point is not a fixed point of T");
    }
    let mut worst = f64::NEG_INFINITY;
    for x in samples {
        let tx = t.apply_untracked(x);
        let v = dist_sq(&tx, fixed_point) - dist_sq(x, fixed_point) - dist_sq(x, &tx);
        worst = worst.max(v);
    }
    Ok(if worst == f64::NEG_INFINITY { 0.0 } else { worst })
}

/// `min ⟨Tx − x, x̄ − x⟩` over the samples, half the negated violation of
/// [`check_demicontractive`].
pub fn min_obtuse_product(t: &FixedPointProblem, fixed_point: &[f64], samples: &[Vector]) -> f64 {
    samples
        .iter()
        .map(|x| {
            let tx = t.apply_untracked(x);
            let a: Vector = tx.iter().zip(x).map(|(p, q)| p - q).collect();
            let b: Vector = fixed_point.iter().zip(x).map(|(p, q)| p - q).collect();
            dot(&a, &b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `max_{k > k₀} k·gap_k / (k₀·gap_{k₀})` with `k₀ = ⌈fraction·K⌉`
/// (1-based `k`); values `≤ 1` mean the scaled gap never rose above its
/// reference value. Returns `None` when the reference gap is not positive.
pub fn scaled_gap_ratio(gaps: &[f64], fraction: f64) -> Result<Option<f64>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return param(format!("fraction must lie in (0, 1), got {fraction}"));
    }
    let total = gaps.len();
    let k0 = ((fraction * total as f64).ceil() as usize).max(1);
    if k0 >= total {
        return param("too few gaps for the requested split");
    }
    let reference = k0 as f64 * gaps[k0 - 1];
    if !(reference > 0.0) {
        return Ok(None);
    }
    let worst = (k0 + 1..=total).map(|k| k as f64 * gaps[k - 1]).fold(f64::NEG_INFINITY, f64::max);
    Ok(Some(worst / reference))
}
