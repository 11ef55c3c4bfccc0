//! Convex feasibility through the simultaneous projection operator
//! `T = (P_{C_1} + … + P_{C_m}) / m`.

use std::sync::Arc;

use crate::error::{param, Result};
use crate::linalg::{norm, SparseMatrix, Vector};
use crate::problem::{FixedPointClass, FixedPointProblem};
use crate::prox::{project_ball, project_hyperplane};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Ball { center: Vector, radius: f64 },
    Hyperplane { normal: Vector, offset: f64 },
}

impl ConvexSet {
    pub fn project(&self, x: &[f64]) -> Result<Vector> {
        match self {
            ConvexSet::Ball { center, radius } => project_ball(x, center, *radius),
            ConvexSet::Hyperplane { normal, offset } => project_hyperplane(x, normal, *offset),
        }
    }
}

/// Mean of the projections of `x` onto every set, summed in index order.
pub fn simultaneous_projection(x: &[f64], sets: &[ConvexSet]) -> Result<Vector> {
    if sets.is_empty() {
        return param("simultaneous projection needs at least one set");
    }
    let mut acc = vec![0.0; x.len()];
    for s in sets {
        for (a, p) in acc.iter_mut().zip(s.project(x)?) {
            *a += p;
        }
    }
    let m = sets.len() as f64;
    acc.iter_mut().for_each(|a| *a /= m);
    Ok(acc)
}

/// Random balls `B(c_i, ‖c_i‖ + 1)` with `c_i` coordinates drawn from `N(0, 10²)`.
///
/// The origin lies in every ball, so it is a fixed point of `T`. The start
/// point is the mean of the centers.
pub fn make_balls_cfp(n: usize, m: usize, seed: u64) -> Result<FixedPointProblem> {
    if n == 0 || m == 0 {
        return param("balls feasibility problem needs n, m >= 1");
    }
    let mut rng = RngStream::new(seed);
    let mut centers = Vec::with_capacity(m);
    for _ in 0..m {
        centers.push(rng.normal(0.0, 10.0, n)?);
    }
    let radii: Vector = centers.iter().map(|c| norm(c) + 1.0).collect();
    let mut start = vec![0.0; n];
    for c in &centers {
        for (s, ci) in start.iter_mut().zip(c) {
            *s += ci;
        }
    }
    start.iter_mut().for_each(|s| *s /= m as f64);

    let sets: Vec<ConvexSet> =
        centers.into_iter().zip(radii).map(|(center, radius)| ConvexSet::Ball { center, radius }).collect();
    let sets = Arc::new(sets);
    Ok(FixedPointProblem::new(
        format!("balls-cfp-n{n}-m{m}"),
        n,
        FixedPointClass::FirmlyNonexpansive,
        move |x: &[f64]| simultaneous_projection(x, &sets).expect("balls are well formed"),
    )
    .with_start(start)
    .with_fixed_point(vec![0.0; n]))
}

/// Fraction of nonzeros in the random measurement matrix.
pub const LINEAR_CFP_DENSITY: f64 = 0.05;
/// Every this-many-th row repeats an earlier measurement with fresh noise,
/// which makes the noisy system inconsistent.
pub const LINEAR_CFP_REPEAT_EVERY: usize = 8;

/// Hyperplane feasibility `⟨a_i, x⟩ = b_i` for a random sparse `A ∈ ℝ^{m×n}`.
#[derive(Debug, Clone)]
pub struct LinearCfp {
    pub a: SparseMatrix,
    pub b: Vector,
    /// Ground truth `x̂` with `b = Ax̂ + ε`.
    pub truth: Vector,
    row_norm_sq: Vector,
}

impl LinearCfp {
    /// `T x = x − (1/m) Σ_i (⟨a_i,x⟩ − b_i)/‖a_i‖² · a_i`.
    pub fn apply(&self, x: &[f64]) -> Vector {
        let m = self.a.rows() as f64;
        let coef: Vector =
            (0..self.a.rows()).map(|i| (self.a.row_dot(i, x) - self.b[i]) / self.row_norm_sq[i] / m).collect();
        let step = self.a.matvec_transpose(&coef);
        x.iter().zip(step).map(|(xi, s)| xi - s).collect()
    }

    pub fn sets(&self) -> Vec<ConvexSet> {
        (0..self.a.rows())
            .map(|i| {
                let mut normal = vec![0.0; self.a.cols()];
                let (idx, val) = self.a.row(i);
                for (&j, &v) in idx.iter().zip(val) {
                    normal[j] = v;
                }
                ConvexSet::Hyperplane { normal, offset: self.b[i] }
            })
            .collect()
    }
}

/// Generates the measurement system; see [`LINEAR_CFP_DENSITY`] and [`LINEAR_CFP_REPEAT_EVERY`].
pub fn linear_cfp_system(n: usize, m: usize, noise_std: f64, seed: u64) -> Result<LinearCfp> {
    if n == 0 || m == 0 {
        return param("linear feasibility problem needs n, m >= 1");
    }
    if !(noise_std >= 0.0) {
        return param(format!("noise standard deviation must be nonnegative, got {noise_std}"));
    }
    let mut rng = RngStream::new(seed);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
    for i in 0..m {
        if i > 0 && i % LINEAR_CFP_REPEAT_EVERY == 0 {
            let src = (rng.next_u64() % i as u64) as usize;
            rows.push(rows[src].clone());
            continue;
        }
        loop {
            let row: Vec<(usize, f64)> = (0..n)
                .filter_map(|j| {
                    let keep = rng.unit_closed() < LINEAR_CFP_DENSITY;
                    let v = rng.standard_normal();
                    keep.then_some((j, v))
                })
                .collect();
            if !row.is_empty() {
                rows.push(row);
                break;
            }
        }
    }
    let a = SparseMatrix::from_rows(n, rows)?;
    let truth = rng.normal(0.0, 1.0, n)?;
    let noise = rng.normal(0.0, noise_std, m)?;
    let b: Vector = a.matvec(&truth).iter().zip(&noise).map(|(v, e)| v + e).collect();
    let row_norm_sq = (0..m).map(|i| a.row_norm_sq(i)).collect();
    Ok(LinearCfp { a, b, truth, row_norm_sq })
}

/// Simultaneous hyperplane projection for [`linear_cfp_system`], started at the origin.
pub fn make_linear_cfp(n: usize, m: usize, noise_std: f64, seed: u64) -> Result<FixedPointProblem> {
    let sys = Arc::new(linear_cfp_system(n, m, noise_std, seed)?);
    let truth = sys.truth.clone();
    let t = Arc::clone(&sys);
    let mut p = FixedPointProblem::new(
        format!("linear-cfp-m{m}-n{n}"),
        n,
        FixedPointClass::FirmlyNonexpansive,
        move |x: &[f64]| t.apply(x),
    )
    .with_start(vec![0.0; n]);
    if noise_std == 0.0 {
        p = p.with_fixed_point(truth);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist;

    #[test]
    fn two_coordinate_hyperplanes() {
        let sets = vec![
            ConvexSet::Hyperplane { normal: vec![1.0, 0.0], offset: 0.0 },
            ConvexSet::Hyperplane { normal: vec![0.0, 1.0], offset: 0.0 },
        ];
        assert_eq!(simultaneous_projection(&[2.0, 4.0], &sets).unwrap(), vec![1.0, 2.0]);
        assert_eq!(simultaneous_projection(&[0.0, 0.0], &sets).unwrap(), vec![0.0, 0.0]);
        assert!(simultaneous_projection(&[0.0], &[]).is_err());
    }

    #[test]
    fn balls_contain_origin() {
        let p = make_balls_cfp(10, 7, 3).unwrap();
        assert_eq!(p.apply_untracked(&[0.0; 10]), vec![0.0; 10]);
        let q = make_balls_cfp(10, 7, 3).unwrap();
        assert_eq!(p.start(), q.start());
        assert!(p.start().unwrap().iter().any(|x| *x != 0.0));
    }

    #[test]
    fn consistent_linear_system_fixes_truth() {
        let sys = linear_cfp_system(40, 20, 0.0, 5).unwrap();
        let tx = sys.apply(&sys.truth);
        assert!(dist(&tx, &sys.truth) < 1e-12);
        let p = make_linear_cfp(40, 20, 0.0, 5).unwrap();
        assert!(p.residual(p.fixed_point().unwrap()) < 1e-12);
    }

    #[test]
    fn matrix_form_matches_set_average() {
        let sys = linear_cfp_system(30, 17, 0.5, 9).unwrap();
        let x: Vector = (0..30).map(|i| (i as f64).sin()).collect();
        let a = sys.apply(&x);
        let b = simultaneous_projection(&x, &sys.sets()).unwrap();
        assert!(dist(&a, &b) < 1e-12);
    }

    #[test]
    fn single_hyperplane_is_plain_projection() {
        let sys = linear_cfp_system(12, 1, 0.0, 2).unwrap();
        let x = vec![1.0; 12];
        let sets = sys.sets();
        let expected = sets[0].project(&x).unwrap();
        assert!(dist(&sys.apply(&x), &expected) < 1e-12);
    }
}
