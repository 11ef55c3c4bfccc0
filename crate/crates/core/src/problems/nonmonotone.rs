//! Nonmonotone equation `F(z) = M(z)z = 0` with `M(z) = t₁t₁ᵀ + t₂t₂ᵀ`,
//! `t₁ = A sin z`, `t₂ = B exp z` (entrywise functions).
//!
//! `M(z)` is positive semidefinite, so `⟨F(z), z⟩ ≥ 0` and `z̄ = 0` is a Minty
//! solution, but `F` itself is not monotone.

use crate::error::{param, Result};
use crate::linalg::{dot, DenseMatrix, Vector};
use crate::problem::{MonotonicityClass, VIProblem};
use crate::prox::ProxOp;
use crate::rng::RngStream;

/// `‖z‖` below which a zero of `F` is considered the trivial solution.
pub const NONTRIVIAL_NORM: f64 = 0.1;

/// `F(z) = t₁⟨t₁, z⟩ + t₂⟨t₂, z⟩` in `O(n²)` without forming `M(z)`.
pub fn nonmonotone_f(z: &[f64], a: &DenseMatrix, b: &DenseMatrix) -> Vector {
    let sin_z: Vector = z.iter().map(|x| x.sin()).collect();
    let exp_z: Vector = z.iter().map(|x| x.exp()).collect();
    let t1 = a.matvec(&sin_z);
    let t2 = b.matvec(&exp_z);
    let c1 = dot(&t1, z);
    let c2 = dot(&t2, z);
    t1.iter().zip(&t2).map(|(u, v)| c1 * u + c2 * v).collect()
}

/// `A` then `B`, entries `N(0,1)` in row-major order.
pub fn nonmonotone_matrices(n: usize, seed: u64) -> Result<(DenseMatrix, DenseMatrix)> {
    if n == 0 {
        return param("nonmonotone problem needs n >= 1");
    }
    let mut rng = RngStream::new(seed);
    let a = DenseMatrix::from_row_major(n, n, rng.normal(0.0, 1.0, n * n)?)?;
    let b = DenseMatrix::from_row_major(n, n, rng.normal(0.0, 1.0, n * n)?)?;
    Ok((a, b))
}

/// VI with `g ≡ 0`; start from `(1, …, 1)` and look for a solution with `‖z‖ ≥ 0.1`.
pub fn make_nonmonotone(n: usize, seed: u64) -> Result<VIProblem> {
    let (a, b) = nonmonotone_matrices(n, seed)?;
    Ok(nonmonotone_problem(a, b))
}

pub fn nonmonotone_problem(a: DenseMatrix, b: DenseMatrix) -> VIProblem {
    let n = a.rows();
    VIProblem::new(
        format!("nonmonotone-n{n}"),
        n,
        move |z: &[f64]| -> Result<Vector> { Ok(nonmonotone_f(z, &a, &b)) },
        ProxOp::Zero,
    )
    .with_class(MonotonicityClass::MintyOnly)
}
